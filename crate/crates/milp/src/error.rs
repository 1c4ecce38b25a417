use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("singular basis: no acceptable pivot for row {row}")]
    SingularBasis { row: usize },

    #[error("MPS export: illegal name {0:?}")]
    IllegalName(String),

    #[error("MPS parse error at line {line}: {msg}")]
    MpsParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
