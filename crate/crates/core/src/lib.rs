//! Chance-constrained two-stage planning of a building-level integrated
//! energy system: scenario generation, MILP assembly, solution extraction
//! and reporting.

pub mod analysis;
pub mod error;
pub mod finance;
pub mod io;
pub mod model;
pub mod presets;
pub mod scengen;
pub mod solve;
pub mod types;
pub mod validate;

pub use error::{Error, Result};
pub use iesplan_milp as milp;
pub use types::*;
