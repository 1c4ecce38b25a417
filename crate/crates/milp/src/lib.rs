//! Self-contained MILP machinery sized for desk-scale planning models:
//! a bounded-variable revised simplex, best-first branch-and-bound, an
//! independent feasibility checker and free-format MPS I/O.

pub mod bnb;
pub mod error;
pub mod exec;
pub mod lu;
pub mod mps;
pub mod problem;
pub mod simplex;
pub mod verify;

pub use bnb::{branch_and_bound, BnbOptions, BnbSolution, BnbStatus};
pub use error::MilpError;
pub use exec::Execution;
pub use mps::{parse_mps, write_mps};
pub use problem::{Column, Problem, Row, Sense, VarKind};
pub use simplex::{solve_lp, solve_lp_with, Basis, LpOptions, LpSolution, LpStatus, VarStatus};
pub use verify::{check_point, FeasibilityReport};
