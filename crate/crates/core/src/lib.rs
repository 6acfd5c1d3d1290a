pub mod analysis;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
pub use oracle::{CgBudget, MinimaxOracle, Point};
pub use solvers::{run, Algorithm, Mode, SolverSpec, StopCriteria, Termination, Trace};
