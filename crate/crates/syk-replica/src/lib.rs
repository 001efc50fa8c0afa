//! Large-N Schwinger-Dyson solvers for Rényi coherent information of SYK
//! and low-rank SYK codes under parity-breaking and parity-conserving noise.

pub mod analysis;
pub mod channels;
pub mod cli;
pub mod contour;
pub mod edoracle;
pub mod error;
pub mod field;
pub mod linalg;
pub mod models;
pub mod solver;
pub mod suite;

pub use contour::{build_contour, free_propagator, noise_vertex, ContourKind, ContourSpec, NoiseWindow};
pub use error::{Error, Result};
pub use field::BilocalField;
pub use models::ModelParams;
pub use solver::{solve, solve_thermal, SolveResult, SolverConfig};
