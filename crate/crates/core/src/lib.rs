//! Random feature method for linear boundary value problems.

pub mod assembly;
pub mod basis;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod geometry;
pub mod jet;
pub mod problems;
pub mod solver;

pub use error::{Result, RfmError};
