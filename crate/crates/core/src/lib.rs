//! Polynomial formulations of graph coloring and the traveling salesman
//! problem, Grover adaptive search circuits built from them, resource counts
//! and a small statevector simulator.

pub mod analysis;
pub mod boolpoly;
pub mod circuit;
pub mod encoding;
pub mod error;
pub mod gas;
pub mod problems;
pub mod simulator;

pub use error::{Error, Result};
