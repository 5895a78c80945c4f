//! Numerical laboratory for approximating elements of diagonal subhomogeneous
//! algebras by invertible ones.

mod error;
pub mod matrixkit;
pub mod unitary_paths;
pub mod dsh_model;
pub mod dynamics;
pub mod pipeline;
pub mod suites;

pub use error::{Error, Result};
