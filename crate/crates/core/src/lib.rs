//! Exact finite-field computations for central extensions of Laurent
//! polynomial groups and their type I criteria.

pub mod algebraic;
pub mod cocycle;
pub mod error;
pub mod extension;
pub mod field;
pub mod group;
pub mod laurent;
pub mod linalg;
pub mod report;
pub mod typei;

pub use error::{Error, Result};
