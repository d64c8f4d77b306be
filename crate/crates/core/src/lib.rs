//! Exact computations with d-fold matrix factorizations.

pub mod claims;
pub mod cyclo;
pub mod error;
pub mod knorrer;
pub mod linsolve;
pub mod matfac;
pub mod matrix;
pub mod morphism;
pub mod poly;
pub mod structure;
pub mod tensor;
pub mod ulrich;

pub use error::{Error, Result};
