//! Batch runner for matrix factorization problem documents.
//!
//! A document declares a ring, named polynomials, factorizations and
//! morphisms, and a list of commands. [`run`] executes the commands in
//! order and returns a report that renders either as text or as JSON.

pub mod doc;
pub mod run;

pub use doc::{DocError, Problem, ProblemDoc};
pub use run::{run, Flags, RunReport, Status};
