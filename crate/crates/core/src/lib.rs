//! Respondent-driven sampling simulation toolkit.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod netgen;
pub mod rds;
pub mod rng;
pub mod validate;

pub use error::{Error, Result};
