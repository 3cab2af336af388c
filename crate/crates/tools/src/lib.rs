//! Experiment harness and command-line plumbing for `prc-core`: parameter
//! and key files, trial-parallel estimation with deterministic streams, CSV
//! reports and the acceptance experiments.

pub mod config;
pub mod criteria;
pub mod dynamic;
pub mod error;
pub mod harness;
pub mod keys;
pub mod records;
pub mod runner;

pub use error::{Result, ToolError};
