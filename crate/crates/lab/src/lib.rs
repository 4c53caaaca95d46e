//! Experiment harness for the LDOS width study: configuration, eigensystem
//! cache, sweeps, CSV output and the acceptance suite.

pub mod acceptance;
pub mod cache;
pub mod config;
pub mod experiments;
pub mod output;
pub mod tolerances;
