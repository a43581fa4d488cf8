//! Experiment harness: config parsing, output stamping, and the commands
//! behind the `decentral` binary.

pub mod config;
pub mod data;
pub mod error;
pub mod estimate;
pub mod output;
pub mod pep_sweep;
pub mod synth;
pub mod train;

pub use config::Config;
pub use error::{HarnessError, Result};
pub use output::Output;
