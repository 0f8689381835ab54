//! Command-line driver for `darboux-core`: JSON configuration, parallel grid
//! evaluation and deterministic CSV/JSON export.

pub mod config;
pub mod export;
pub mod run;

pub use config::{Mode, RunConfig, ValidationErrors};
pub use run::{run, Outcome, RunError, RunOptions};
