//! Command-line front end for prequential learning-curve experiments:
//! corpus validation and synthesis, experiment runs, SVG figures and text
//! reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

pub use config::RunConfig;
pub use error::CliError;
