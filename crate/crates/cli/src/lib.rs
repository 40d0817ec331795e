//! Command-line front end for the spatial AK solvers.

pub mod error;
pub mod output;
pub mod presets;
pub mod run;
pub mod scenario_file;
pub mod sweep;

pub use error::CliError;
