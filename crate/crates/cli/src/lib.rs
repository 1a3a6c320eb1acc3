//! Command-line front end of `onlinefwer`: experiment configs, the results
//! table and the verification suites.

pub mod args;
pub mod config;
pub mod error;
pub mod experiment;
pub mod table;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, Scenario};
pub use error::CliError;
pub use experiment::{run_config_file, run_experiment};
pub use table::{format_sig, read_csv, write_csv, ResultRow};
pub use verify::{FamilyKind, VerifyOptions, VerifyReport};
