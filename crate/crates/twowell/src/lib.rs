//! Configuration, scans, file formats and the command-line front end for
//! [`twowell_core`].

pub mod config;
pub mod scan;
pub mod svg;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use scan::{compute_scan, run_scan, solve_well, ScanRecord, WellSolution};
