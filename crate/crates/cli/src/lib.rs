//! Command-line front end for multilevel PWM design.

pub mod config;
pub mod presets;
pub mod run;
#[cfg(feature = "selftest")]
pub mod selftest;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use presets::{load_preset, preset_names, resolve_presets};
pub use run::{run, run_batch, BatchReport, RunError, RunOutcome};
