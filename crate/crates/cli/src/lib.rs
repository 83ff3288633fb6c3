//! Scenario runner for weak, modular and potent value experiments.
//!
//! A scenario is a TOML document naming one of the [`ScenarioKind`]s. It is
//! validated into a [`ScenarioConfig`], executed by [`run_scenario`] into
//! [`ResultRow`]s (each carrying an oracle residual), and written as CSV or
//! JSON by [`emit_results`].

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod scenario;

pub use config::{parse_config, Format, RawConfig, ScenarioConfig, ScenarioKind};
pub use error::{CliError, ConfigError, OutputError};
pub use output::{emit_results, render, Cell, Destination, ResultRow};
pub use scenario::{run_scenario, run_sweep, verify_rows};
