//! Scenario configs, built-in scenarios and reports.

pub mod config;
pub mod report;

pub use config::{builtin, builtin_toml, list_scenarios, parse_rational, parse_window, positive_rational, OutputFormat, ScenarioConfig};
pub use report::{run_scenario, Report, EXIT_CONFIG, EXIT_OK, EXIT_REFUSED, EXIT_VIOLATED};
