//! Scenario files, the runner behind the `hqm` binary, and the bundled
//! scenarios.

pub mod config;
pub mod runner;

pub use config::{parse_config, Check, ConfigError, ConfigErrors, ScenarioConfig};
pub use runner::{run, Report, ReportValue, RunOutput};

/// Bundled scenarios as `(name, TOML text)`, sorted by name.
pub const SCENARIOS: [(&str, &str); 10] = [
    ("absorber", include_str!("../scenarios/absorber.toml")),
    ("ho_ground_right", include_str!("../scenarios/ho_ground_right.toml")),
    ("ho_packet_right", include_str!("../scenarios/ho_packet_right.toml")),
    ("identities_1d", include_str!("../scenarios/identities_1d.toml")),
    ("identities_3d", include_str!("../scenarios/identities_3d.toml")),
    ("left_complex_limit", include_str!("../scenarios/left_complex_limit.toml")),
    ("left_witness", include_str!("../scenarios/left_witness.toml")),
    ("lorentz_uniform_b", include_str!("../scenarios/lorentz_uniform_b.toml")),
    ("monopole_demo", include_str!("../scenarios/monopole_demo.toml")),
    ("virial_complex_w_left", include_str!("../scenarios/virial_complex_w_left.toml")),
];

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled scenario; panics only if a shipped file is invalid.
pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    scenario_text(name).map(|t| parse_config(t).unwrap_or_else(|e| panic!("bundled scenario {name}: {e}")))
}
