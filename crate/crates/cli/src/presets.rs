//! Figure presets. The TOML files live in `presets/` and are compiled in.

use crate::config::ScenarioConfig;
use crate::error::CliError;

pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! preset {
    ($name:literal) => {
        Preset {
            name: $name,
            text: include_str!(concat!("../presets/", $name, ".toml")),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("fig2-casei"),
    preset!("fig2-caseii"),
    preset!("fig2-caseiii"),
    preset!("fig2-caseiv"),
    preset!("fig4"),
    preset!("fig5"),
    preset!("fig5-delta8"),
    preset!("fig7a"),
    preset!("fig7b"),
];

pub fn find(name: &str) -> Result<&'static Preset, CliError> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

/// Parses a preset with optional overrides.
pub fn load(name: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::parse(find(name)?.text, overrides)
}
