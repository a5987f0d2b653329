//! Bundled scenarios: selective harmonic elimination (`she-*`) and harmonic
//! compensation (`hc-*`) designs at N = 2048 for 3, 5, 8 and 11 levels.

use crate::config::{parse_config, ConfigError, RunConfig};

pub const PRESETS: [(&str, &str); 8] = [
    ("she-3level", include_str!("../presets/she-3level.toml")),
    ("she-5level", include_str!("../presets/she-5level.toml")),
    ("she-8level", include_str!("../presets/she-8level.toml")),
    ("she-11level", include_str!("../presets/she-11level.toml")),
    ("hc-3level", include_str!("../presets/hc-3level.toml")),
    ("hc-5level", include_str!("../presets/hc-5level.toml")),
    ("hc-8level", include_str!("../presets/hc-8level.toml")),
    ("hc-11level", include_str!("../presets/hc-11level.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load_preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = preset_text(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
    parse_config(text, name)
}

/// Expands `all`, a comma-separated list, or an empty string.
pub fn resolve_presets(list: &str) -> Result<Vec<RunConfig>, ConfigError> {
    if list.trim() == "all" {
        return preset_names().map(load_preset).collect();
    }
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(load_preset)
        .collect()
}
