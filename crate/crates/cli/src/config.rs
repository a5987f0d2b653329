//! TOML run configuration.
//!
//! ```toml
//! name = "she-3level"          # optional, used in batch summaries
//! levels = [-2.0, 0.0, 2.0]
//! n_samples = 2048
//! zero_dc = true               # default false
//! half_wave = false            # default false
//! output_dir = "out"           # default "out"
//! emit_plot_data = true        # default true
//! verbose = false              # default false
//! period = 2.048e-3            # optional, seconds; labels the time axis only
//!
//! [[harmonics]]
//! k = 1
//! re = 1.0
//! im = -1.0
//! ```

use std::path::{Path, PathBuf};

use pwmlp_core::{validate_spec, HarmonicSpec, HarmonicTarget, LevelSet, ModelError};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Validation { field: &'static str, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHarmonic {
    k: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    levels: Option<Vec<f64>>,
    n_samples: Option<usize>,
    harmonics: Option<Vec<RawHarmonic>>,
    half_wave: Option<bool>,
    zero_dc: Option<bool>,
    output_dir: Option<PathBuf>,
    emit_plot_data: Option<bool>,
    verbose: Option<bool>,
    period: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub levels: LevelSet,
    pub spec: HarmonicSpec,
    pub output_dir: PathBuf,
    pub emit_plot_data: bool,
    pub verbose: bool,
    pub period: Option<f64>,
}

fn field_of(e: &ModelError) -> &'static str {
    use ModelError::*;
    match e {
        TooFewLevels(_) | NotStrictlyIncreasing(_) | NonFiniteLevel(_) => "levels",
        RatioViolated { .. } | OddSamplesUnderHalfWave(_) | TooFewSamples(_) => "n_samples",
        EvenHarmonicUnderHalfWave(_) => "half_wave",
        _ => "harmonics",
    }
}

fn invalid(e: ModelError) -> ConfigError {
    ConfigError::Validation {
        field: field_of(&e),
        message: e.to_string(),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

fn missing(field: &'static str) -> ConfigError {
    ConfigError::Validation {
        field,
        message: "required field is missing".into(),
    }
}

/// Parses and validates a configuration. `default_name` is used when the
/// file has no `name` key.
pub fn parse_config(text: &str, default_name: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let levels = LevelSet::new(raw.levels.ok_or_else(|| missing("levels"))?).map_err(invalid)?;
    let n_samples = raw.n_samples.ok_or_else(|| missing("n_samples"))?;
    let targets = raw
        .harmonics
        .ok_or_else(|| missing("harmonics"))?
        .into_iter()
        .map(|h| HarmonicTarget::new(h.k, h.re, h.im))
        .collect();
    let spec = HarmonicSpec::new(
        n_samples,
        targets,
        raw.half_wave.unwrap_or(false),
        raw.zero_dc.unwrap_or(false),
    )
    .map_err(invalid)?;
    validate_spec(&spec, &levels).map_err(invalid)?;
    if spec.half_wave() && !levels.is_symmetric() {
        return Err(ConfigError::Validation {
            field: "levels",
            message: "half-wave anti-symmetry needs a level set closed under negation".into(),
        });
    }
    if let Some(p) = raw.period {
        if !(p.is_finite() && p > 0.0) {
            return Err(ConfigError::Validation {
                field: "period",
                message: format!("must be a positive number, got {p}"),
            });
        }
    }
    Ok(RunConfig {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        levels,
        spec,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        emit_plot_data: raw.emit_plot_data.unwrap_or(true),
        verbose: raw.verbose.unwrap_or(false),
        period: raw.period,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config");
    parse_config(&text, stem)
}
