use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pwmlp_core::simplex::IterationLog;
use pwmlp_core::{
    design_with, BoundCertificate, DesignError, DesignResult, FormulationError, SimplexError, SolveStats, SolverOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};

pub const THREADS_ENV: &str = "PWMLP_THREADS";
const VERBOSE_LOG_INTERVAL: usize = 500;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 3,
            RunError::Design(e) => match e {
                DesignError::Infeasible => 2,
                DesignError::Model(_) => 3,
                DesignError::Formulation(FormulationError::Model(_))
                | DesignError::Formulation(FormulationError::AsymmetricLevelsUnderHalfWave(_)) => 3,
                _ => 4,
            },
            RunError::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(ConfigError::Parse { .. }) => "parse_error",
            RunError::Config(ConfigError::Io { .. }) => "config_io",
            RunError::Config(_) => "validation_error",
            RunError::Design(e) => match e {
                DesignError::Infeasible => "infeasible",
                DesignError::Unbounded => "unbounded",
                DesignError::Solver(SimplexError::IterationLimit { .. }) => "iteration_limit",
                DesignError::Certify(_) => "certificate_violated",
                _ if self.exit_code() == 3 => "validation_error",
                _ => "numerical_breakdown",
            },
            RunError::Io { .. } => "io_error",
        }
    }

    pub fn field(&self) -> Option<&'static str> {
        match self {
            RunError::Config(ConfigError::Validation { field, .. }) => Some(field),
            _ => None,
        }
    }

    /// One `key=value` line; the message is a JSON string literal.
    pub fn diagnostic(&self, scenario: &str) -> String {
        let mut line = format!(
            "pwmlp: error={} exit={} scenario={}",
            self.kind(),
            self.exit_code(),
            serde_json::to_string(scenario).expect("string serializes")
        );
        if let Some(f) = self.field() {
            line.push_str(&format!(" field={f}"));
        }
        line.push_str(&format!(
            " message={}",
            serde_json::to_string(&self.to_string()).expect("string serializes")
        ));
        line
    }
}

#[derive(Debug, Serialize)]
struct HarmonicReport {
    k: usize,
    target_re: f64,
    target_im: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct ResultReport<'a> {
    scenario: &'a str,
    n_samples: usize,
    levels: &'a [f64],
    half_wave: bool,
    zero_dc: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<f64>,
    thd: f64,
    lp_objective: f64,
    certificates: &'a BoundCertificate,
    solver: &'a SolveStats,
    harmonics: Vec<HarmonicReport>,
}

pub fn result_json(config: &RunConfig, result: &DesignResult) -> String {
    let harmonics = config
        .spec
        .targets()
        .iter()
        .map(|t| {
            let h = result.spectrum[t.k - 1];
            HarmonicReport {
                k: t.k,
                target_re: t.re,
                target_im: t.im,
                re: h.re,
                im: h.im,
            }
        })
        .collect();
    let report = ResultReport {
        scenario: &config.name,
        n_samples: config.spec.n_samples(),
        levels: config.levels.values(),
        half_wave: config.spec.half_wave(),
        zero_dc: config.spec.zero_dc(),
        period: config.period,
        thd: result.thd,
        lp_objective: result.lp_objective,
        certificates: &result.certificates,
        solver: &result.stats,
        harmonics,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

pub fn waveform_csv(config: &RunConfig, result: &DesignResult) -> Vec<u8> {
    let n = result.waveform.len();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index", "t_over_n", "value"];
    if config.period.is_some() {
        header.push("time_s");
    }
    w.write_record(&header).expect("in-memory write");
    for (i, v) in result.waveform.samples().iter().enumerate() {
        let frac = i as f64 / n as f64;
        let mut rec = vec![i.to_string(), frac.to_string(), v.to_string()];
        if let Some(p) = config.period {
            rec.push((frac * p).to_string());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn spectrum_csv(result: &DesignResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "re", "im", "magnitude"]).expect("in-memory write");
    for (i, h) in result.spectrum.iter().enumerate() {
        w.write_record([(i + 1).to_string(), h.re.to_string(), h.im.to_string(), h.norm().to_string()])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, RunError> {
    let target = dir.join(name);
    let io = |source| RunError::Io {
        path: target.clone(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::Builder::new()
        .prefix(&format!(".{name}."))
        .tempfile_in(dir)
        .map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub result: DesignResult,
    pub wall_time: Duration,
    pub files: Vec<PathBuf>,
}

pub fn solve_config(config: &RunConfig) -> Result<DesignResult, DesignError> {
    let mut options = SolverOptions::default();
    if config.verbose {
        options.log_interval = VERBOSE_LOG_INTERVAL;
        let name = config.name.clone();
        let mut log = move |l: &IterationLog| {
            eprintln!(
                "pwmlp: scenario={name} iteration={} phase={} objective={:e} infeasibility={:e} bland={}",
                l.iteration, l.phase, l.objective, l.infeasibility, l.bland
            );
        };
        design_with(&config.spec, &config.levels, &options, Some(&mut log))
    } else {
        design_with(&config.spec, &config.levels, &options, None)
    }
}

/// Designs the waveform and writes `result.json` (and, unless disabled, the
/// waveform and spectrum CSVs) into `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let result = solve_config(config)?;
    let wall_time = start.elapsed();
    let dir = &config.output_dir;
    let mut files = Vec::new();
    if config.emit_plot_data {
        files.push(write_atomic(dir, "waveform.csv", &waveform_csv(config, &result))?);
        files.push(write_atomic(dir, "spectrum.csv", &spectrum_csv(&result))?);
    }
    files.push(write_atomic(dir, "result.json", result_json(config, &result).as_bytes())?);
    if config.verbose {
        eprintln!(
            "pwmlp: scenario={} thd={} iterations={} wall_time_s={:.3}",
            config.name,
            result.thd,
            result.stats.iterations,
            wall_time.as_secs_f64()
        );
    }
    Ok(RunOutcome {
        result,
        wall_time,
        files,
    })
}

#[derive(Debug)]
pub struct BatchEntry {
    pub scenario: String,
    pub m: usize,
    pub outcome: Result<RunOutcome, RunError>,
}

#[derive(Debug)]
pub struct BatchReport {
    pub entries: Vec<BatchEntry>,
    pub summary: PathBuf,
}

impl BatchReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.outcome.is_err()).count()
    }
}

/// Thread count from `PWMLP_THREADS`; unset or unparsable means rayon's default.
pub fn batch_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn summary_csv(entries: &[BatchEntry]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "m",
        "thd",
        "residual_inf",
        "residual_bound",
        "energy_gap",
        "energy_gap_bound",
        "integral_rows",
        "iterations",
        "wall_time_s",
        "status",
    ])
    .expect("in-memory write");
    for e in entries {
        let rec = match &e.outcome {
            Ok(o) => {
                let c = &o.result.certificates;
                vec![
                    e.scenario.clone(),
                    e.m.to_string(),
                    o.result.thd.to_string(),
                    c.residual_inf.to_string(),
                    c.residual_bound.to_string(),
                    c.energy_gap.to_string(),
                    c.energy_gap_bound.to_string(),
                    c.integral_rows.to_string(),
                    o.result.stats.iterations.to_string(),
                    format!("{:.3}", o.wall_time.as_secs_f64()),
                    "ok".to_string(),
                ]
            }
            Err(err) => {
                let mut rec = vec![e.scenario.clone(), e.m.to_string()];
                rec.extend(std::iter::repeat(String::new()).take(8));
                rec.push(err.kind().to_string());
                rec
            }
        };
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Runs every scenario, each into `out_root/<scenario>`, and writes
/// `out_root/summary.csv`. Rows keep the input order.
pub fn run_batch(configs: Vec<RunConfig>, out_root: &Path, threads: Option<usize>) -> Result<BatchReport, RunError> {
    let work = |configs: Vec<RunConfig>| -> Vec<BatchEntry> {
        configs
            .into_par_iter()
            .map(|mut c| {
                c.output_dir = out_root.join(&c.name);
                BatchEntry {
                    scenario: c.name.clone(),
                    m: c.levels.len(),
                    outcome: run(&c),
                }
            })
            .collect()
    };
    let pool = threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok());
    let entries = match pool {
        Some(pool) => pool.install(|| work(configs)),
        None => work(configs),
    };
    let summary = write_atomic(out_root, "summary.csv", &summary_csv(&entries))?;
    Ok(BatchReport { entries, summary })
}
