use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pwmlp_cli::config::load_config;
use pwmlp_cli::presets::{load_preset, resolve_presets};
use pwmlp_cli::run::{batch_threads, run, run_batch, RunError};
use pwmlp_cli::RunConfig;

#[derive(Parser)]
#[command(name = "pwmlp", version, about = "Multilevel PWM design by LP relaxation and clamping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design one waveform from a config file or a bundled preset.
    Design {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        verbose: bool,
    },
    /// Run several scenarios and write summary.csv. Threads: PWMLP_THREADS.
    Batch {
        /// `all`, or a comma-separated list of preset names.
        #[arg(long, default_value = "")]
        presets: String,
        /// Additional config files.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        verbose: bool,
    },
    /// Cross-check the solver against brute-force oracles at small size.
    #[cfg(feature = "selftest")]
    Selftest,
}

fn fail(err: &RunError, scenario: &str) -> ExitCode {
    eprintln!("{}", err.diagnostic(scenario));
    ExitCode::from(err.exit_code() as u8)
}

fn design(config: Option<PathBuf>, preset: Option<String>, out: Option<PathBuf>, verbose: bool) -> ExitCode {
    let label = config
        .as_ref()
        .map(|p| p.display().to_string())
        .or_else(|| preset.clone())
        .unwrap_or_default();
    let loaded = match (&config, &preset) {
        (Some(path), _) => load_config(path),
        (None, Some(name)) => load_preset(name),
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(e) => return fail(&e.into(), &label),
    };
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    cfg.verbose |= verbose;
    match run(&cfg) {
        Ok(o) => {
            println!(
                "{}: thd={} lp_objective={} iterations={} dir={}",
                cfg.name,
                o.result.thd,
                o.result.lp_objective,
                o.result.stats.iterations,
                cfg.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, &cfg.name),
    }
}

fn batch(presets: String, configs: Vec<PathBuf>, out: PathBuf, verbose: bool) -> ExitCode {
    let mut scenarios: Vec<RunConfig> = match resolve_presets(&presets) {
        Ok(s) => s,
        Err(e) => return fail(&e.into(), &presets),
    };
    for path in &configs {
        match load_config(path) {
            Ok(c) => scenarios.push(c),
            Err(e) => return fail(&e.into(), &path.display().to_string()),
        }
    }
    for s in &mut scenarios {
        s.verbose |= verbose;
    }
    let report = match run_batch(scenarios, &out, batch_threads()) {
        Ok(r) => r,
        Err(e) => return fail(&e, "batch"),
    };
    let mut worst = 0;
    for entry in &report.entries {
        match &entry.outcome {
            Ok(o) => println!("{}: thd={}", entry.scenario, o.result.thd),
            Err(e) => {
                eprintln!("{}", e.diagnostic(&entry.scenario));
                worst = worst.max(e.exit_code());
            }
        }
    }
    println!("summary: {}", report.summary.display());
    ExitCode::from(worst as u8)
}

#[cfg(feature = "selftest")]
fn selftest() -> ExitCode {
    let checks = pwmlp_cli::selftest::run_selftest();
    for c in &checks {
        println!("{} {} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        eprintln!("pwmlp: error=selftest_failed exit=4");
        ExitCode::from(4)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Design {
            config,
            preset,
            out,
            verbose,
        } => design(config, preset, out, verbose),
        Command::Batch {
            presets,
            configs,
            out,
            verbose,
        } => batch(presets, configs, out, verbose),
        #[cfg(feature = "selftest")]
        Command::Selftest => selftest(),
    }
}
