//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid input,
//! 3 run completed but some step needed more than the yaw-rate limit.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::cueing::CueingLaw;
use crate::metrics::{analyze, compare, g_peak_histogram, MetricsError, ONSET_THRESHOLD_G};
use crate::sim::{
    load_scenario, run, run_both, synth_canyon_scenario, write_scenario, RunTrace, Scenario,
    ScenarioError, SimError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_YAW_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "coham", version, about = "Centrifuge G-cueing simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Rm,
    Coham,
}

impl From<LawArg> for CueingLaw {
    fn from(l: LawArg) -> Self {
        match l {
            LawArg::Rm => CueingLaw::Rm,
            LawArg::Coham => CueingLaw::Coham,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic scenario and print its hash.
    Gen {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 300.0)]
        duration: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Output scenario CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run one cueing law and write its trace and report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        law: LawArg,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run both laws on one scenario and write traces, reports and ratios.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Check a scenario and optional config without running.
    Validate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0} already exists (use --force to overwrite)")]
    Exists(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Io { .. })
            | CliError::Scenario(ScenarioError::Io { .. }) => EXIT_FAILURE,
            CliError::Config(_) | CliError::Scenario(_) => EXIT_INVALID,
            CliError::Sim(SimError::Scenario(ScenarioError::Io { .. })) => EXIT_FAILURE,
            CliError::Sim(_) => EXIT_INVALID,
            CliError::Metrics(_) | CliError::Exists(_) | CliError::Io { .. } => EXIT_FAILURE,
        }
    }
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub messages: Vec<String>,
    pub yaw_cap_steps: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.yaw_cap_steps > 0 {
            EXIT_YAW_CAP
        } else {
            EXIT_OK
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, ConfigError> {
    let cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_checked(path: &Path) -> Result<Scenario, ScenarioError> {
    let s = load_scenario(path)?;
    s.validate()?;
    Ok(s)
}

/// Refuses to clobber any of `files` unless forced.
fn check_targets(files: &[PathBuf], force: bool) -> Result<(), CliError> {
    if force {
        return Ok(());
    }
    match files.iter().find(|p| p.exists()) {
        Some(p) => Err(CliError::Exists(p.clone())),
        None => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn run_files(dir: &Path, law: CueingLaw) -> [PathBuf; 4] {
    let n = law.name();
    [
        dir.join(format!("trace_{n}.csv")),
        dir.join(format!("report_{n}.csv")),
        dir.join(format!("report_{n}.txt")),
        dir.join(format!("onsets_{n}.csv")),
    ]
}

fn write_run(dir: &Path, trace: &RunTrace, cfg: &Config) -> Result<String, CliError> {
    let report = analyze(trace, &cfg.coham)?;
    let [trace_csv, report_csv, report_txt, onsets_csv] = run_files(dir, trace.law);
    write_file(&trace_csv, &trace.to_csv())?;
    write_file(&report_csv, &report.to_csv())?;
    let summary = report.summary();
    write_file(&report_txt, &summary)?;
    write_file(&onsets_csv, &report.onsets_csv())?;
    Ok(summary)
}

fn yaw_cap_note(steps: usize, dt: f64) -> String {
    format!(
        "warning: {steps} steps ({:.2} s) need a yaw rate above the centrifuge limit",
        steps as f64 * dt
    )
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    match &cli.command {
        Command::Gen {
            seed,
            duration,
            dt,
            out: path,
            force,
        } => {
            check_targets(std::slice::from_ref(path), *force)?;
            let s = synth_canyon_scenario(*seed, *duration, *dt)?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                ensure_dir(parent)?;
            }
            write_scenario(&s, path)?;
            out.messages.push(s.hash());
        }
        Command::Run {
            scenario,
            config,
            law,
            out: dir,
            force,
        } => {
            let cfg = load_config(config.as_deref())?;
            let s = load_checked(scenario)?;
            let law = CueingLaw::from(*law);
            check_targets(&run_files(dir, law), *force)?;
            let trace = run(&s, law, &cfg)?;
            ensure_dir(dir)?;
            out.messages.push(write_run(dir, &trace, &cfg)?);
            out.yaw_cap_steps = trace.yaw_cap_flags();
            if out.yaw_cap_steps > 0 {
                out.messages.push(yaw_cap_note(out.yaw_cap_steps, s.dt_s));
            }
        }
        Command::Compare {
            scenario,
            config,
            out: dir,
            force,
        } => {
            let cfg = load_config(config.as_deref())?;
            let s = load_checked(scenario)?;
            let mut targets: Vec<PathBuf> = run_files(dir, CueingLaw::Rm)
                .into_iter()
                .chain(run_files(dir, CueingLaw::Coham))
                .collect();
            for f in [
                "comparison.csv",
                "comparison.txt",
                "onsets.csv",
                "g_peaks.csv",
            ] {
                targets.push(dir.join(f));
            }
            check_targets(&targets, *force)?;

            let (rm, coham) = run_both(&s, &cfg)?;
            ensure_dir(dir)?;
            write_run(dir, &rm, &cfg)?;
            write_run(dir, &coham, &cfg)?;
            let cmp = compare(&analyze(&rm, &cfg.coham)?, &analyze(&coham, &cfg.coham)?)?;
            let summary = cmp.summary();
            write_file(&dir.join("comparison.csv"), &cmp.to_csv())?;
            write_file(&dir.join("comparison.txt"), &summary)?;
            write_file(&dir.join("onsets.csv"), &cmp.onsets_csv())?;
            let hist = g_peak_histogram(&[&rm], ONSET_THRESHOLD_G)?;
            write_file(&dir.join("g_peaks.csv"), &hist.to_csv())?;
            out.messages.push(summary);
            out.yaw_cap_steps = rm.yaw_cap_flags().max(coham.yaw_cap_flags());
            if out.yaw_cap_steps > 0 {
                out.messages.push(yaw_cap_note(out.yaw_cap_steps, s.dt_s));
            }
        }
        Command::Validate { scenario, config } => {
            load_config(config.as_deref())?;
            if let Some(path) = scenario {
                let s = load_checked(path)?;
                out.messages.push(format!(
                    "ok: {} samples, dt {} s, hash {}",
                    s.len(),
                    s.dt_s,
                    s.hash()
                ));
            } else {
                out.messages.push("ok".to_string());
            }
        }
    }
    Ok(out)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            for m in &outcome.messages {
                let _ = writeln!(stdout, "{}", m.trim_end());
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
