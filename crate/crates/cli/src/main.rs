//! `mirrorcut`: data sets for a cavity split by a suddenly inserted mirror.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for runtime errors.

mod commands;
mod config;
mod emit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Experiment, Format, Grid, InitialKind, ObservableKind, ParameterKind, RunConfig};
use mirrorcut::experiments::{DEFAULT_CUTOFF, DEFAULT_HEATMAP_SIZE};
use mirrorcut::LogBase;

const THREADS_VAR: &str = "MIRRORCUT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] mirrorcut::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Config { field: field.into(), message: message.to_string() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "mirrorcut", version, about = "Particle creation and entanglement when a mirror splits a cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Mode cutoff per side.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    lambda: usize,
    /// Cavity length.
    #[arg(long, default_value_t = 2.0)]
    length: f64,
    /// Mirror position as a fraction of the length.
    #[arg(long, default_value = "1/2")]
    mirror: String,
    /// Logarithm base of the negativity: e, 2 or 10.
    #[arg(long, default_value_t = LogBase::E)]
    log_base: LogBase,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Common {
    fn config(self, experiment: Experiment) -> (RunConfig, bool) {
        let mut cfg = RunConfig::new(experiment);
        cfg.lambda = self.lambda;
        cfg.geometry.length = self.length;
        cfg.geometry.mirror = self.mirror;
        cfg.log_base = self.log_base;
        cfg.output = self.out;
        cfg.format = self.format;
        (cfg, self.print_config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Particle ratio of a coherent input against the insertion phase.
    Fig2 {
        #[command(flatten)]
        common: Common,
        /// Excited input mode.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 97)]
        phi_steps: usize,
        /// Output modes per side to report.
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
    /// Phase-averaged particles per output mode as a percentage of the input.
    Fig3 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Coherent amplitude used to normalise the vacuum contribution.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// Entanglement of the lowest pair against initial particle number.
    Fig4 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        max_particles: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
    },
    /// Squeezing needed to restore entanglement at finite temperature.
    Fig5 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0,5,10,15")]
        nbars: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        s_max: f64,
        #[arg(long, default_value_t = 61)]
        s_steps: usize,
        /// Squeezing angle; radians or multiples of pi.
        #[arg(long, default_value = "0", value_parser = config::parse_angle)]
        theta: f64,
        /// Also write the thresholds to this file.
        #[arg(long)]
        thresholds: Option<PathBuf>,
    },
    /// Entanglement between every left/right output pair.
    Fig6 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = InitialKind::Vacuum)]
        state: InitialKind,
        #[arg(long, default_value_t = 0.75)]
        s: f64,
        #[arg(long, default_value = "pi", value_parser = config::parse_angle)]
        theta: f64,
        /// Modes per side.
        #[arg(long, default_value_t = DEFAULT_HEATMAP_SIZE)]
        size: usize,
    },
    /// Vary one parameter of a single-mode input.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ParameterKind::S)]
        param: ParameterKind,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long, default_value_t = 11)]
        count: usize,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Check the uncertainty relation of the transformed vacuum or a state file.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Gaussian state JSON to check instead.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Keep only the lowest modes on each side.
        #[arg(long)]
        modes: Option<usize>,
        /// Write the checked state as JSON.
        #[arg(long)]
        save_state: Option<PathBuf>,
        /// Exit with a runtime error if the state is unphysical.
        #[arg(long)]
        strict: bool,
    },
    /// Observable against the cutoff.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        lambdas: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ObservableKind::VacuumNegativity)]
        observable: ObservableKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value = "0", value_parser = config::parse_angle)]
        phi: f64,
    },
    /// Run from a TOML configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured output file.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        print_config: bool,
    },
}

#[derive(Args)]
struct StateArgs {
    /// Excited input mode.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    nbar: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, default_value = "0", value_parser = config::parse_angle)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value = "0", value_parser = config::parse_angle)]
    phi: f64,
}

impl Command {
    fn into_config(self) -> Result<(RunConfig, bool), CliError> {
        Ok(match self {
            Command::Fig2 { common, k, phi_steps, n_max } => {
                let (mut cfg, print) = common.config(Experiment::Fig2);
                cfg.state.k = k;
                cfg.grids.phi.count = phi_steps;
                cfg.options.n_max = n_max;
                (cfg, print)
            }
            Command::Fig3 { common, k, n_max, rho } => {
                let (mut cfg, print) = common.config(Experiment::Fig3);
                cfg.state.k = k;
                cfg.state.rho = rho;
                cfg.options.n_max = n_max;
                (cfg, print)
            }
            Command::Fig4 { common, max_particles, steps } => {
                let (mut cfg, print) = common.config(Experiment::Fig4);
                cfg.grids.particles = Grid::new(0.0, max_particles, steps);
                (cfg, print)
            }
            Command::Fig5 { common, nbars, s_max, s_steps, theta, thresholds } => {
                let (mut cfg, print) = common.config(Experiment::Fig5);
                cfg.options.nbars = nbars;
                cfg.grids.squeezing = Grid::new(0.0, s_max, s_steps);
                cfg.state.theta = theta;
                cfg.options.thresholds = thresholds;
                (cfg, print)
            }
            Command::Fig6 { common, state, s, theta, size } => {
                let (mut cfg, print) = common.config(Experiment::Fig6);
                cfg.state.initial = state;
                cfg.state.s = s;
                cfg.state.theta = theta;
                cfg.options.size = size;
                (cfg, print)
            }
            Command::Sweep { common, param, start, stop, count, state, n, m } => {
                let (mut cfg, print) = common.config(Experiment::Sweep);
                cfg.options.parameter = param;
                cfg.grids.sweep = Grid::new(start, stop, count);
                cfg.state.k = state.k;
                cfg.state.nbar = state.nbar;
                cfg.state.s = state.s;
                cfg.state.theta = state.theta;
                cfg.state.rho = state.rho;
                cfg.state.phi = state.phi;
                cfg.options.n = n;
                cfg.options.m = m;
                (cfg, print)
            }
            Command::Validate { common, input, modes, save_state, strict } => {
                let (mut cfg, print) = common.config(Experiment::Validate);
                cfg.options.input = input;
                cfg.options.modes = modes;
                cfg.options.save_state = save_state;
                cfg.options.strict = strict;
                (cfg, print)
            }
            Command::Converge { common, lambdas, observable, n, m, k, rho, phi } => {
                let (mut cfg, print) = common.config(Experiment::Converge);
                cfg.options.lambdas = lambdas;
                cfg.options.observable = observable;
                cfg.options.n = n;
                cfg.options.m = m;
                cfg.state.k = k;
                cfg.state.rho = rho;
                cfg.state.phi = phi;
                (cfg, print)
            }
            Command::Run { config, out, format, print_config } => {
                let mut cfg = RunConfig::load(&config)?;
                if out.is_some() {
                    cfg.output = out;
                }
                if let Some(f) = format {
                    cfg.format = f;
                }
                (cfg, print_config)
            }
        })
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::config(THREADS_VAR, format!("expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (cfg, print_config) = cli.command.into_config()?;
    cfg.validate()?;
    if print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }

    let outcome = commands::execute(&cfg)?;
    if let Some(table) = &outcome.table {
        emit::write(table, cfg.format, cfg.output.as_deref())?;
    }
    if let (Some(table), Some(path)) = (&outcome.thresholds, &cfg.options.thresholds) {
        emit::write(table, cfg.format, Some(path))?;
    }
    // Keep stdout clean when it carries the data.
    let data_on_stdout = outcome.table.is_some() && cfg.output.is_none();
    for line in &outcome.summary {
        if data_on_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    match outcome.failure {
        Some(message) => Err(CliError::Internal(message)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
