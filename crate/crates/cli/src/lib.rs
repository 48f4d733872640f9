//! Command-line front end: coefficient tables, capacity sweeps, trade-off
//! curves and a self-check, all emitted as CSV or plain reports.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod format;
pub mod reference;
pub mod scheme;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bicm_core::{ChannelModel, EvalMethod};

/// Reasons a command stops, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input files (exit code 2).
    Usage(String),
    /// Evaluation or I/O errors (exit code 1).
    Runtime(String),
    /// `verify` ran but some checks failed (exit code 1).
    Checks { failed: usize, total: usize },
    /// Help, version or parse errors from the argument parser.
    Clap(clap::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) | Failure::Checks { .. } => 1,
            Failure::Clap(e) => e.exit_code(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
            Failure::Checks { failed, total } => write!(f, "{failed} of {total} checks failed"),
            Failure::Clap(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<bicm_core::Error> for Failure {
    fn from(e: bicm_core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Evaluation method as given on the command line; the seed is attached later.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Quadrature(usize),
    MonteCarlo(u64),
}

impl MethodSpec {
    pub fn with_seed(self, seed: u64) -> EvalMethod {
        match self {
            MethodSpec::Quadrature(order) => EvalMethod::Quadrature {
                order,
                fading_order: bicm_core::capacity::DEFAULT_FADING_ORDER,
            },
            MethodSpec::MonteCarlo(samples) => EvalMethod::MonteCarlo { samples, seed },
        }
    }
}

fn parse_method(s: &str) -> Result<MethodSpec, String> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| format!("expected quad:<order> or mc:<samples>, got '{s}'"))?;
    let spec = match kind {
        "quad" => MethodSpec::Quadrature(
            value
                .parse()
                .map_err(|_| format!("bad quadrature order '{value}'"))?,
        ),
        "mc" => MethodSpec::MonteCarlo(
            value
                .parse()
                .map_err(|_| format!("bad sample count '{value}'"))?,
        ),
        _ => return Err(format!("unknown method '{kind}' (expected quad or mc)")),
    };
    spec.with_seed(0).validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn parse_channel(s: &str) -> Result<ChannelModel, String> {
    s.parse().map_err(|e: bicm_core::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "bicm",
    version,
    about = "CM/BICM capacities, low-SNR expansions and power-bandwidth trade-offs"
)]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SharedArgs {
    /// Channel: awgn or nakagami:<nu>.
    #[arg(long, global = true, default_value = "awgn", value_parser = parse_channel)]
    pub channel: ChannelModel,
    /// Capacity evaluation: quad:<order> or mc:<samples>.
    #[arg(long, global = true, default_value = "quad:32", value_parser = parse_method)]
    pub method: MethodSpec,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl SharedArgs {
    pub fn eval_method(&self) -> EvalMethod {
        self.method.with_seed(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Snr,
    Ebno,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TradeoffMode {
    Approx,
    Exact,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// Acceptance tolerances.
    Strict,
    /// Half a unit in the last printed digit.
    Printed,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Low-SNR coefficients and wideband figures (default: the six reference schemes).
    Coeffs {
        /// Selectors such as `qpsk:gray`, `8psk sp` or `file.json`.
        schemes: Vec<String>,
    },
    /// Capacity curves over an SNR grid.
    Sweep {
        /// One selector.
        #[arg(required = true)]
        scheme: Vec<String>,
        /// Abscissa printed in the first column.
        #[arg(long, value_enum, default_value = "snr")]
        axis: Axis,
        /// First SNR in dB.
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        start: f64,
        /// Last SNR in dB.
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        stop: f64,
        /// SNR step in dB.
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Bandwidth ratio needed by an alternative scheme over a grid of power ratios.
    Tradeoff {
        /// Baseline and alternative selectors.
        #[arg(required = true)]
        schemes: Vec<String>,
        /// Baseline SNR in dB.
        #[arg(long, default_value_t = -18.0, allow_negative_numbers = true)]
        snr1_db: f64,
        /// First power ratio in dB.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        start: f64,
        /// Last power ratio in dB.
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        stop: f64,
        /// Power ratio step in dB.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, value_enum, default_value = "both")]
        mode: TradeoffMode,
    },
    /// Self-check against the reference table and internal identities.
    Verify {
        #[arg(long, value_enum, default_value = "strict")]
        profile: Profile,
        /// Replace a reference scheme, e.g. `16qam:sp=my.json`.
        #[arg(long)]
        replace: Vec<String>,
    },
}

/// Parses `args` (including the program name) and runs the command. Output
/// goes to `--out` when given, otherwise to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(Failure::Clap)?;
    let (text, outcome) = match cli.shared.threads {
        Some(0) => return Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Runtime(e.to_string()))?
            .install(|| commands::dispatch(&cli))?,
        None => commands::dispatch(&cli)?,
    };
    match &cli.shared.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Runtime(e.to_string()))?,
    }
    outcome
}
