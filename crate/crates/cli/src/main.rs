use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Multipartite Bell-correlation toolkit: predictions, scans, local bounds
/// and optimal settings for generalized GHZ states.
#[derive(Debug, Parser)]
#[command(name = "gbell", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, env = "GBELL_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// State `α|0…0⟩ + β|1…1⟩`; defaults to `α = β = 1/√2`.
#[derive(Debug, Clone, Args)]
struct StateArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2, allow_negative_numbers = true)]
    alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2, allow_negative_numbers = true)]
    beta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_im: f64,
    /// Rescale α and β to unit norm instead of rejecting them.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Statevector,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum prediction Σ|q| for a settings file.
    Predict {
        /// JSON settings file.
        #[arg(long)]
        settings: PathBuf,
        /// Expected number of sites; checked against the file.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        /// Read the file's angles as degrees.
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Two-angle grid scan: sites 1..l use (0, θ1), the rest (θ2, -θ2).
    Scan {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta1_lo: f64,
        /// Default π/2 (90 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        theta1_hi: Option<f64>,
        #[arg(long, default_value_t = 181)]
        steps1: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta2_lo: f64,
        /// Default π/2 (90 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        theta2_hi: Option<f64>,
        #[arg(long, default_value_t = 91)]
        steps2: usize,
        /// Output file; the table goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Range bounds are in degrees.
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        state: StateArgs,
    },
    /// One row of the two-angle surface at fixed θ1.
    Slice {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        l: usize,
        /// Default π/2 (90 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        theta1: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta2_lo: f64,
        /// Default π/2 (90 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        theta2_hi: Option<f64>,
        #[arg(long, default_value_t = 91)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Checks Σ|c| = 1 on every deterministic local strategy.
    VerifyLhv {
        #[arg(long)]
        n: usize,
        /// Check this many random strategies instead of all 4^n.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest n enumerated exhaustively.
        #[arg(long, default_value_t = gbell::lhv::DEFAULT_MAX_ENUMERATION_N)]
        max_n: usize,
    },
    /// Whether the state can beat the local bound under optimal settings.
    Criterion {
        #[arg(long)]
        n: usize,
        /// Use the real state cos ξ|0…0⟩ + sin ξ|1…1⟩ instead of α, β.
        #[arg(long, allow_negative_numbers = true)]
        xi: Option<f64>,
        /// ξ is in degrees.
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Canonical optimal settings and the maximal prediction.
    Optimal {
        #[arg(long)]
        n: usize,
        /// Also evaluate via the statevector and a multi-start search.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the settings as a JSON settings file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Randomized cross-checks between independent computation paths.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases per check.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Largest number of sites used in statevector checks.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
