use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod parse;

const TABLE1_HELP: &str = "\
Rows, top to bottom (B = Bloch-ball mixed state, P = pure, X = I/2):
   1 BBBB   2 BBBP   3 BPBP   4 BBPP   5 BPPP   6 BBBX
   7 BBPX   8 BPBX   9 BPPX  10 PPBX  11 PPPX
Slots are in the order (ρ, ζ), (ξ, η).";

/// NMuTP experiments: trace-distance non-monotonicity under tensor squares.
#[derive(Parser, Debug)]
#[command(name = "nmutp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output directory.
    #[arg(long, global = true, env = "NMUTP_OUT_DIR", default_value = "nmutp-out")]
    out: PathBuf,

    /// JSON file with experiment settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed. A random one is generated and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    streams: Option<usize>,

    /// Leave the wall-clock runtime out of JSON summaries.
    #[arg(long, global = true)]
    no_runtime: bool,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// NMuTP percentage and strength for the qubit case studies.
    #[command(after_help = TABLE1_HELP)]
    Table1 {
        /// `all`, or rows such as `1,7,11` or `1-5`.
        #[arg(long, default_value = "all")]
        rows: String,
        /// Quartets per row.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Flagged fraction of spectral quartets against dimension.
    Sweep {
        /// `2:6`, `2,3,5` or a single dimension [default: 2:6].
        #[arg(long)]
        dims: Option<String>,
        /// Quartets per repetition at every dimension (default 100000 for d ≤ 5, 20000 above).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        reps: Option<u16>,
        /// Spectrum measure: `angles` (uniform simplex angles) or `flat` (uniform on the simplex).
        #[arg(long)]
        spectrum: Option<String>,
        /// Haar construction: `hurwitz` or `qr`.
        #[arg(long)]
        haar: Option<String>,
    },
    /// Histogram of d(x, y) over random pairs.
    Hist {
        /// Two slot classes, e.g. `ball,ball`, `ball,pure`, `pure,pure`.
        #[arg(long, default_value = "ball,ball")]
        pair: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of pairs.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Strength of flagged quartets with the ⟨G⟩ ± ΔG band.
    Strength {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        n: Option<u64>,
        /// Keep at most this many samples.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Evaluate quartets and write one NDJSON record per quartet.
    Scan {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Compare numeric trace distances with closed forms.
    Validate {
        /// Collinear and pure pairs at d = 2.
        #[arg(long, default_value_t = 100_000)]
        n_qubit: u64,
        /// Pure pairs at each d = 3..=d-max.
        #[arg(long, default_value_t = 10_000)]
        n_qudit: u64,
        #[arg(long, default_value_t = 8)]
        d_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Search for a flagged quartet with given distances (d1, d2, dt1, dt2).
    FindExample {
        #[command(flatten)]
        case: CaseArgs,
        /// Four comma-separated distances.
        #[arg(long)]
        target: String,
        /// Max-norm tolerance on the four distances.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 10_000_000)]
        max_draws: u64,
    },
    /// Draw random states and print them.
    Sample {
        /// `ball`, `spectral`, `pure` or `max-mixed`.
        #[arg(long, default_value = "ball")]
        kind: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long)]
        haar: Option<String>,
    },
}

/// Case selection: a table row, or explicit slot classes and dimension.
#[derive(Args, Debug, Clone)]
struct CaseArgs {
    /// Qubit case study 1..=11 (see `table1 --help`).
    #[arg(long, conflicts_with = "slots")]
    row: Option<usize>,
    /// Four slot classes, e.g. `spectral,spectral,spectral,spectral`.
    #[arg(long)]
    slots: Option<String>,
    #[arg(long, requires = "slots")]
    dim: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.common.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match commands::run(cli.command, &cli.common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
