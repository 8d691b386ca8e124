//! `wavecone`: command-line front end for the symbol invariants and grid experiments.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "wavecone", version, about = "Dimension bounds for measures under first-order linear PDE constraints")]
struct Cli {
    /// Report format on standard output
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Leave wall-clock timings out of the report (makes reruns byte-identical)
    #[arg(long, global = true)]
    no_timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Certified minimal symbol rank ℓ of an operator
    Ell {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        height: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the bare certificate JSON here
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Wave-cone membership of a polar vector
    Member {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated rationals such as "1,0,-1/2", or a JSON file holding an array of them
        #[arg(short, long, allow_hyphen_values = true)]
        e: String,
    },
    /// Emit a gallery operator as JSON
    Gallery {
        #[command(subcommand)]
        which: GalleryOp,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Build the sharp measure e·H^ℓ⌞V on a grid
    Sharp {
        #[arg(short, long)]
        input: PathBuf,
        /// Certificate JSON, or a report from `wavecone ell`
        #[arg(long)]
        cert: PathBuf,
        #[arg(short, default_value_t = 128)]
        n: usize,
        /// Cell width; defaults to 2/n (domain [−1, 1]^d)
        #[arg(long)]
        h: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Weak-form residual |⟨P(D)μ, φ⟩| over the seeded bump family
    Residual {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Box-counting dimension and detected invariance of a grid measure
    DimEstimate {
        #[arg(short, long)]
        measure: PathBuf,
        /// Number of dyadic scales; defaults to min(6, log₂ n)
        #[arg(long)]
        scales: Option<usize>,
        #[arg(long, default_value_t = wavecone::measure::DEFAULT_MASS_THRESHOLD)]
        threshold: f64,
        /// Invariance tolerance; pass 0 to skip detection
        #[arg(long, default_value_t = 0.05)]
        invariance_tol: f64,
    },
    /// Per-cell wave-cone mask and invariance-dimension map
    Mask {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// ell → sharp measure → residual → invariance → box dimension, with checks
    Pipeline {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the sharp measure in this directory
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Annihilator bounds and simplicity checks for all 1 ≤ m ≤ d ≤ dmax
    VerifyAppendix {
        #[arg(long, default_value_t = 5)]
        dmax: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum GalleryOp {
    Curl {
        #[arg(short, long)]
        d: usize,
        #[arg(short, long)]
        m: usize,
    },
    Div {
        #[arg(short, long)]
        k: usize,
        #[arg(short, long)]
        d: usize,
    },
    Ext {
        #[arg(short, long)]
        d: usize,
        #[arg(short, long)]
        m: usize,
    },
    Boundary {
        #[arg(short, long)]
        d: usize,
        #[arg(short, long)]
        m: usize,
    },
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("WAVECONE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("WAVECONE_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let timed = !cli.no_timings;
    let outcome = match cli.command {
        Command::Gallery { which, output } => return commands::gallery(which, output.as_deref()),
        Command::Ell {
            input,
            height,
            samples,
            restarts,
            seed,
            output,
        } => commands::ell(&input, height, samples, restarts, seed, output.as_deref(), timed),
        Command::Member { input, e } => commands::member(&input, &e, timed),
        Command::Sharp {
            input,
            cert,
            n,
            h,
            output,
        } => commands::sharp(&input, &cert, n, h, &output, timed),
        Command::Residual { input, measure, seed } => commands::residual(&input, &measure, seed, timed),
        Command::DimEstimate {
            measure,
            scales,
            threshold,
            invariance_tol,
        } => commands::dim_estimate(&measure, scales, threshold, invariance_tol, timed),
        Command::Mask { input, measure, output } => commands::mask(&input, &measure, &output, timed),
        Command::Pipeline { input, n, seed, output } => commands::pipeline(&input, n, seed, output.as_deref(), timed),
        Command::VerifyAppendix { dmax, samples, seed } => commands::verify_appendix(dmax, samples, seed, timed),
    }?;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.report)? + "\n",
        Format::Table => report::render_table(&outcome.report),
    };
    match &cli.report {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let Some(msg) = outcome.failure {
        eprintln!("warning: {msg}");
    }
    Ok(())
}
