use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use logent::theorems::SampleFamily;
use logent::TheoremId;
use logent_cli::commands::{self, CheckOptions, EntropyOptions, SearchOptions};
use logent_cli::{CliError, Context, Outcome, Selector, DEFAULT_MAX_DIM};

/// Logical entropy and divergence of density matrices.
#[derive(Debug, Parser)]
#[command(name = "logent", version)]
struct Cli {
    /// Print the full report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    /// Largest matrix dimension accepted from files.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Logical entropy of a state, optionally with related measures.
    Entropy {
        state: PathBuf,
        /// Also report tr ρ².
        #[arg(long)]
        purity: bool,
        /// Also report the von Neumann entropy (natural log).
        #[arg(long)]
        von_neumann: bool,
        /// Also report the Tsallis entropy of index q.
        #[arg(long, value_name = "Q")]
        tsallis: Option<f64>,
        /// Also report the eigenvalues.
        #[arg(long)]
        spectrum: bool,
        /// Also report L of both marginals (needs a split in the file).
        #[arg(long)]
        marginals: bool,
        /// Purity, von Neumann entropy, spectrum, and marginals when a split is present.
        #[arg(long)]
        all: bool,
    },
    /// Logical divergence d(ρ‖σ) and its three terms.
    Divergence { rho: PathBuf, sigma: PathBuf },
    /// Randomized checks of the logical-entropy inequalities.
    Check {
        /// Theorem name (e.g. klein, product-formula) or "all".
        #[arg(value_parser = parse_selector)]
        theorem: Selector,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated dimensions, e.g. 2,4 or 2x2,2x3.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Recompute the slack of one check trial.
    Replay {
        #[arg(value_parser = parse_theorem)]
        theorem: TheoremId,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trial: usize,
        #[arg(long)]
        dims: String,
    },
    /// Write a random density matrix of the given rank.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace the B part of a split-tagged state by I/b using the Weyl twirl.
    Twirl {
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a projective measurement read from a projector file.
    Measure {
        state: PathBuf,
        projectors: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for states whose joint logical entropy exceeds the sum of the marginals.
    SearchSubadditivity {
        #[arg(long, value_enum, default_value_t = Family::Generic)]
        family: Family,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Generic,
    Product,
    ProductDiagonal,
}

impl From<Family> for SampleFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Generic => SampleFamily::Generic,
            Family::Product => SampleFamily::Product,
            Family::ProductDiagonal => SampleFamily::ProductDiagonal,
        }
    }
}

fn parse_selector(s: &str) -> Result<Selector, String> {
    s.parse::<Selector>()
        .map_err(|e| format!("{e} (or \"all\")"))
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse::<TheoremId>().map_err(|e| e.to_string())
}

fn run(cli: Cli, ctx: &Context) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Entropy {
            state,
            purity,
            von_neumann,
            tsallis,
            spectrum,
            marginals,
            all,
        } => {
            let mut opts = EntropyOptions {
                purity,
                von_neumann,
                tsallis,
                spectrum,
                marginals,
            };
            if all {
                let marginals = marginals
                    || logent_cli::parse_matrix_file(&state, ctx.max_dim)
                        .map(|f| f.split.is_some())
                        .unwrap_or(false);
                opts = EntropyOptions {
                    tsallis,
                    marginals,
                    ..EntropyOptions::all()
                };
            }
            commands::entropy(ctx, &state, &opts)
        }
        Command::Divergence { rho, sigma } => commands::divergence(ctx, &rho, &sigma),
        Command::Check {
            theorem,
            trials,
            seed,
            dims,
            tol,
        } => commands::check(
            ctx,
            &CheckOptions {
                selector: theorem,
                trials,
                seed,
                dims,
                tolerance: tol,
            },
        ),
        Command::Replay {
            theorem,
            seed,
            trial,
            dims,
        } => commands::replay_trial(ctx, theorem, seed, trial, &dims),
        Command::Random {
            dim,
            rank,
            seed,
            out,
        } => commands::random(ctx, dim, rank, seed, &out),
        Command::Twirl { state, out } => commands::twirl(ctx, &state, &out),
        Command::Measure {
            state,
            projectors,
            out,
        } => commands::measure_state(ctx, &state, &projectors, out.as_ref()),
        Command::SearchSubadditivity {
            family,
            trials,
            seed,
            dims,
            tol,
        } => commands::search_subadditivity(
            ctx,
            &SearchOptions {
                family: family.into(),
                trials,
                seed,
                dims,
                tolerance: tol,
            },
        ),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let json = cli.json;
    let ctx = Context {
        argv,
        max_dim: cli.max_dim,
    };
    let start = Instant::now();
    match run(cli, &ctx) {
        Ok(mut outcome) => {
            outcome.report.timing.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            if json {
                println!("{}", outcome.report.to_json());
            } else {
                print!("{}", outcome.table);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
