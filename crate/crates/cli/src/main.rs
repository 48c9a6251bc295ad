//! `aperion`: runs the verifications and prints a report.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! invalid arguments or configuration.

mod cache;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Context, TableKind, UsageError};
use config::{OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "aperion",
    version,
    about = "High-precision checks of an Apery-limit / Mahler-measure identity"
)]
struct Cli {
    /// Target precision P in bits.
    #[arg(long, global = true, default_value_t = 256)]
    bits: u32,
    /// Last recurrence index.
    #[arg(long, global = true, default_value_t = 60)]
    nmax: u32,
    /// Outer quadrature nodes N (a power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    nodes: usize,
    /// Number of explicit terms in each telescoped sum.
    #[arg(long, global = true, default_value_t = 20_000)]
    budget: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Compute every constant from scratch and leave the cache untouched.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, default_value = ".aperion-cache")]
    cache_dir: PathBuf,
    /// Recompute cached constants and fail if a cached value differs.
    #[arg(long, global = true)]
    verify_cache: bool,
    /// Directory holding recurrence.json and corpus.json; the built-in copies
    /// are used when absent.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apery limit, L(chi_-8, 2) and the Mahler side agree pairwise.
    VerifyMainTheorem,
    /// Iterate the recurrence, estimate the limit and check growth rates.
    Apery,
    /// Trigamma identity tables.
    Table {
        #[arg(value_enum, default_value = "all")]
        which: TableKind,
        /// Run a single identity by id.
        #[arg(long)]
        only: Option<String>,
        /// Check the gamma = 1/2 identities with their offsets as printed.
        #[arg(long)]
        printed: bool,
    },
    /// Mahler measures of the corpus polynomials against their L-value forms.
    Mahler {
        /// Corpus tag, or `all`.
        #[arg(default_value = "all")]
        selector: String,
    },
    /// L(chi_D, 2) and L'(chi_D, -1) for a negative fundamental discriminant.
    Lvalue {
        #[arg(allow_hyphen_values = true)]
        discriminant: i64,
    },
    /// psi1(x) for a positive rational x, with consistency checks.
    Trigamma {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Compare telescoped kernel sums with q_n L - p_n.
    Telescope {
        /// Largest n to check.
        #[arg(long, default_value_t = 5)]
        upto: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        bits: cli.bits,
        n_max: cli.nmax,
        nodes: cli.nodes,
        budget: cli.budget,
        format: if cli.json {
            OutputFormat::Json
        } else {
            OutputFormat::Text
        },
        cache_dir: (!cli.no_cache).then(|| cli.cache_dir.clone()),
        verify_cache: cli.verify_cache && !cli.no_cache,
        data_dir: cli.data_dir.clone(),
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let ctx = Context::new(cfg);
    let start = Instant::now();
    let result: Result<report::Report, UsageError> = match &cli.command {
        Command::VerifyMainTheorem => Ok(commands::verify_main_theorem(&ctx)),
        Command::Apery => Ok(commands::apery(&ctx)),
        Command::Table {
            which,
            only,
            printed,
        } => commands::table(&ctx, *which, only.as_deref(), *printed),
        Command::Mahler { selector } => commands::mahler(&ctx, selector),
        Command::Lvalue { discriminant } => commands::lvalue(&ctx, *discriminant),
        Command::Trigamma { x } => commands::trigamma_cmd(&ctx, x),
        Command::Telescope { upto } => Ok(commands::telescope_cmd(&ctx, *upto)),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    ctx.close(&mut report);
    report.finish(start.elapsed());
    match ctx.cfg.format {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Text => print!("{}", report.to_text()),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
