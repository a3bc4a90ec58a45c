//! `ots`: build, solve, and audit transmission-switching models.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 a solver cap fired.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ots_cli::{
    format_summary, run, summarize, verify_connectedness_oracles, write_fixture, ExperimentSpec,
    HarnessError,
};
use ots_core::{load_case, ModelVariant, NisStrategy, SolverOptions};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_DATA: i32 = 2;
const EXIT_SOLVER_CAP: i32 = 3;

#[derive(Parser)]
#[command(
    name = "ots",
    version,
    about = "Transmission switching with exact connectedness constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Case file (JSON, schema version 1).
    #[arg(long)]
    case: PathBuf,
    /// Comma-separated model variants (M1..M4, N1..N4).
    #[arg(long, value_delimiter = ',', default_value = "M1,M2,M3,M4")]
    variants: Vec<String>,
    /// Comma-separated switchable-line fractions in (0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.4,0.5,0.6,0.7")]
    alphas: Vec<f64>,
    /// Switchable-line configurations per alpha.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Experiment seed; per-sample seeds derive deterministically from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Wall-clock cap per solve, in seconds.
    #[arg(long)]
    solver_time_cap: Option<f64>,
    /// Override the connectedness big-M constant.
    #[arg(long)]
    big_m: Option<f64>,
    /// Pivot bus for the canonical injection vector.
    #[arg(long, default_value_t = 1)]
    pivot: usize,
    /// Directory to export each assembled model as an LP file.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    /// Unbalanced-NIS search strategy: exhaustive | seeded.
    #[arg(long, default_value = "exhaustive")]
    strategy: String,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep model variants over sampled switchable-line configurations.
    Run(Box<RunArgs>),
    /// Aggregate a sweep CSV per (variant, alpha).
    Summarize {
        /// CSV produced by `ots run`.
        csv: PathBuf,
    },
    /// Write a bundled case file (fig1, cycle3, bridge2, nis-demo).
    Fixture {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the connectedness block, the potential equation, and
    /// union-find over the case's topologies.
    Verify {
        #[arg(long)]
        case: PathBuf,
        /// Sweep all 2^|E| topologies instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Sampled topologies when not exhaustive.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        pivot: usize,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}

fn classify(error: &HarnessError) -> i32 {
    match error {
        HarnessError::BadSpec(_) | HarnessError::UnknownFixture(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn dispatch(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Run(args) => run_command(*args),
        Command::Summarize { csv } => {
            let file = File::open(&csv)?;
            let rows = summarize(file)?;
            print!("{}", format_summary(&rows));
            Ok(EXIT_OK)
        }
        Command::Fixture { name, out } => {
            write_fixture(&name, &out)?;
            eprintln!("wrote fixture {name} to {}", out.display());
            Ok(EXIT_OK)
        }
        Command::Verify { case, exhaustive, samples, seed, pivot } => {
            let network = load_case(&case)?;
            let report = verify_connectedness_oracles(&network, exhaustive, samples, seed, pivot)?;
            println!(
                "verified {}: {} topologies, {} connected, {} block mismatches, {} potential mismatches",
                network.name,
                report.topologies,
                report.connected,
                report.block_mismatches,
                report.potential_mismatches
            );
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_DATA })
        }
    }
}

fn run_command(args: RunArgs) -> Result<i32, HarnessError> {
    let variants = args
        .variants
        .iter()
        .map(|s| s.parse::<ModelVariant>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(HarnessError::BadSpec)?;
    let strategy = args
        .strategy
        .parse::<NisStrategy>()
        .map_err(HarnessError::BadSpec)?;
    let network = load_case(&args.case)?;
    if let Some(dir) = &args.export_lp {
        std::fs::create_dir_all(dir)?;
    }
    let spec = ExperimentSpec {
        variants,
        alphas: args.alphas,
        samples: args.samples,
        seed: args.seed,
        solver: SolverOptions { time_cap: args.solver_time_cap, ..Default::default() },
        pivot: args.pivot,
        big_m_override: args.big_m,
        strategy,
        export_lp_dir: args.export_lp,
    };
    let file = File::create(&args.out)?;
    let mut writer = BufWriter::new(file);
    let records = run(&network, &spec, &mut writer)?;
    writer.flush()?;
    eprintln!("wrote {} records to {}", records.len(), args.out.display());
    if records.iter().any(|r| r.status == "CapHit") {
        return Ok(EXIT_SOLVER_CAP);
    }
    Ok(EXIT_OK)
}
