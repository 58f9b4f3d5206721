use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jensen_gap::bounds::CHAIN_CATALOG;
use jensen_gap::functional::FamilyTag;
use jensen_gap::harness::{
    replay, run_campaign_with, CampaignConfig, WindowPolicy, EXIT_CONFIG, SEED_ENV,
};
use jensen_gap::registry::{DEFAULT_SELECTORS, SELECTOR_SYNTAX};
use jensen_gap::Error;

#[derive(Parser)]
#[command(name = "jensen-gap", version, about = "Fuzz Jensen-type operator inequality chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded campaign over every chain.
    Verify(VerifyArgs),
    /// Evaluate every chain on an instance file.
    Replay { path: PathBuf },
    /// List chain identifiers.
    ListChains,
    /// List function selectors.
    ListFunctions,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Function selectors; repeat or separate with commas.
    #[arg(long = "function", value_delimiter = ',', default_values_t = DEFAULT_SELECTORS.map(String::from))]
    functions: Vec<String>,
    /// Functional families: trace, vector, weights, mixture.
    #[arg(long = "functional", value_delimiter = ',', default_values = ["trace", "vector", "weights", "mixture"])]
    functionals: Vec<FamilyTag>,
    #[arg(long = "dim", value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
    dims: Vec<usize>,
    /// Trials per (function, functional, dimension) combination.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Fixed window lower end; requires --M.
    #[arg(long)]
    m: Option<f64>,
    /// Fixed window upper end; requires --m.
    #[arg(long = "M")]
    big_m: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// margin, exact-hull or fixed.
    #[arg(long, default_value = "margin")]
    window_policy: String,
    /// Relative chain tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write per-chain rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn config(args: &VerifyArgs) -> Result<CampaignConfig, Error> {
    let window_policy = match (args.window_policy.as_str(), args.m, args.big_m) {
        ("fixed", Some(m), Some(big_m)) | ("margin", Some(m), Some(big_m)) => WindowPolicy::Fixed { m, big_m },
        (_, Some(_), None) | (_, None, Some(_)) => {
            return Err(Error::InvalidConfig("--m and --M must be given together".into()))
        }
        (p, _, _) => p.parse()?,
    };
    CampaignConfig {
        seed: args.seed,
        trials: args.trials,
        dims: args.dims.clone(),
        functions: args.functions.clone(),
        functionals: args.functionals.clone(),
        window_policy,
        tolerance: args.tol,
    }
    .with_env_seed()
}

fn verify(args: &VerifyArgs) -> Result<i32, Error> {
    let cfg = config(args)?;
    cfg.validate()?;
    let mut writer = match &args.csv {
        Some(path) => Some(csv::Writer::from_path(path).map_err(csv_error)?),
        None => None,
    };
    let mut csv_failure = None;
    let report = run_campaign_with(&cfg, |row| {
        if let Some(w) = writer.as_mut() {
            if csv_failure.is_none() {
                csv_failure = w.serialize(row).err();
            }
        }
    })?;
    if let Some(e) = csv_failure {
        return Err(csv_error(e));
    }
    if let Some(mut w) = writer {
        w.flush()?;
    }
    let json = report.to_json()?;
    match &args.report {
        Some(path) => {
            let mut f = File::create(path)?;
            writeln!(f, "{json}")?;
        }
        None => println!("{json}"),
    }
    for (id, s) in &report.chains {
        eprintln!(
            "{id:<30} verified {:>9}  violated {:>6}  condition_not_met {:>9}",
            s.verified, s.violated, s.condition_not_met
        );
    }
    eprintln!(
        "{} instances, {} violations, {:.1}s",
        report.instances,
        report.violation_count(),
        report.wall_time_seconds
    );
    Ok(report.exit_code())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Verify(args) => verify(&args),
        Command::Replay { path } => {
            let outcome = replay(&path)?;
            for chain in &outcome.chains {
                println!("{}", serde_json::to_string(chain)?);
            }
            Ok(outcome.exit_code())
        }
        Command::ListChains => {
            for (id, what) in CHAIN_CATALOG {
                println!("{id:<20} {what}");
            }
            Ok(0)
        }
        Command::ListFunctions => {
            for (syntax, what) in SELECTOR_SYNTAX {
                println!("{syntax:<14} {what}");
            }
            println!("\ndefaults: {}", DEFAULT_SELECTORS.join(", "));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if std::env::var_os(SEED_ENV).is_some() {
                eprintln!("note: {SEED_ENV} is set");
            }
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
