//! Command-line driver for the parking-match workspace: generate scenarios,
//! run the matchers, sweep sizes and densities, time the matchers, and
//! re-verify stable-matcher output.
//!
//! Exit codes: 0 on success, 2 on any configuration or input error, 3 when
//! `verify` finds a failing check. All output is deterministic for a given
//! flag set apart from the wall-time columns.

use clap::{Args, Parser, Subcommand, ValueEnum};
use parkmatch_core::{
    generate, ingest, metrics_to_csv, run_matchers, summaries_to_csv, sweep_density, sweep_size,
    time_matchers, verify_scenario, ConstraintMode, MatcherKind, RecordsFile, RunError, Scenario,
    ScenarioConfig, ScenarioError, DEFAULT_SLOTS,
};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "parkmatch",
    version,
    about = "Generate, match, sweep, time, and verify two-sided parking assignments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random scenario and emit it as JSON.
    Generate(GenerateArgs),
    /// Run matchers on a scenario or records file and emit per-run metrics.
    Match(MatchArgs),
    /// One metrics row per (size, seed, matcher) at fixed edge density.
    SweepSize(SweepSizeArgs),
    /// One metrics row per (density, seed, matcher) at fixed size.
    SweepDensity(SweepDensityArgs),
    /// Median wall time per matcher across a size sweep.
    Time(TimeArgs),
    /// Re-check the stable matcher's output on a scenario and report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of drivers.
    #[arg(long)]
    drivers: usize,
    /// Number of parking spots.
    #[arg(long)]
    spots: usize,
    /// Fraction of driver-spot pairs that get an edge, in (0, 1].
    #[arg(long, default_value_t = 0.2)]
    eta: f64,
    /// Lower distance bound in km.
    #[arg(long, default_value_t = 0.0)]
    dist_lo: f64,
    /// Upper distance bound in km.
    #[arg(long, default_value_t = 5.0)]
    dist_hi: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time slots per demand/availability vector.
    #[arg(long, default_value_t = DEFAULT_SLOTS)]
    slots: usize,
    /// Sample prices, reputations, and schedules too, keeping only feasible pairs.
    #[arg(long)]
    constrained: bool,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (scenarios are JSON-only).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct MatchArgs {
    /// Scenario JSON (from `generate`) or participant-records JSON.
    input: PathBuf,
    /// Comma-separated subset of mm,greedy,random,km.
    #[arg(long, value_delimiter = ',', default_value = "mm,greedy,random,km", value_parser = parse_matcher)]
    matchers: Vec<MatcherKind>,
    /// First seed; the run covers seeds seed..seed+N.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many consecutive seeds to run.
    #[arg(long, value_name = "N", default_value_t = 1)]
    seeds: usize,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format for the metric rows.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SweepSizeArgs {
    /// Comma-separated square instance sizes (drivers = spots).
    #[arg(long, value_delimiter = ',', default_value = "50,100,150,200,250,300,350,400,450,500")]
    sizes: Vec<usize>,
    /// Fraction of driver-spot pairs that get an edge, in (0, 1].
    #[arg(long, default_value_t = 0.2)]
    eta: f64,
    /// Lower distance bound in km.
    #[arg(long, default_value_t = 0.0)]
    dist_lo: f64,
    /// Upper distance bound in km.
    #[arg(long, default_value_t = 5.0)]
    dist_hi: f64,
    /// First seed; each size runs seeds seed..seed+N.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many consecutive seeds per size.
    #[arg(long, value_name = "N", default_value_t = 30)]
    seeds: usize,
    /// Comma-separated subset of mm,greedy,random,km.
    #[arg(long, value_delimiter = ',', default_value = "mm,greedy,random,km", value_parser = parse_matcher)]
    matchers: Vec<MatcherKind>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format for the metric rows.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepDensityArgs {
    /// Comma-separated edge densities, each in (0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.35,0.5,0.75,1.0")]
    etas: Vec<f64>,
    /// Square instance size (drivers = spots).
    #[arg(long, default_value_t = 250)]
    size: usize,
    /// Lower distance bound in km.
    #[arg(long, default_value_t = 0.0)]
    dist_lo: f64,
    /// Upper distance bound in km.
    #[arg(long, default_value_t = 100.0)]
    dist_hi: f64,
    /// First seed; each density runs seeds seed..seed+N.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many consecutive seeds per density.
    #[arg(long, value_name = "N", default_value_t = 10)]
    seeds: usize,
    /// Comma-separated subset of mm,greedy,random,km.
    #[arg(long, value_delimiter = ',', default_value = "mm,greedy,random,km", value_parser = parse_matcher)]
    matchers: Vec<MatcherKind>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format for the metric rows.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct TimeArgs {
    /// Comma-separated square instance sizes (drivers = spots).
    #[arg(long, value_delimiter = ',', default_value = "100,200,300,400,500")]
    sizes: Vec<usize>,
    /// Fraction of driver-spot pairs that get an edge, in (0, 1].
    #[arg(long, default_value_t = 0.2)]
    eta: f64,
    /// Lower distance bound in km.
    #[arg(long, default_value_t = 0.0)]
    dist_lo: f64,
    /// Upper distance bound in km.
    #[arg(long, default_value_t = 5.0)]
    dist_hi: f64,
    /// First seed; each size runs seeds seed..seed+N.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many consecutive seeds per size (medians are taken over these).
    #[arg(long, value_name = "N", default_value_t = 15)]
    seeds: usize,
    /// Comma-separated subset of mm,greedy,random,km.
    #[arg(long, value_delimiter = ',', default_value = "mm,greedy,random,km", value_parser = parse_matcher)]
    matchers: Vec<MatcherKind>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format for the summary rows.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario JSON (from `generate`) or participant-records JSON.
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (reports are JSON-only).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum CliError {
    Config(String),
    Verification(String),
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn parse_matcher(s: &str) -> Result<MatcherKind, String> {
    s.parse::<MatcherKind>().map_err(|e| e.to_string())
}

/// First occurrence wins; running the same matcher twice adds nothing.
fn dedup(matchers: Vec<MatcherKind>) -> Vec<MatcherKind> {
    let mut out: Vec<MatcherKind> = Vec::with_capacity(matchers.len());
    for m in matchers {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

fn seed_list(first: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| first.wrapping_add(i)).collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn emit(out: Option<&Path>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// Reads either a full scenario file (recognized by its top-level `config`)
/// or a participant-records file, which gets ingested into a scenario.
fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    if value.get("config").is_some() {
        serde_json::from_value::<Scenario>(value)
            .map_err(|e| CliError::Config(format!("{} is not a scenario file: {e}", path.display())))
    } else {
        let records = serde_json::from_value::<RecordsFile>(value).map_err(|e| {
            CliError::Config(format!(
                "{} is neither a scenario nor a records file: {e}",
                path.display()
            ))
        })?;
        Ok(ingest(records)?)
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(CliError::Config(
            "scenarios serialize as JSON; drop --format csv".into(),
        ));
    }
    let config = ScenarioConfig {
        num_drivers: args.drivers,
        num_spots: args.spots,
        edge_fraction: args.eta,
        distance_range: (args.dist_lo, args.dist_hi),
        seed: args.seed,
        slots: args.slots,
        constraint_mode: if args.constrained {
            ConstraintMode::Full
        } else {
            ConstraintMode::EdgesOnly
        },
    };
    let scenario = generate(&config)?;
    emit(args.out.as_deref(), &to_json(&scenario)?)
}

fn cmd_match(args: MatchArgs) -> Result<(), CliError> {
    let scenario = load_scenario(&args.input)?;
    let rows = run_matchers(
        &scenario,
        &dedup(args.matchers),
        &seed_list(args.seed, args.seeds),
    )?;
    let payload = match args.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => metrics_to_csv(&rows),
    };
    emit(args.out.as_deref(), &payload)
}

fn cmd_sweep_size(args: SweepSizeArgs) -> Result<(), CliError> {
    let rows = sweep_size(
        &args.sizes,
        args.eta,
        (args.dist_lo, args.dist_hi),
        &seed_list(args.seed, args.seeds),
        &dedup(args.matchers),
    )?;
    let payload = match args.format {
        Format::Csv => metrics_to_csv(&rows),
        Format::Json => to_json(&rows)?,
    };
    emit(args.out.as_deref(), &payload)
}

fn cmd_sweep_density(args: SweepDensityArgs) -> Result<(), CliError> {
    let rows = sweep_density(
        &args.etas,
        args.size,
        (args.dist_lo, args.dist_hi),
        &seed_list(args.seed, args.seeds),
        &dedup(args.matchers),
    )?;
    let payload = match args.format {
        Format::Csv => metrics_to_csv(&rows),
        Format::Json => to_json(&rows)?,
    };
    emit(args.out.as_deref(), &payload)
}

fn cmd_time(args: TimeArgs) -> Result<(), CliError> {
    let cells = time_matchers(
        &args.sizes,
        args.eta,
        (args.dist_lo, args.dist_hi),
        &seed_list(args.seed, args.seeds),
        &dedup(args.matchers),
    )?;
    let payload = match args.format {
        Format::Csv => summaries_to_csv(&cells),
        Format::Json => to_json(&cells)?,
    };
    emit(args.out.as_deref(), &payload)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(CliError::Config(
            "verification reports serialize as JSON; drop --format csv".into(),
        ));
    }
    let scenario = load_scenario(&args.input)?;
    let outcome = verify_scenario(&scenario)?;
    emit(args.out.as_deref(), &to_json(&outcome)?)?;
    if outcome.passed() {
        Ok(())
    } else {
        let failing: Vec<&str> = outcome
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(CliError::Verification(format!(
            "failing checks: {}",
            failing.join(", ")
        )))
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Match(args) => cmd_match(args),
        Command::SweepSize(args) => cmd_sweep_size(args),
        Command::SweepDensity(args) => cmd_sweep_density(args),
        Command::Time(args) => cmd_time(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(3)
        }
    }
}
