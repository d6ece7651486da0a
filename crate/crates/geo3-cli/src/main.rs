//! Command-line front end for the verification engine.
//!
//! Exit codes: 0 when every graded expectation holds, 1 when a check fails
//! or a verdict cannot be reached, 2 for usage errors (unknown ids, bad
//! flags, unwritable output paths).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use geo3::spaces::catalog;
use geo3::verify::{
    emit_report, run_check, run_sweep, run_tables, OutputFormat, RunConfig, RunOutcome, Tolerances,
    DEFAULT_POINTS, DEFAULT_SEED,
};
use geo3::{GeoError, SpecParams};

#[derive(Parser)]
#[command(
    name = "geo3",
    version,
    about = "Verifies harmonicity and curvature identities of submersions from 3-dimensional geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog of example maps.
    List,
    /// Verify one catalog map against its declared expectations.
    Check(RunArgs),
    /// Grade a parameter grid of the projection family (--m/--l) or the
    /// fibration family (--eps).
    Sweep(RunArgs),
    /// Compare model-space connection and curvature tables against their
    /// closed forms.
    Tables(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Catalog map id (see `geo3 list`).
    #[arg(long)]
    map: Option<String>,

    /// Space family for `tables`: all, bcv, or berger.
    #[arg(long)]
    space: Option<String>,

    /// Curvature parameter m; a comma-separated list spans a grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    m: Vec<f64>,

    /// Torsion parameter l; a comma-separated list spans a grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    l: Vec<f64>,

    /// Squashing parameter eps; a comma-separated list spans a grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eps: Vec<f64>,

    /// Sample points per map or grid cell.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,

    /// RNG seed; falls back to GEO3_SEED, then to the built-in default.
    #[arg(long)]
    seed: Option<u64>,

    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worst tension scalar still counted as harmonic.
    #[arg(long)]
    tol_harmonic: Option<f64>,

    /// Bound on the curvature identities and on |K^N - expected|.
    #[arg(long)]
    tol_identity: Option<f64>,

    /// Bound on the closed-form table comparisons.
    #[arg(long)]
    tol_curvature: Option<f64>,

    /// Relative bound on the finite-difference cross-check.
    #[arg(long)]
    tol_oracle: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => list(),
        Command::Check(args) => dispatch("check", &args, run_check),
        Command::Sweep(args) => dispatch("sweep", &args, run_sweep),
        Command::Tables(args) => dispatch("tables", &args, run_tables),
    };
    std::process::exit(code);
}

fn exit_code(err: &GeoError) -> i32 {
    if err.is_usage() {
        2
    } else {
        1
    }
}

fn list() -> i32 {
    match catalog() {
        Ok(entries) => {
            for spec in entries {
                let params = match spec.params() {
                    SpecParams::Bcv { m, l } => format!("  [m={m}, l={l}]"),
                    SpecParams::Berger { eps } => format!("  [eps={eps}]"),
                    SpecParams::Fixed => String::new(),
                };
                println!("{:<16}  {}{params}", spec.id(), spec.description());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(name: &str, args: &RunArgs, run: fn(&RunConfig) -> geo3::Result<RunOutcome>) -> i32 {
    let config = match to_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(outcome) => report(name, &config, &outcome),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn report(name: &str, config: &RunConfig, outcome: &RunOutcome) -> i32 {
    let text = match emit_report(outcome) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Some(path) = &config.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write `{path}`: {e}");
            return 2;
        }
    } else {
        print!("{text}");
    }
    let target = config
        .map
        .as_deref()
        .or(config.space.as_deref())
        .unwrap_or("default grid");
    // Wall time goes to stderr only, so the report bytes stay reproducible.
    eprintln!(
        "{name} {target}: {} ({} points, seed {}, {:.0} ms)",
        if outcome.pass() { "ok" } else { "FAILED" },
        config.points,
        config.seed,
        outcome.wall_ms
    );
    if outcome.pass() {
        0
    } else {
        1
    }
}

fn to_config(args: &RunArgs) -> geo3::Result<RunConfig> {
    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var("GEO3_SEED") {
            Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
                GeoError::InvalidConfig(format!(
                    "GEO3_SEED must be an unsigned integer, got `{raw}`"
                ))
            })?,
            Err(_) => DEFAULT_SEED,
        },
    };
    let format: OutputFormat = args.format.parse()?;
    let mut tolerances = Tolerances::default();
    if let Some(v) = args.tol_harmonic {
        tolerances.harmonic = v;
    }
    if let Some(v) = args.tol_identity {
        tolerances.identity = v;
    }
    if let Some(v) = args.tol_curvature {
        tolerances.curvature = v;
    }
    if let Some(v) = args.tol_oracle {
        tolerances.oracle = v;
    }
    Ok(RunConfig {
        map: args.map.clone(),
        space: args.space.clone(),
        m: args.m.clone(),
        l: args.l.clone(),
        eps: args.eps.clone(),
        points: args.points,
        seed,
        tolerances,
        format,
        out: args.out.as_ref().map(|p| p.display().to_string()),
    })
}
