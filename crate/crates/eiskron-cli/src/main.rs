//! eiskron: evaluate theta / Eisenstein-Kronecker special functions, emit
//! value tables over tau-grids, and run the named verification suites.

mod complex_arg;
mod eval;
mod table;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eiskron::suites::{run_suite, Suite, SuiteConfig};
use eiskron::Precision;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "eiskron", version, about = "Theta and Eisenstein-Kronecker numerics with built-in verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct PrecisionArgs {
    /// Series/product truncation target
    #[arg(long, global = true)]
    q_tail_eps: Option<f64>,
    /// Trapezoid nodes per circle (power of two >= 16)
    #[arg(long, global = true)]
    quad_points: Option<usize>,
    /// Initial lattice-sum cutoff
    #[arg(long, global = true)]
    lattice_radius: Option<usize>,
    /// Derivative circle radius as a fraction of the pole distance
    #[arg(long, global = true)]
    deriv_radius_frac: Option<f64>,
}

impl PrecisionArgs {
    fn build(&self) -> Result<Precision> {
        let mut p = Precision::default();
        if let Some(v) = self.q_tail_eps {
            p.q_tail_eps = v;
        }
        if let Some(v) = self.quad_points {
            p.quad_points = v;
        }
        if let Some(v) = self.lattice_radius {
            p.lattice_radius = v;
        }
        if let Some(v) = self.deriv_radius_frac {
            p.deriv_radius_frac = v;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a named function at given arguments
    Eval(eval::EvalArgs),
    /// Run a named verification suite; exit status reflects the result
    Verify(VerifyArgs),
    /// Emit a CSV/JSON table of function values over a tau-grid
    Table(table::TableArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: theta-transform, legendre, jacobi-cocycle, heat,
    /// residues, eisenstein-bridge, automorphy-cocycle, section-transform,
    /// closedness, specialization, eis-class
    suite: String,
    /// Seed for the deterministic samplers
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Random samples per check family
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Largest sheaf degree exercised
    #[arg(long, default_value_t = 3)]
    degree_max: usize,
    /// Write the JSON report to this path instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    precision: PrecisionArgs,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval(args) => {
            let out = eval::run(&args)?;
            println!("{out}");
            Ok(())
        }
        Command::Verify(args) => verify(&args),
        Command::Table(args) => table::run(&args),
    }
}

fn verify(args: &VerifyArgs) -> Result<()> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|_| anyhow::anyhow!("unknown suite '{}'; available: {}", args.suite, suite_names()))?;
    let cfg = SuiteConfig {
        seed: args.seed,
        samples: args.samples,
        degree_max: args.degree_max,
        precision: args.precision.build()?,
        ..SuiteConfig::default()
    };
    let report = run_suite(suite, &cfg)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            file.write_all(json.as_bytes())?;
            file.write_all(b"\n")?;
        }
        None => println!("{json}"),
    }
    if !report.passed() {
        bail!("suite '{}' failed", report.suite);
    }
    Ok(())
}

fn suite_names() -> String {
    Suite::ALL
        .iter()
        .map(|s| s.name())
        .collect::<Vec<_>>()
        .join(", ")
}
