//! `table`: function values over a tau-grid, as CSV (one `#` header line)
//! or JSON. Reruns with the same configuration are byte-identical.

use crate::complex_arg::parse_complex;
use crate::PrecisionArgs;
use anyhow::{bail, Context, Result};
use clap::Args;
use eiskron::eisenstein::{modular_df, modular_f};
use eiskron::numeric::{Precision, UpperHalfPoint};
use eiskron::theta::theta_elementary;
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Args)]
pub struct TableArgs {
    /// Function name: theta, e_k, E, F, DF, eis_class
    pub function: String,
    /// Real part shared by all grid points
    #[arg(long, default_value_t = 0.0)]
    pub tau_re: f64,
    /// First imaginary part of the grid
    #[arg(long, default_value_t = 1.0)]
    pub tau_im_start: f64,
    /// Last imaginary part of the grid
    #[arg(long, default_value_t = 5.0)]
    pub tau_im_end: f64,
    /// Number of grid rows
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Fixed complex argument z for z-dependent functions
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub a: Option<i64>,
    #[arg(long)]
    pub b: Option<i64>,
    #[arg(long = "N")]
    pub level: Option<i64>,
    #[arg(long = "D")]
    pub d: Option<i64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Residue index x for E
    #[arg(long)]
    pub x: Option<i64>,
    /// Residue index y for E
    #[arg(long)]
    pub y: Option<i64>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Output path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub precision: PrecisionArgs,
}

#[derive(Serialize)]
struct Row {
    tau_re: f64,
    tau_im: f64,
    value_re: f64,
    value_im: f64,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    function: &'a str,
    version: &'a str,
    config_hash: String,
    precision: Precision,
    rows: Vec<Row>,
}

fn config_hash(args: &TableArgs, prec: &Precision) -> String {
    // hash of everything that determines the output
    let canon = format!(
        "{}|{}|{}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}",
        args.function,
        args.tau_re,
        args.tau_im_start,
        args.tau_im_end,
        args.steps,
        args.z,
        args.k,
        args.a,
        args.b,
        args.level,
        args.d,
        args.n,
        args.x,
        args.y,
        serde_json::to_string(prec).expect("precision serialization"),
    );
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in canon.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn req<T: Copy>(v: &Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow::anyhow!("missing required flag --{name}"))
}

pub fn run(args: &TableArgs) -> Result<()> {
    let prec = args.precision.build()?;
    if args.steps == 0 {
        bail!("--steps must be positive");
    }
    if !(args.tau_im_start > 0.0) || !(args.tau_im_end > 0.0) {
        bail!("tau grid must stay in the upper half plane");
    }
    let mut rows = Vec::with_capacity(args.steps);
    for i in 0..args.steps {
        let im = if args.steps == 1 {
            args.tau_im_start
        } else {
            args.tau_im_start
                + (args.tau_im_end - args.tau_im_start) * i as f64 / (args.steps - 1) as f64
        };
        let tau = UpperHalfPoint::new(Complex64::new(args.tau_re, im))?;
        let value = eval_at(args, &tau, &prec)?;
        rows.push(Row {
            tau_re: args.tau_re,
            tau_im: im,
            value_re: value.re,
            value_im: value.im,
        });
    }
    let hash = config_hash(args, &prec);
    let version = env!("CARGO_PKG_VERSION");
    let body = match args.format.as_str() {
        "csv" => {
            let mut s = format!(
                "# eiskron {version} function={} config={hash} q_tail_eps={:e} quad_points={} lattice_radius={} deriv_radius_frac={}\n",
                args.function,
                prec.q_tail_eps,
                prec.quad_points,
                prec.lattice_radius,
                prec.deriv_radius_frac
            );
            s.push_str("tau_re,tau_im,value_re,value_im\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.tau_re, r.tau_im, r.value_re, r.value_im
                ));
            }
            s
        }
        "json" => {
            let table = JsonTable {
                function: &args.function,
                version,
                config_hash: hash,
                precision: prec,
                rows,
            };
            let mut s = serde_json::to_string_pretty(&table)?;
            s.push('\n');
            s
        }
        other => bail!("unknown format '{other}', expected csv or json"),
    };
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            file.write_all(body.as_bytes())?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn eval_at(args: &TableArgs, tau: &UpperHalfPoint, prec: &Precision) -> Result<Complex64> {
    match args.function.as_str() {
        "theta" => {
            let z = parse_complex(
                args.z.as_deref().context("theta tables need --z")?,
            )?;
            Ok(theta_elementary(z, tau, prec))
        }
        "e_k" => {
            let z = parse_complex(args.z.as_deref().context("e_k tables need --z")?)?;
            let k = req(&args.k, "k")?;
            if k < 1 {
                bail!("e_k needs k >= 1");
            }
            Ok(eiskron::jacobi::eisenstein_kronecker_e(
                k as usize, z, tau, prec,
            )?)
        }
        "E" => {
            let k = req(&args.k, "k")?;
            let x = req(&args.x, "x")?;
            let y = req(&args.y, "y")?;
            let level = req(&args.level, "N")?;
            Ok(eiskron::eisenstein::eisenstein_e(
                k as usize, x, y, level, tau, prec,
            )?)
        }
        "F" => {
            let k = req(&args.k, "k")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            Ok(modular_f(k as usize, a, b, level, tau, prec)?.value)
        }
        "DF" => {
            let k = req(&args.k, "k")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            let d = req(&args.d, "D")?;
            Ok(modular_df(k as usize, a, b, level, d, tau, prec)?.value)
        }
        "eis_class" => {
            let n = req(&args.n, "n")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            let rep = eiskron::classes::eisenstein_class_coefficient(n, a, b, level, prec)?;
            Ok(rep.weight_form(tau, prec)?)
        }
        other => bail!("unknown table function '{other}'"),
    }
}
