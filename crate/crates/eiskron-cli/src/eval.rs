//! `eval`: one-shot evaluation of the named functions.

use crate::complex_arg::parse_complex;
use crate::PrecisionArgs;
use anyhow::{bail, Context, Result};
use clap::Args;
use eiskron::deck::{automorphy_an, DeckElement};
use eiskron::dvariant::{s_d, DVariantContext};
use eiskron::eisenstein::{modular_df, modular_f, Route};
use eiskron::jacobi::{eisenstein_kronecker_e, j_value_checked, laurent_r};
use eiskron::numeric::UpperHalfPoint;
use eiskron::theta::theta_elementary;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Args)]
pub struct EvalArgs {
    /// Function name: theta, J, r_k, s_D, e_k, E, F, DF, A_n, eis_class
    pub function: String,
    /// Complex argument z, written as a+bi with no spaces
    #[arg(long)]
    pub z: Option<String>,
    /// Complex argument w
    #[arg(long)]
    pub w: Option<String>,
    /// Point tau in the upper half plane
    #[arg(long)]
    pub tau: Option<String>,
    /// Weight or coefficient index
    #[arg(long)]
    pub k: Option<i64>,
    /// Torsion index a
    #[arg(long)]
    pub a: Option<i64>,
    /// Torsion index b
    #[arg(long)]
    pub b: Option<i64>,
    /// Level N
    #[arg(long = "N")]
    pub level: Option<i64>,
    /// Auxiliary integer D > 1
    #[arg(long = "D")]
    pub d: Option<i64>,
    /// Sheaf degree n
    #[arg(long)]
    pub n: Option<usize>,
    /// Component index j0 (coprime to N)
    #[arg(long, default_value_t = 1)]
    pub j0: i64,
    /// Residue index x for E
    #[arg(long)]
    pub x: Option<i64>,
    /// Residue index y for E
    #[arg(long)]
    pub y: Option<i64>,
    /// Deck shift m for A_n
    #[arg(long)]
    pub m: Option<i64>,
    /// Deck shift n for A_n
    #[arg(long)]
    pub shift_n: Option<i64>,
    /// Matrix entries a,b,c,d for A_n
    #[arg(long)]
    pub gamma: Option<String>,
    #[command(flatten)]
    pub precision: PrecisionArgs,
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(v: Complex64) -> Self {
        ComplexOut { re: v.re, im: v.im }
    }
}

#[derive(Serialize)]
struct EvalOutput {
    function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<ComplexOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<ComplexOut>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<Route>,
    /// Truncation target enforced by the evaluator, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    error_estimate: Option<f64>,
}

fn req<T: Copy>(v: &Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow::anyhow!("missing required flag --{name}"))
}

fn req_tau(args: &EvalArgs) -> Result<UpperHalfPoint> {
    let raw = args
        .tau
        .as_deref()
        .context("missing required flag --tau")?;
    let c = parse_complex(raw)?;
    Ok(UpperHalfPoint::new(c)?)
}

fn req_z(v: &Option<String>, name: &str) -> Result<Complex64> {
    let raw = v.as_deref().ok_or_else(|| anyhow::anyhow!("missing required flag --{name}"))?;
    parse_complex(raw)
}

pub fn run(args: &EvalArgs) -> Result<String> {
    let prec = args.precision.build()?;
    let mut out = EvalOutput {
        function: args.function.clone(),
        value: None,
        matrix: None,
        route: None,
        error_estimate: Some(prec.q_tail_eps),
    };
    match args.function.as_str() {
        "theta" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            out.value = Some(theta_elementary(z, &tau, &prec).into());
        }
        "J" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            let w = req_z(&args.w, "w")?;
            out.value = Some(j_value_checked(z, w, &tau, &prec)?.into());
        }
        "r_k" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            let k = req(&args.k, "k")?;
            if k < 0 {
                bail!("r_k needs k >= 0");
            }
            let lau = laurent_r(z, &tau, k as usize, &prec)?;
            out.value = Some(lau.coefficient(k).into());
        }
        "s_D" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            let k = req(&args.k, "k")?;
            let d = req(&args.d, "D")?;
            let level = args.level.unwrap_or(3);
            if k < 0 {
                bail!("s_D needs k >= 0");
            }
            let ctx = DVariantContext::new(d, level, args.a.unwrap_or(1), args.b.unwrap_or(0), args.j0)?;
            out.value = Some(s_d(k as usize, &ctx, z, &tau, &prec)?.into());
        }
        "e_k" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            let k = req(&args.k, "k")?;
            if k < 1 {
                bail!("e_k needs k >= 1");
            }
            out.value = Some(eisenstein_kronecker_e(k as usize, z, &tau, &prec)?.into());
        }
        "E" => {
            let tau = req_tau(args)?;
            let k = req(&args.k, "k")?;
            let x = req(&args.x, "x")?;
            let y = req(&args.y, "y")?;
            let level = req(&args.level, "N")?;
            if k < 2 {
                bail!("E needs k >= 2 (weight one is routed through F)");
            }
            out.value =
                Some(eiskron::eisenstein::eisenstein_e(k as usize, x, y, level, &tau, &prec)?.into());
        }
        "F" => {
            let tau = req_tau(args)?;
            let k = req(&args.k, "k")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            if k < 1 {
                bail!("F needs k >= 1");
            }
            let v = modular_f(k as usize, a, b, level, &tau, &prec)?;
            out.route = Some(v.route);
            out.value = Some(v.value.into());
        }
        "DF" => {
            let tau = req_tau(args)?;
            let k = req(&args.k, "k")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            let d = req(&args.d, "D")?;
            if k < 1 {
                bail!("DF needs k >= 1");
            }
            let v = modular_df(k as usize, a, b, level, d, &tau, &prec)?;
            out.route = Some(v.route);
            out.value = Some(v.value.into());
        }
        "A_n" => {
            let tau = req_tau(args)?;
            let z = req_z(&args.z, "z")?;
            let n = req(&args.n, "n")?;
            let m = args.m.unwrap_or(0);
            let sn = args.shift_n.unwrap_or(0);
            let gamma = match &args.gamma {
                None => [[1i64, 0], [0, 1]],
                Some(raw) => parse_gamma(raw)?,
            };
            let level = args.level.unwrap_or(1);
            let deck = DeckElement::new((m, sn), gamma, level)?;
            let mat = automorphy_an(n, &deck, z, &tau);
            let rows = (0..mat.rows())
                .map(|r| (0..mat.cols()).map(|c| mat.get(r, c).into()).collect())
                .collect();
            out.matrix = Some(rows);
            out.error_estimate = Some(0.0);
        }
        "eis_class" => {
            let tau = req_tau(args)?;
            let n = req(&args.n, "n")?;
            let a = req(&args.a, "a")?;
            let b = req(&args.b, "b")?;
            let level = req(&args.level, "N")?;
            let rep = eiskron::classes::eisenstein_class_coefficient(n, a, b, level, &prec)?;
            out.value = Some(rep.weight_form(&tau, &prec)?.into());
        }
        other => bail!(
            "unknown function '{other}'; expected one of theta, J, r_k, s_D, e_k, E, F, DF, A_n, eis_class"
        ),
    }
    Ok(serde_json::to_string_pretty(&out)?)
}

fn parse_gamma(raw: &str) -> Result<[[i64; 2]; 2]> {
    let parts: Vec<i64> = raw
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("invalid matrix '{raw}', expected a,b,c,d"))?;
    if parts.len() != 4 {
        bail!("matrix '{raw}' must have exactly four entries a,b,c,d");
    }
    Ok([[parts[0], parts[1]], [parts[2], parts[3]]])
}
