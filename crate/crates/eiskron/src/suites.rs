//! Named verification suites.
//!
//! Each suite runs a family of identity checks at pinned tolerances and
//! reports the observed worst error per check. Reports are deterministic:
//! sampling is seeded, reductions run in fixed order, and checks are sorted
//! by name, so identical configurations produce byte-identical JSON.

use crate::classes::{eisenstein_class_coefficient, eisenstein_class_scalar};
use crate::deck::{
    automorphy_an, automorphy_tensor, random_deck, section_transform_defect, DeckElement,
    TensorKind,
};
use crate::dvariant::{
    apply_de_rham1, build_p, build_q, heat_chain_defect, s_coefficient_stack, s_d_vector,
    specialize_torsion, vector_deriv_z, DVariantContext, SingularSet,
};
use crate::eisenstein::{modular_df, modular_f};
use crate::error::{Error, Result};
use crate::jacobi::{
    heat_equation_sides, j_value, jacobi_transform_factor, laurent_r, JacobiPoint,
};
use crate::numeric::{
    cauchy_coefficients, factorial, lattice_distance, lattice_min_norm, two_pi_i, Precision,
    UpperHalfPoint, ZERO,
};
use crate::theta::{eta_one, eta_tau, g2_eisenstein_oracle, theta_elementary, theta_transform};
use num_complex::Complex64;
use rand::prelude::*;
use serde::Serialize;

/// Grid sweeps keep full accuracy at 64 nodes: every contour used by the
/// pipeline stays at a radius ratio <= 1/3 from the nearest singularity, so
/// the trapezoid error is far below rounding already.
const SWEEP_QUAD_POINTS: usize = 64;

/// One identity check inside a suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, max_error: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            max_error,
            tolerance,
            passed: max_error < tolerance && max_error.is_finite(),
        }
    }
}

/// Machine-readable suite report.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub config_hash: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Configuration shared by all suites. Identical configurations produce
/// byte-identical reports.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub degree_max: usize,
    pub levels: Vec<i64>,
    pub d_values: Vec<i64>,
    pub precision: Precision,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 17,
            samples: 20,
            degree_max: 3,
            levels: vec![3, 4, 5],
            d_values: vec![2, 3],
            precision: Precision::default(),
        }
    }
}

impl SuiteConfig {
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serialization");
        format!("{:016x}", fnv1a(canon.as_bytes()))
    }

    fn sweep_precision(&self) -> Precision {
        let mut p = self.precision;
        p.quad_points = p.quad_points.min(SWEEP_QUAD_POINTS);
        p
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// The suites the CLI exposes, one per invariant family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ThetaTransform,
    Legendre,
    JacobiCocycle,
    Heat,
    Residues,
    EisensteinBridge,
    AutomorphyCocycle,
    SectionTransform,
    Closedness,
    Specialization,
    EisClass,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::ThetaTransform,
        Suite::Legendre,
        Suite::JacobiCocycle,
        Suite::Heat,
        Suite::Residues,
        Suite::EisensteinBridge,
        Suite::AutomorphyCocycle,
        Suite::SectionTransform,
        Suite::Closedness,
        Suite::Specialization,
        Suite::EisClass,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::ThetaTransform => "theta-transform",
            Suite::Legendre => "legendre",
            Suite::JacobiCocycle => "jacobi-cocycle",
            Suite::Heat => "heat",
            Suite::Residues => "residues",
            Suite::EisensteinBridge => "eisenstein-bridge",
            Suite::AutomorphyCocycle => "automorphy-cocycle",
            Suite::SectionTransform => "section-transform",
            Suite::Closedness => "closedness",
            Suite::Specialization => "specialization",
            Suite::EisClass => "eis-class",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::Unsupported(format!("unknown suite '{s}'")))
    }
}

/// Run one suite.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.precision.validate()?;
    let checks = match suite {
        Suite::ThetaTransform => theta_transform_checks(cfg)?,
        Suite::Legendre => legendre_checks(cfg)?,
        Suite::JacobiCocycle => jacobi_cocycle_checks(cfg)?,
        Suite::Heat => heat_checks(cfg)?,
        Suite::Residues => residue_checks(cfg)?,
        Suite::EisensteinBridge => bridge_checks(cfg)?,
        Suite::AutomorphyCocycle => automorphy_checks(cfg)?,
        Suite::SectionTransform => section_transform_checks(cfg)?,
        Suite::Closedness => closedness_checks(cfg)?,
        Suite::Specialization => specialization_checks(cfg)?,
        Suite::EisClass => eis_class_checks(cfg)?,
    };
    let mut checks = checks;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        checks,
        config_hash: cfg.hash(),
    })
}

// ------------------------------------------------------------- sampling --

fn sample_tau(rng: &mut StdRng) -> UpperHalfPoint {
    UpperHalfPoint::new(Complex64::new(
        rng.random_range(-0.45..0.45),
        rng.random_range(0.85..1.9),
    ))
    .expect("sampled tau")
}

fn sample_interior(rng: &mut StdRng, tau: &UpperHalfPoint) -> Complex64 {
    loop {
        let z = rng.random_range(0.1..0.9) * tau.get() + rng.random_range(0.1..0.9);
        if lattice_distance(z, tau) > 0.12 {
            return z;
        }
    }
}

fn sample_d_safe(rng: &mut StdRng, tau: &UpperHalfPoint, d: i64) -> Complex64 {
    loop {
        let z = sample_interior(rng, tau);
        if SingularSet::scaled_lattice(d).distance(z, tau) > 0.12 / d as f64 {
            return z;
        }
    }
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-12)
}

/// Random Gamma(N) deck element whose Moebius image keeps Im tau workable.
fn sample_deck_bounded(
    rng: &mut StdRng,
    level: i64,
    shift_bound: i64,
    tau: &UpperHalfPoint,
    min_im: f64,
) -> DeckElement {
    loop {
        let deck = random_deck(level, 6, shift_bound, rng);
        let (_, t2) = deck.act(ZERO, tau);
        if t2.im() >= min_im {
            return deck;
        }
    }
}

// ------------------------------------------------------ theta-transform --

fn theta_transform_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.precision;
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    // full Gamma(5) covariance
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t0 = sample_tau(&mut rng);
        let gamma_deck = sample_deck_bounded(&mut rng, 5, 2, &t0, 0.05);
        for _ in 0..cfg.samples {
            let t = sample_tau(&mut rng);
            let (_, timg) = gamma_deck.act(ZERO, &t);
            if timg.im() < 0.05 {
                continue;
            }
            let z = sample_interior(&mut rng, &t);
            let predicted = theta_transform(z, &t, &gamma_deck, &prec);
            let (z2, t2) = gamma_deck.act(z, &t);
            let direct = theta_elementary(z2, &t2, &prec);
            worst = worst.max(rel_err(predicted, direct));
        }
    }
    let covariance = CheckResult::new("gamma5-covariance", worst, 1e-8);

    // pure quasi-periodicity, all shifts |m|, |n| <= 3
    let mut worst_qp: f64 = 0.0;
    for _ in 0..30 {
        let t = sample_tau(&mut rng);
        let z = sample_interior(&mut rng, &t);
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let deck = DeckElement::translation(m, n);
                let predicted = theta_transform(z, &t, &deck, &prec);
                let direct =
                    theta_elementary(z + (m as f64) * t.get() + n as f64, &t, &prec);
                worst_qp = worst_qp.max(rel_err(predicted, direct));
            }
        }
    }
    let quasi = CheckResult::new("quasi-periodicity", worst_qp, 1e-9);
    Ok(vec![covariance, quasi])
}

// ------------------------------------------------------------- legendre --

fn legendre_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.precision;
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut worst_leg: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    for _ in 0..cfg.samples {
        let t = sample_tau(&mut rng);
        let lhs = eta_tau(&t, &prec)? - t.get() * eta_one(&t, &prec);
        worst_leg = worst_leg.max((lhs - two_pi_i()).norm());
        let via_series = eta_one(&t, &prec);
        let via_lattice = -g2_eisenstein_oracle(&t, &prec);
        worst_route = worst_route.max((via_series - via_lattice).norm());
    }
    Ok(vec![
        CheckResult::new("legendre-relation", worst_leg, 1e-8),
        CheckResult::new("eta-one-cross-route", worst_route, 1e-8),
    ])
}

// -------------------------------------------------------- jacobi-cocycle --

fn jacobi_cocycle_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.precision;
    let mut rng = StdRng::seed_from_u64(cfg.seed);

    let mut worst_law: f64 = 0.0;
    let mut done = 0usize;
    while done < cfg.samples {
        let t = sample_tau(&mut rng);
        let deck = sample_deck_bounded(&mut rng, 4, 1, &t, 0.05);
        let gamma = deck.gamma();
        let sz = deck.shift();
        let sw = (rng.random_range(-1..=1), rng.random_range(-1..=1));
        let z = sample_interior(&mut rng, &t);
        let w = sample_interior(&mut rng, &t) * 0.41 + 0.05;
        if lattice_distance(z + w, &t) < 0.1 || lattice_distance(w, &t) < 0.1 {
            continue;
        }
        let [[a, b], [c, d]] = gamma;
        let cd = (c as f64) * t.get() + d as f64;
        let z2 = (z + (sz.0 as f64) * t.get() + sz.1 as f64) / cd;
        let w2 = (w + (sw.0 as f64) * t.get() + sw.1 as f64) / cd;
        let t2 = UpperHalfPoint::new(((a as f64) * t.get() + b as f64) / cd)
            .expect("Moebius image");
        if lattice_distance(z2, &t2) < 0.02
            || lattice_distance(w2, &t2) < 0.02
            || lattice_distance(z2 + w2, &t2) < 0.02
        {
            continue;
        }
        let lhs = j_value(z2, w2, &t2, &prec);
        let factor = jacobi_transform_factor(z, w, &t, sz, sw, gamma)?;
        let rhs = factor * j_value(z, w, &t, &prec);
        worst_law = worst_law.max(rel_err(lhs, rhs));
        done += 1;
    }

    // coefficient-wise covariance through order 4 (trivial w-shift)
    let mut worst_coeff: f64 = 0.0;
    let mut done = 0usize;
    while done < 8 {
        let t = sample_tau(&mut rng);
        let deck = sample_deck_bounded(&mut rng, 4, 1, &t, 0.08);
        let gamma = deck.gamma();
        let sz = deck.shift();
        let z = sample_interior(&mut rng, &t);
        let (z2, t2) = deck.act(z, &t);
        if lattice_distance(z2, &t2) < 0.05 {
            continue;
        }
        let cd = deck.cz_denominator(&t);
        let radius = 0.2
            * lattice_min_norm(&t)
                .min(lattice_distance(z, &t))
                .min(cd.norm() * lattice_min_norm(&t2))
                .min(cd.norm() * lattice_distance(z2, &t2));
        if radius < 1e-3 {
            continue;
        }
        let pp = prec;
        let lhs = cauchy_coefficients(
            |w| j_value(z2, w / cd, &t2, &pp),
            ZERO,
            radius,
            1,
            4,
            &prec,
        )?;
        let rhs = cauchy_coefficients(
            |w| {
                jacobi_transform_factor(z, w, &t, sz, (0, 0), gamma)
                    .map(|f| f * j_value(z, w, &t, &pp))
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            ZERO,
            radius,
            1,
            4,
            &prec,
        )?;
        for k in -1i64..=4 {
            let scale = rhs.coefficient(k).norm().max(1.0);
            worst_coeff = worst_coeff.max((lhs.coefficient(k) - rhs.coefficient(k)).norm() / scale);
        }
        done += 1;
    }

    Ok(vec![
        CheckResult::new("transformation-law", worst_law, 1e-8),
        CheckResult::new("coefficient-covariance", worst_coeff, 1e-7),
    ])
}

// ----------------------------------------------------------------- heat --

fn heat_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let mut rng = StdRng::seed_from_u64(cfg.seed);

    let mut worst_j: f64 = 0.0;
    let mut done = 0usize;
    while done < cfg.samples {
        let t = sample_tau(&mut rng);
        let z = sample_interior(&mut rng, &t);
        let w = sample_interior(&mut rng, &t) * 0.39 + 0.06;
        if lattice_distance(z + w, &t) < 0.15
            || lattice_distance(z, &t) < 0.15
            || lattice_distance(w, &t) < 0.15
        {
            continue;
        }
        let p = JacobiPoint::new(z, w, t)?;
        let (lhs, rhs) = heat_equation_sides(&p, &prec)?;
        worst_j = worst_j.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        done += 1;
    }

    let mut worst_chain: f64 = 0.0;
    for &d in &cfg.d_values {
        let ctx = DVariantContext::new(d, 5, 1, 0, 1)?;
        let mut done = 0usize;
        while done < cfg.samples {
            let t = sample_tau(&mut rng);
            let z = sample_d_safe(&mut rng, &t, d);
            for k in 0..=cfg.degree_max.min(3) {
                let defect = heat_chain_defect(k, &ctx, z, &t, &prec)?;
                let stack = s_coefficient_stack(ctx, k + 1);
                let dz = vector_deriv_z(&stack, z, &t, &prec)?;
                worst_chain = worst_chain.max(defect.norm() / dz[k + 1].norm().max(1.0));
            }
            done += 1;
        }
    }

    Ok(vec![
        CheckResult::new("j-heat-equation", worst_j, 1e-6),
        CheckResult::new("s-chain", worst_chain, 1e-6),
    ])
}

// ------------------------------------------------------------- residues --

/// residue of each component of a vector-valued map around `center`
fn vector_residue<F>(f: F, center: Complex64, radius: f64, len: usize, nodes: usize) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Result<Vec<Complex64>>,
{
    let mut acc = vec![ZERO; len];
    for j in 0..nodes {
        let angle = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
        let node = center + Complex64::from_polar(radius, angle);
        if let Ok(vals) = f(node) {
            let weight = Complex64::from_polar(radius, angle);
            for (a, v) in acc.iter_mut().zip(vals.iter()) {
                *a += v * weight;
            }
        } else {
            return vec![Complex64::new(f64::NAN, f64::NAN); len];
        }
    }
    acc.into_iter().map(|v| v / nodes as f64).collect()
}

fn residue_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let t = UpperHalfPoint::new(Complex64::new(0.17, 1.23)).expect("fixed tau");
    let dmin = lattice_min_norm(&t);

    // J residues along z = m tau + n with residue exp(-2 pi i m w)
    let w = Complex64::new(0.27, 0.14);
    let mut worst_j: f64 = 0.0;
    for m in -2i64..=2 {
        for n in [0i64, 1] {
            let center = (m as f64) * t.get() + n as f64;
            let clearance = dmin.min(lattice_distance(w, &t));
            let res = vector_residue(
                |z| Ok(vec![j_value(z, w, &t, &prec)]),
                center,
                prec.deriv_radius_frac * clearance,
                1,
                prec.quad_points,
            );
            let expected = (-two_pi_i() * (m as f64) * w).exp();
            worst_j = worst_j.max(rel_err(res[0], expected));
        }
    }

    // r_k residues: (-1)^k (2 pi i m)^k / k!
    let mut worst_rk: f64 = 0.0;
    for m in -2i64..=2 {
        for n in [0i64, 1] {
            let center = (m as f64) * t.get() + n as f64;
            let res = vector_residue(
                |z| {
                    laurent_r(z, &t, 4, &prec)
                        .map(|l| (0..=4).map(|k| l.coefficient(k)).collect())
                },
                center,
                prec.deriv_radius_frac * 0.5 * dmin,
                5,
                prec.quad_points,
            );
            for k in 0..=4usize {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign * (two_pi_i() * m as f64).powu(k as u32) / factorial(k);
                worst_rk = worst_rk
                    .max((res[k] - expected).norm() / expected.norm().max(1.0));
            }
        }
    }

    // s^D_k residues at the five listed centers
    let mut worst_sd: f64 = 0.0;
    for &d in &cfg.d_values {
        let ctx = DVariantContext::new(d, 5, 1, 0, 1)?;
        let df = d as f64;
        let lattice_res = |m: i64, k: usize| -> Complex64 {
            ((d * d - 1) as f64) * (two_pi_i() * m as f64).powu(k as u32) / factorial(k)
        };
        let torsion_res = |m: i64, k: usize| -> Complex64 {
            -(two_pi_i() * (m as f64) / df).powu(k as u32) / factorial(k)
        };
        let cases: Vec<(Complex64, Vec<Complex64>)> = vec![
            (ZERO, (0..=3).map(|k| lattice_res(0, k)).collect()),
            (t.get(), (0..=3).map(|k| lattice_res(1, k)).collect()),
            (t.get() / df, (0..=3).map(|k| torsion_res(1, k)).collect()),
            (
                Complex64::new(1.0 / df, 0.0),
                (0..=3).map(|k| torsion_res(0, k)).collect(),
            ),
            (
                (t.get() + 1.0) / df,
                (0..=3).map(|k| torsion_res(1, k)).collect(),
            ),
        ];
        for (center, expected) in cases {
            let res = vector_residue(
                |z| s_d_vector(3, &ctx, z, &t, &prec),
                center,
                prec.deriv_radius_frac * dmin / df,
                4,
                prec.quad_points,
            );
            for k in 0..=3usize {
                worst_sd = worst_sd
                    .max((res[k] - expected[k]).norm() / expected[k].norm().max(1.0));
            }
        }
    }

    Ok(vec![
        CheckResult::new("j-residue", worst_j, 1e-8),
        CheckResult::new("r-k-residue", worst_rk, 1e-7),
        CheckResult::new("s-d-residue", worst_sd, 1e-7),
    ])
}

// ---------------------------------------------------- eisenstein-bridge --

fn bridge_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.precision;
    let taus = [
        UpperHalfPoint::new(Complex64::new(0.0, 2.0)).expect("tau"),
        UpperHalfPoint::new(Complex64::new(0.3, 1.2)).expect("tau"),
    ];
    let mut checks = Vec::new();
    for k in 2..=6usize {
        let mut worst: f64 = 0.0;
        for &level in &cfg.levels {
            let indices = [
                (1i64, 0i64),
                (0, 1),
                (1, 1),
                (1, 2),
                (2, 1),
                (1, level - 1),
            ];
            for t in &taus {
                for &(a, b) in &indices {
                    let point = ((a as f64) * t.get() + b as f64) / level as f64;
                    let e = crate::jacobi::eisenstein_kronecker_e(k, point, t, &prec)?;
                    let f = modular_f(k, a, b, level, t, &prec)?.value;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let bridge = sign * two_pi_i().powu(k as u32) / factorial(k - 1) * f;
                    // unit floor: a few family members vanish identically and
                    // are then compared absolutely
                    let scale = e.norm().max(bridge.norm()).max(1.0);
                    worst = worst.max((e - bridge).norm() / scale);
                }
            }
        }
        checks.push(CheckResult::new(&format!("bridge-weight-{k}"), worst, 1e-7));
    }
    Ok(checks)
}

// --------------------------------------------------- automorphy-cocycle --

fn automorphy_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut worst_a1: f64 = 0.0;
    let mut worst_an: f64 = 0.0;
    let mut worst_tensor: f64 = 0.0;
    for _ in 0..50 {
        let t = sample_tau(&mut rng);
        let d1 = random_deck(3, 4, 2, &mut rng);
        let d2 = random_deck(3, 4, 2, &mut rng);
        let z = Complex64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
        let (z2, t2) = d2.act(z, &t);
        let composed = d1.compose(&d2);
        for n in 1..=cfg.degree_max.min(3) {
            let lhs = automorphy_an(n, &composed, z, &t);
            let rhs = automorphy_an(n, &d1, z2, &t2).mul(&automorphy_an(n, &d2, z, &t));
            let defect = lhs.max_abs_diff(&rhs) / rhs.inf_norm().max(1.0);
            if n == 1 {
                worst_a1 = worst_a1.max(defect);
            } else {
                worst_an = worst_an.max(defect);
            }
        }
        for kind in [
            TensorKind::Relative1Form,
            TensorKind::Absolute1Form,
            TensorKind::Absolute2Form,
        ] {
            let n = 2usize;
            let lhs = automorphy_tensor(n, &composed, z, &t, kind);
            let rhs = automorphy_tensor(n, &d1, z2, &t2, kind)
                .mul(&automorphy_tensor(n, &d2, z, &t, kind));
            worst_tensor = worst_tensor.max(lhs.max_abs_diff(&rhs) / rhs.inf_norm().max(1.0));
        }
    }
    Ok(vec![
        CheckResult::new("a1-cocycle", worst_a1, 1e-9),
        CheckResult::new("an-cocycle", worst_an, 1e-9),
        CheckResult::new("tensor-cocycle", worst_tensor, 1e-9),
    ])
}

// ---------------------------------------------------- section-transform --

fn section_transform_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut worst_q: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for &d in &cfg.d_values {
        let ctx = DVariantContext::new(d, 4, 1, 0, 1)?;
        for n in 0..=cfg.degree_max.min(3) {
            let q = build_q(n, &ctx);
            let p = build_p(n, &ctx);
            let mut done = 0usize;
            while done < cfg.samples / 4 + 1 {
                let t = sample_tau(&mut rng);
                let deck = sample_deck_bounded(&mut rng, 4, 1, &t, 0.25);
                let z = sample_d_safe(&mut rng, &t, d);
                let (z2, t2) = deck.act(z, &t);
                if SingularSet::scaled_lattice(d).distance(z2, &t2) < 0.05 / d as f64 {
                    continue;
                }
                let dq = section_transform_defect(
                    n,
                    Some(TensorKind::Relative1Form),
                    |zz, tt| q.eval(zz, tt, &prec),
                    &deck,
                    z,
                    &t,
                )?;
                worst_q = worst_q.max(dq);
                let dp = section_transform_defect(
                    n,
                    Some(TensorKind::Absolute1Form),
                    |zz, tt| p.eval(zz, tt, &prec),
                    &deck,
                    z,
                    &t,
                )?;
                worst_p = worst_p.max(dp);
                done += 1;
            }
        }
    }
    Ok(vec![
        CheckResult::new("q-relative-transform", worst_q, 1e-7),
        CheckResult::new("p-absolute-transform", worst_p, 1e-7),
    ])
}

// ------------------------------------------------------------ closedness --

fn closedness_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let t = UpperHalfPoint::new(Complex64::new(0.13, 1.21)).expect("fixed tau");
    let grid = [0.11, 0.23, 0.41, 0.59, 0.77];
    let mut checks = Vec::new();
    for n in 0..=cfg.degree_max.min(3) {
        let mut worst: f64 = 0.0;
        for &d in &cfg.d_values {
            let ctx = DVariantContext::new(d, 5, 1, 0, 1)?;
            let p = build_p(n, &ctx);
            for &x in &grid {
                for &y in &grid {
                    let z = x * t.get() + y;
                    let out = apply_de_rham1(n, &p, z, &t, &prec)?;
                    let sup = out.iter().map(|v| v.norm()).fold(0.0, f64::max);
                    worst = worst.max(sup);
                }
            }
        }
        checks.push(CheckResult::new(&format!("closedness-degree-{n}"), worst, 1e-6));
    }
    Ok(checks)
}

// -------------------------------------------------------- specialization --

fn specialization_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let taus = [
        UpperHalfPoint::new(Complex64::new(0.0, 2.0)).expect("tau"),
        UpperHalfPoint::new(Complex64::new(0.4, 1.3)).expect("tau"),
    ];
    let mut checks = Vec::new();
    for n in 0..=cfg.degree_max.min(3) {
        let mut worst: f64 = 0.0;
        for &level in &cfg.levels {
            for &d in &cfg.d_values {
                if gcd(d, level) != 1 {
                    continue;
                }
                for j0 in [1i64, level - 1] {
                    let ctx = DVariantContext::new(d, level, 1, 1, j0)?;
                    let p = build_p(n, &ctx);
                    for t in &taus {
                        let out = specialize_torsion(n, &ctx, &p, t, &prec)?;
                        for k in 1..=(n + 1) {
                            let df = modular_df(
                                k + 1,
                                ctx.a * ctx.j0,
                                ctx.b,
                                level,
                                d,
                                t,
                                &prec,
                            )?
                            .value;
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            let expected =
                                sign * two_pi_i().powu(k as u32) / factorial(k - 1) * df;
                            let got = out[crate::deck::basis_position(n, k - 1, 0)];
                            worst = worst.max(rel_err(got, expected));
                        }
                        // the remaining entries must vanish
                        for (i, j) in crate::deck::basis_indices(n) {
                            if j > 0 {
                                worst = worst
                                    .max(out[crate::deck::basis_position(n, i, j)].norm());
                            }
                        }
                    }
                }
            }
        }
        checks.push(CheckResult::new(
            &format!("specialization-degree-{n}"),
            worst,
            1e-6,
        ));
    }
    Ok(checks)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ------------------------------------------------------------- eis-class --

fn eis_class_checks(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let prec = cfg.sweep_precision();
    let t = UpperHalfPoint::new(Complex64::new(0.2, 1.4)).expect("fixed tau");

    // Cor-style coefficients against the raw modular forms
    let mut worst_coeff: f64 = 0.0;
    for &level in &cfg.levels {
        for n in 0..=cfg.degree_max.min(3) {
            let rep = eisenstein_class_coefficient(n, 1, 1, level, &prec)?;
            let f = modular_f(n + 2, 1, 1, level, &t, &prec)?.value;
            let expected = eisenstein_class_scalar(n, level) * f;
            worst_coeff = worst_coeff.max(rel_err(rep.weight_form(&t, &prec)?, expected));
            worst_coeff = worst_coeff.max(rel_err(
                rep.coefficient(&t, &prec)?,
                expected / two_pi_i(),
            ));
        }
    }

    // exact unfold of the D-variant relation through the class coefficients
    let mut worst_unfold: f64 = 0.0;
    for &level in &cfg.levels {
        for &d in &cfg.d_values {
            if gcd(d, level) != 1 {
                continue;
            }
            for n in 0..=cfg.degree_max.min(3) {
                let df = modular_df(n + 2, 1, 1, level, d, &t, &prec)?.value;
                let lhs = if n == 0 {
                    -df
                } else {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign / factorial(n) * df
                };
                let eis_ab = eisenstein_class_coefficient(n, 1, 1, level, &prec)?
                    .weight_form(&t, &prec)?;
                let eis_dab = eisenstein_class_coefficient(n, d, d, level, &prec)?
                    .weight_form(&t, &prec)?;
                let dfl = d as f64;
                let rhs = -(level as f64).powi(1 - n as i32)
                    * (dfl * dfl * eis_ab - dfl.powi(-(n as i32)) * eis_dab);
                worst_unfold = worst_unfold.max(rel_err(lhs, rhs));
            }
        }
    }

    // recovery of the Eisenstein class from the specialization pipeline for
    // D = 1 mod N, using the factor (D^(n+2) - 1)/D^n
    let mut worst_recover: f64 = 0.0;
    for &level in &cfg.levels {
        let d = level + 1;
        for n in 0..=cfg.degree_max.min(2) {
            let ctx = DVariantContext::new(d, level, 1, 1, 1)?;
            let p = build_p(n, &ctx);
            let out = specialize_torsion(n, &ctx, &p, &t, &prec)?;
            let v = out[crate::deck::basis_position(n, n, 0)];
            // v = (-1)^(n+1) (2 pi i)^(n+1)/n! * _D F^(n+2), with
            // _D F = (D^(n+2)-1)/D^n * F here
            let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let dfl = d as f64;
            let factor = (dfl.powi(n as i32 + 2) - 1.0) / dfl.powi(n as i32);
            let f_rec = v * factorial(n)
                / (sign * two_pi_i().powu(n as u32 + 1) * factor);
            let expected = eisenstein_class_scalar(n, level)
                * modular_f(n + 2, 1, 1, level, &t, &prec)?.value;
            let got = eisenstein_class_scalar(n, level) * f_rec;
            worst_recover = worst_recover.max(rel_err(got, expected));
        }
    }

    // component scaling: the (k, 0) entry of the degree-n specialization
    // equals the (k, 0) entry of the degree-k specialization (the factor
    // 1/(n-k)! is carried by the basis normalization)
    let mut worst_scaling: f64 = 0.0;
    {
        let level = 5i64;
        let d = 2i64;
        let n = cfg.degree_max.min(3);
        let ctx = DVariantContext::new(d, level, 1, 1, 1)?;
        let p_n = build_p(n, &ctx);
        let out_n = specialize_torsion(n, &ctx, &p_n, &t, &prec)?;
        for k in 0..=n {
            let p_k = build_p(k, &ctx);
            let out_k = specialize_torsion(k, &ctx, &p_k, &t, &prec)?;
            let a = out_n[crate::deck::basis_position(n, k, 0)];
            let b = out_k[crate::deck::basis_position(k, k, 0)];
            worst_scaling = worst_scaling.max(rel_err(a, b));
        }
    }

    Ok(vec![
        CheckResult::new("class-coefficients", worst_coeff, 1e-10),
        CheckResult::new("d-variant-unfold", worst_unfold, 1e-12),
        CheckResult::new("d-congruent-recovery", worst_recover, 1e-6),
        CheckResult::new("component-scaling", worst_scaling, 1e-6),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for suite in Suite::ALL {
            let parsed: Suite = suite.name().parse().unwrap();
            assert_eq!(parsed, suite);
        }
        assert!("no-such-suite".parse::<Suite>().is_err());
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = SuiteConfig::default();
        let b = SuiteConfig::default();
        assert_eq!(a.hash(), b.hash());
        let mut c = SuiteConfig::default();
        c.seed = 18;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn legendre_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig::default();
        let r1 = run_suite(Suite::Legendre, &cfg).unwrap();
        let r2 = run_suite(Suite::Legendre, &cfg).unwrap();
        assert!(r1.passed(), "{}", r1.to_json());
        assert_eq!(r1.to_json(), r2.to_json());
    }

    #[test]
    fn automorphy_suite_passes() {
        let cfg = SuiteConfig::default();
        let r = run_suite(Suite::AutomorphyCocycle, &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }
}
