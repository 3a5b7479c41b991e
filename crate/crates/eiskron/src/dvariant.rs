//! The D-variant section calculus.
//!
//! The coefficient functions s^D_k(z, tau) are the w-Taylor coefficients of
//!
//!   D^2 J(z, -w, tau) - D J(Dz, -w/D, tau)  =  s^D_0 + s^D_1 w + s^D_2 w^2 + ...
//!
//! (the two principal parts cancel). They are meromorphic with at worst
//! simple poles along z in (1/D)(Z tau + Z), satisfy the chain rule
//! d s^D_k/dtau = -((k+1)/(2 pi i)) d s^D_{k+1}/dz, and assemble into the
//! section vectors
//!
//!   q^D_n = (s^D_0, ..., s^D_n, 0, ..., 0)                       length r(n),
//!   p^D_n = (q^D_n | -(1/2pi i) s^D_1, ..., -((n+1)/2pi i) s^D_{n+1}, 0, ...) length 2 r(n),
//!
//! which transform under the deck group with the relative resp. absolute
//! one-form automorphy matrices and are closed for the absolute connection.
//! Specializing p^D_n along the torsion section tau -> (a j0 tau + b)/N
//! produces the modular forms _D F^(k+1) up to explicit constants.

use crate::deck::{basis_indices, basis_position, rank};
use crate::error::{Error, Result};
use crate::jacobi::j_value;
use crate::numeric::{
    factorial, lattice_distance, lattice_min_norm, two_pi_i, Precision, UpperHalfPoint, ZERO,
};
use crate::theta::{eta_one, partial_tau_eta_one};
use num_complex::Complex64;
use std::sync::Arc;

/// Fraction of the pole distance used for the w-expansion circle.
const W_RADIUS_FRAC: f64 = 0.25;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Fixed data for the D-variant: D > 1, the level N, a torsion index (a, b)
/// and the component index j0.
#[derive(Clone, Copy, Debug)]
pub struct DVariantContext {
    pub d: i64,
    pub level: i64,
    pub a: i64,
    pub b: i64,
    pub j0: i64,
}

impl DVariantContext {
    pub fn new(d: i64, level: i64, a: i64, b: i64, j0: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("D = {d} must be > 1")));
        }
        if level < 3 {
            return Err(Error::Domain(format!("level N = {level} must be >= 3")));
        }
        if gcd(j0, level) != 1 {
            return Err(Error::Domain(format!(
                "component index j0 = {j0} must be coprime to N = {level}"
            )));
        }
        Ok(DVariantContext { d, level, a, b, j0 })
    }

    /// Hypotheses for torsion specialization: gcd(D, N) = 1 and (a, b)
    /// nonzero mod N.
    pub fn require_torsion_hypotheses(&self) -> Result<()> {
        if gcd(self.d, self.level) != 1 {
            return Err(Error::Domain(format!(
                "gcd(D, N) = gcd({}, {}) != 1",
                self.d, self.level
            )));
        }
        if self.a.rem_euclid(self.level) == 0 && self.b.rem_euclid(self.level) == 0 {
            return Err(Error::Domain(format!(
                "torsion index ({}, {}) vanishes mod {}",
                self.a, self.b, self.level
            )));
        }
        Ok(())
    }

    /// The torsion point (a j0 tau + b)/N on the universal covering.
    pub fn torsion_point(&self, tau: &UpperHalfPoint) -> Complex64 {
        (((self.a * self.j0) as f64) * tau.get() + self.b as f64) / self.level as f64
    }
}

/// One component of a symbolic singular locus: the scaled shifted lattice
/// { (m tau + n)/denom - (p tau + q)/shift_den }.
#[derive(Clone, Copy, Debug)]
pub struct ScaledLattice {
    pub denom: i64,
    pub shift_num: (i64, i64),
    pub shift_den: i64,
}

impl ScaledLattice {
    pub fn plain(denom: i64) -> Self {
        ScaledLattice {
            denom,
            shift_num: (0, 0),
            shift_den: 1,
        }
    }

    pub fn distance(&self, z: Complex64, tau: &UpperHalfPoint) -> f64 {
        let shift = ((self.shift_num.0 as f64) * tau.get() + self.shift_num.1 as f64)
            / self.shift_den as f64;
        let scaled = (z + shift) * self.denom as f64;
        lattice_distance(scaled, tau) / self.denom as f64
    }
}

/// Symbolic description of the pole divisors of a section, used to choose
/// derivative radii without probing blindly.
#[derive(Clone, Debug, Default)]
pub struct SingularSet {
    pub components: Vec<ScaledLattice>,
}

impl SingularSet {
    pub fn scaled_lattice(denom: i64) -> Self {
        SingularSet {
            components: vec![ScaledLattice::plain(denom)],
        }
    }

    pub fn distance(&self, z: Complex64, tau: &UpperHalfPoint) -> f64 {
        self.components
            .iter()
            .map(|c| c.distance(z, tau))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shift the locus so that the wrapped section z -> S(z + shift) has
    /// this as its singular set: each component moves by -shift.
    fn translated(&self, num: (i64, i64), den: i64) -> SingularSet {
        SingularSet {
            components: self
                .components
                .iter()
                .map(|c| {
                    let g = gcd(gcd(c.shift_num.0 * den + num.0 * c.shift_den,
                                    c.shift_num.1 * den + num.1 * c.shift_den),
                                c.shift_den * den).max(1);
                    ScaledLattice {
                        denom: c.denom,
                        shift_num: (
                            (c.shift_num.0 * den + num.0 * c.shift_den) / g,
                            (c.shift_num.1 * den + num.1 * c.shift_den) / g,
                        ),
                        shift_den: c.shift_den * den / g,
                    }
                })
                .collect(),
        }
    }

    /// Safe radius for a z-derivative circle around z.
    fn z_radius(&self, z: Complex64, tau: &UpperHalfPoint, prec: &Precision) -> Result<f64> {
        let d = self.distance(z, tau).min(1.0);
        if d < 1e-9 {
            return Err(Error::PoleProximity {
                point: z,
                distance: d,
                divisor: "section singular set".into(),
            });
        }
        Ok(prec.deriv_radius_frac * d)
    }

    /// Safe radius for a tau-derivative circle: pole positions move with
    /// bounded speed in tau, so shrink by that speed factor.
    fn tau_radius(&self, z: Complex64, tau: &UpperHalfPoint, prec: &Precision) -> Result<f64> {
        let d = self.distance(z, tau).min(1.0);
        if d < 1e-9 {
            return Err(Error::PoleProximity {
                point: z,
                distance: d,
                divisor: "section singular set".into(),
            });
        }
        let mut speed: f64 = 2.0;
        for c in &self.components {
            // poles move with speed |m/denom - s_p/s_den|; relevant rows have
            // |m|/denom bounded by |Im z|/Im tau plus the shift slope
            let slope = 2.0 * (c.shift_num.0.abs() as f64) / c.shift_den as f64;
            let m_reach = (z.im.abs() / tau.im()).ceil() + 2.0 + slope;
            speed = speed.max(m_reach);
        }
        Ok((prec.deriv_radius_frac * d / speed).min(0.2 * tau.im()))
    }
}

type EvalFn = dyn Fn(Complex64, &UpperHalfPoint, &Precision) -> Result<Vec<Complex64>> + Send + Sync;

/// A section of an analytified sheaf in the fixed trivializations: a callable
/// producing a complex vector of declared length at every non-singular point.
#[derive(Clone)]
pub struct SectionEvaluator {
    length: usize,
    singular: SingularSet,
    f: Arc<EvalFn>,
}

impl SectionEvaluator {
    pub fn new(
        length: usize,
        singular: SingularSet,
        f: Arc<EvalFn>,
    ) -> Self {
        SectionEvaluator { length, singular, f }
    }

    pub fn from_fn<F>(length: usize, singular: SingularSet, f: F) -> Self
    where
        F: Fn(Complex64, &UpperHalfPoint, &Precision) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        SectionEvaluator::new(length, singular, Arc::new(f))
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn singular(&self) -> &SingularSet {
        &self.singular
    }

    pub fn eval(
        &self,
        z: Complex64,
        tau: &UpperHalfPoint,
        prec: &Precision,
    ) -> Result<Vec<Complex64>> {
        let v = (self.f)(z, tau, prec)?;
        if v.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                got: v.len(),
            });
        }
        Ok(v)
    }
}

/// All s^D_0..s^D_{k_max} at (z, tau) from a single w-expansion circle.
///
/// The circle radius is W_RADIUS_FRAC times the distance from w = 0 to the
/// pole set of the combination, and the expansion is rejected if the
/// principal parts fail to cancel.
pub fn s_d_vector(
    k_max: usize,
    ctx: &DVariantContext,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    let d = ctx.d as f64;
    let dz = lattice_distance(z, tau);
    let dzd = lattice_distance(d * z, tau) * d; // dist(0, D^2 z + D Gamma) etc.
    let dmin = lattice_min_norm(tau);
    let clearance = dmin.min(dz).min(dzd);
    let radius = W_RADIUS_FRAC * clearance;
    if radius < 1e-9 {
        return Err(Error::PoleProximity {
            point: z,
            distance: clearance,
            divisor: "(1/D)(Z tau + Z)".into(),
        });
    }
    let t = *tau;
    let pp = *prec;
    let g = move |w: Complex64| {
        d * d * j_value(z, -w, &t, &pp) - d * j_value(d * z, -w / d, &t, &pp)
    };
    let lau = crate::numeric::cauchy_coefficients(g, ZERO, radius, 1, k_max, prec)?;
    if lau.residue().norm() > 1e-9 {
        return Err(Error::Domain(format!(
            "principal parts failed to cancel at z = {z}: |c_-1| = {:.3e}",
            lau.residue().norm()
        )));
    }
    Ok((0..=k_max as i64).map(|k| lau.coefficient(k)).collect())
}

/// Single coefficient s^D_k(z, tau).
pub fn s_d(
    k: usize,
    ctx: &DVariantContext,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    Ok(s_d_vector(k, ctx, z, tau, prec)?[k])
}

/// SectionEvaluator producing (s^D_0, ..., s^D_{k_max}) as a plain vector;
/// the building block behind q^D_n, p^D_n and the chain-rule checks.
pub fn s_coefficient_stack(ctx: DVariantContext, k_max: usize) -> SectionEvaluator {
    SectionEvaluator::from_fn(
        k_max + 1,
        SingularSet::scaled_lattice(ctx.d),
        move |z, tau, prec| s_d_vector(k_max, &ctx, z, tau, prec),
    )
}

/// Defect of the coefficient chain rule:
/// d s^D_k / dtau + ((k+1)/(2 pi i)) d s^D_{k+1} / dz.
pub fn heat_chain_defect(
    k: usize,
    ctx: &DVariantContext,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    let stack = s_coefficient_stack(*ctx, k + 1);
    let dtau = vector_deriv_tau(&stack, z, tau, prec)?;
    let dz = vector_deriv_z(&stack, z, tau, prec)?;
    Ok(dtau[k] + (k as f64 + 1.0) / two_pi_i() * dz[k + 1])
}

/// q^D_n: the first n+1 slots of the degree-n basis carry s^D_0..s^D_n,
/// the remaining slots vanish. A section of the relative one-forms tensor
/// the degree-n sheaf.
pub fn build_q(n: usize, ctx: &DVariantContext) -> SectionEvaluator {
    let ctx = *ctx;
    SectionEvaluator::from_fn(
        rank(n),
        SingularSet::scaled_lattice(ctx.d),
        move |z, tau, prec| {
            let s = s_d_vector(n, &ctx, z, tau, prec)?;
            let mut v = vec![ZERO; rank(n)];
            for (k, sv) in s.into_iter().enumerate() {
                v[basis_position(n, k, 0)] = sv;
            }
            Ok(v)
        },
    )
}

/// p^D_n: first half q^D_n, second half carries -(k+1)/(2 pi i) s^D_{k+1}
/// in the (k, 0) slots. A section of the absolute one-forms tensor the
/// degree-n sheaf.
pub fn build_p(n: usize, ctx: &DVariantContext) -> SectionEvaluator {
    let ctx = *ctx;
    SectionEvaluator::from_fn(
        2 * rank(n),
        SingularSet::scaled_lattice(ctx.d),
        move |z, tau, prec| {
            let s = s_d_vector(n + 1, &ctx, z, tau, prec)?;
            let r = rank(n);
            let mut v = vec![ZERO; 2 * r];
            for k in 0..=n {
                v[basis_position(n, k, 0)] = s[k];
                v[r + basis_position(n, k, 0)] = -(k as f64 + 1.0) / two_pi_i() * s[k + 1];
            }
            Ok(v)
        },
    )
}

/// Derivative in z of every component, one shared Cauchy circle.
pub fn vector_deriv_z(
    section: &SectionEvaluator,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    let radius = if section.singular.components.is_empty() {
        prec.deriv_radius_frac * 0.5
    } else {
        section.singular.z_radius(z, tau, prec)?
    };
    vector_cauchy_first(section, z, tau, radius, prec, true)
}

/// Derivative in tau of every component, one shared Cauchy circle.
pub fn vector_deriv_tau(
    section: &SectionEvaluator,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    let radius = if section.singular.components.is_empty() {
        (prec.deriv_radius_frac * 0.25 * tau.im()).min(0.25)
    } else {
        section.singular.tau_radius(z, tau, prec)?
    };
    vector_cauchy_first(section, z, tau, radius, prec, false)
}

fn vector_cauchy_first(
    section: &SectionEvaluator,
    z: Complex64,
    tau: &UpperHalfPoint,
    radius: f64,
    prec: &Precision,
    in_z: bool,
) -> Result<Vec<Complex64>> {
    let m = prec.quad_points;
    let mut acc = vec![ZERO; section.length()];
    for j in 0..m {
        let angle = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let node = Complex64::from_polar(radius, angle);
        let vals = if in_z {
            section.eval(z + node, tau, prec)?
        } else {
            let t = UpperHalfPoint::new(tau.get() + node).map_err(|_| {
                Error::Domain("tau circle left the upper half plane".into())
            })?;
            section.eval(z, &t, prec)?
        };
        // first Taylor coefficient: weight by exp(-i angle)
        let phase = Complex64::from_polar(1.0, -angle);
        for (a, v) in acc.iter_mut().zip(vals.iter()) {
            *a += v * phase;
        }
    }
    let scale = 1.0 / (radius * m as f64);
    Ok(acc.into_iter().map(|v| v * scale).collect())
}

/// The connection to apply in `apply_connection`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    /// d/dz with the lowering terms eta(1,tau) l_{i-1,j} + l_{i,j-1}.
    Relative,
    /// Relative part plus the tau-direction of the absolute connection;
    /// output has twice the input length (dz-half then dtau-half).
    Absolute,
    /// The Gauss-Manin connection on rank-two H^dual data (chi, xi).
    GaussManin,
}

/// Apply the requested connection to a section at (z, tau).
///
/// Degrees n >= 2 use the symmetric-power Leibniz extension of the degree-one
/// action e -> eta dz f + dz g, f -> -(eta/2pi i) dtau f - (1/2pi i) dtau g,
/// g -> ((eta^2/2pi i) - eta') dtau f + (eta/2pi i) dtau g.
pub fn apply_connection(
    n: usize,
    kind: ConnectionKind,
    section: &SectionEvaluator,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    match kind {
        ConnectionKind::GaussManin => {
            if section.length() != 2 {
                return Err(Error::LengthMismatch {
                    expected: 2,
                    got: section.length(),
                });
            }
            let v = section.eval(z, tau, prec)?;
            let dv = vector_deriv_tau(section, z, tau, prec)?;
            let eta = eta_one(tau, prec);
            let etap = partial_tau_eta_one(tau, prec);
            let chi = v[0];
            let xi = v[1];
            Ok(vec![
                dv[0] - eta / two_pi_i() * chi + (eta * eta / two_pi_i() - etap) * xi,
                dv[1] - chi / two_pi_i() + eta / two_pi_i() * xi,
            ])
        }
        ConnectionKind::Relative => {
            let r = rank(n);
            if section.length() != r {
                return Err(Error::LengthMismatch {
                    expected: r,
                    got: section.length(),
                });
            }
            let v = section.eval(z, tau, prec)?;
            let dv = vector_deriv_z(section, z, tau, prec)?;
            let eta = eta_one(tau, prec);
            Ok(relative_rows(n, &v, &dv, eta))
        }
        ConnectionKind::Absolute => {
            let r = rank(n);
            if section.length() != r {
                return Err(Error::LengthMismatch {
                    expected: r,
                    got: section.length(),
                });
            }
            let v = section.eval(z, tau, prec)?;
            let dvz = vector_deriv_z(section, z, tau, prec)?;
            let dvt = vector_deriv_tau(section, z, tau, prec)?;
            let eta = eta_one(tau, prec);
            let etap = partial_tau_eta_one(tau, prec);
            let mut out = relative_rows(n, &v, &dvz, eta);
            out.extend(tau_rows(n, &v, &dvt, eta, etap));
            Ok(out)
        }
    }
}

/// dz-part: out_{i,j} = dz l_{i,j} + eta l_{i-1,j} + l_{i,j-1}.
fn relative_rows(
    n: usize,
    v: &[Complex64],
    dv: &[Complex64],
    eta: Complex64,
) -> Vec<Complex64> {
    let idx = basis_indices(n);
    let mut out = vec![ZERO; rank(n)];
    for (&(i, j), slot) in idx.iter().zip(out.iter_mut()) {
        let mut acc = dv[basis_position(n, i, j)];
        if i > 0 {
            acc += eta * v[basis_position(n, i - 1, j)];
        }
        if j > 0 {
            acc += v[basis_position(n, i, j - 1)];
        }
        *slot = acc;
    }
    out
}

/// dtau-part: out_{i,j} = dtau l_{i,j} + (j - i)(eta/2pi i) l_{i,j}
///   - ((i+1)/2pi i) l_{i+1,j-1} + (j+1)((eta^2/2pi i) - eta') l_{i-1,j+1}.
fn tau_rows(
    n: usize,
    v: &[Complex64],
    dv: &[Complex64],
    eta: Complex64,
    etap: Complex64,
) -> Vec<Complex64> {
    let idx = basis_indices(n);
    let mut out = vec![ZERO; rank(n)];
    for (&(i, j), slot) in idx.iter().zip(out.iter_mut()) {
        let mut acc = dv[basis_position(n, i, j)];
        acc += (j as f64 - i as f64) * eta / two_pi_i() * v[basis_position(n, i, j)];
        if j > 0 && i + 1 + (j - 1) <= n {
            acc -= (i as f64 + 1.0) / two_pi_i() * v[basis_position(n, i + 1, j - 1)];
        }
        if i > 0 && (i - 1) + (j + 1) <= n {
            acc += (j as f64 + 1.0) * (eta * eta / two_pi_i() - etap)
                * v[basis_position(n, i - 1, j + 1)];
        }
        *slot = acc;
    }
    out
}

/// The dz^dtau-component of the covariant exterior derivative applied to a
/// section (F | G) of the absolute one-forms tensor the degree-n sheaf:
///
///   out = dz G - dtau F + P G - Q F,
///
/// with P the dz-connection rows and Q the dtau-connection rows. For the
/// vector p^D_n the output entries reduce to
/// -(dtau s^D_k + ((k+1)/2pi i) dz s^D_{k+1}) in the (k, 0) slots.
pub fn apply_de_rham1(
    n: usize,
    section: &SectionEvaluator,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    let r = rank(n);
    if section.length() != 2 * r {
        return Err(Error::LengthMismatch {
            expected: 2 * r,
            got: section.length(),
        });
    }
    let dvz = vector_deriv_z(section, z, tau, prec)?;
    let dvt = vector_deriv_tau(section, z, tau, prec)?;
    let v = section.eval(z, tau, prec)?;
    let eta = eta_one(tau, prec);
    let etap = partial_tau_eta_one(tau, prec);
    let f: Vec<Complex64> = v[..r].to_vec();
    let g: Vec<Complex64> = v[r..].to_vec();
    let df_tau: Vec<Complex64> = dvt[..r].to_vec();
    let dg_z: Vec<Complex64> = dvz[r..].to_vec();
    // P G without the derivative part
    let zero = vec![ZERO; r];
    let pg = relative_rows(n, &g, &zero, eta);
    let qf = tau_rows(n, &f, &zero, eta, etap);
    let mut out = vec![ZERO; r];
    for i in 0..r {
        out[i] = dg_z[i] - df_tau[i] + pg[i] - qf[i];
    }
    Ok(out)
}

/// Translation of a degree-n section by the torsion point: the returned
/// evaluator computes
///
///   l^_{i,j}(z, tau) = sum_{k=0}^{i} ((-2 pi i a j0 / N)^(i-k) / (i-k)!)
///                      * l_{k,j}(z + (a j0 tau + b)/N, tau).
pub fn torsion_translate(
    n: usize,
    ctx: &DVariantContext,
    section: &SectionEvaluator,
) -> SectionEvaluator {
    let ctx = *ctx;
    let inner = section.clone();
    let r = rank(n);
    debug_assert_eq!(section.length(), r);
    let singular = section
        .singular
        .translated((ctx.a * ctx.j0, ctx.b), ctx.level);
    SectionEvaluator::from_fn(r, singular, move |z, tau, prec| {
        let shifted = inner.eval(z + ctx.torsion_point(tau), tau, prec)?;
        Ok(hat_combine(n, &shifted, &ctx))
    })
}

/// The exponential-binomial recombination of the translation formula.
fn hat_combine(n: usize, shifted: &[Complex64], ctx: &DVariantContext) -> Vec<Complex64> {
    let idx = basis_indices(n);
    let c = -two_pi_i() * ((ctx.a * ctx.j0) as f64) / ctx.level as f64;
    let mut out = vec![ZERO; shifted.len()];
    for (&(i, j), slot) in idx.iter().zip(out.iter_mut()) {
        let mut acc = ZERO;
        for k in 0..=i {
            acc += c.powu((i - k) as u32) / factorial(i - k)
                * shifted[basis_position(n, k, j)];
        }
        *slot = acc;
    }
    out
}

/// Specialization of a section of the absolute one-forms tensor the degree-n
/// sheaf along the torsion section: evaluate at z = 0 after translation and
/// combine the two halves with weight a j0 / N on the dz-half:
///
///   out_{i,j} = (a j0 / N) l^_{i,j}(0, tau) + lambda^_{i,j}(0, tau).
pub fn specialize_torsion(
    n: usize,
    ctx: &DVariantContext,
    section: &SectionEvaluator,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Vec<Complex64>> {
    ctx.require_torsion_hypotheses()?;
    let r = rank(n);
    if section.length() != 2 * r {
        return Err(Error::LengthMismatch {
            expected: 2 * r,
            got: section.length(),
        });
    }
    let w0 = ctx.torsion_point(tau);
    let v = section.eval(w0, tau, prec)?;
    let f_hat = hat_combine(n, &v[..r], ctx);
    let g_hat = hat_combine(n, &v[r..], ctx);
    let weight = ((ctx.a * ctx.j0) as f64) / ctx.level as f64;
    Ok(f_hat
        .iter()
        .zip(g_hat.iter())
        .map(|(fh, gh)| weight * fh + gh)
        .collect())
}
