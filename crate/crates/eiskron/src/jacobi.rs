//! The fundamental meromorphic Jacobi form
//!
//!   J(z, w, tau) = theta(z + w, tau) / (theta(z, tau) theta(w, tau)),
//!
//! its Laurent data r_k around w = 0, its covariance factor, the mixed heat
//! equation, the relation to Zagier's two-variable form F, and the
//! Eisenstein-Kronecker functions e_k obtained by stripping the
//! non-holomorphic exponential from the w-expansion.
//!
//! J has simple poles exactly along z, w and (through theta(z + w)) z + w in
//! the lattice; the residue along z = m tau + n is exp(-2 pi i m w).

use crate::error::{Error, Result};
use crate::numeric::{
    cauchy_coefficients, lattice_distance, lattice_min_norm, two_pi_i, twisted_row_sum,
    zero_row_sum, Precision, TruncatedLaurent, UpperHalfPoint, ONE, ZERO,
};
use crate::theta::theta_elementary;
use num_complex::Complex64;

/// Fraction of the distance to the nearest pole used for w-expansion circles.
const W_RADIUS_FRAC: f64 = 0.25;

/// An argument triple for J with all three pole divisors kept at distance.
#[derive(Clone, Copy, Debug)]
pub struct JacobiPoint {
    pub z: Complex64,
    pub w: Complex64,
    pub tau: UpperHalfPoint,
}

impl JacobiPoint {
    pub fn new(z: Complex64, w: Complex64, tau: UpperHalfPoint) -> Result<Self> {
        let p = JacobiPoint { z, w, tau };
        p.check_pole_distance(1e-12)?;
        Ok(p)
    }

    pub fn check_pole_distance(&self, threshold: f64) -> Result<()> {
        for (label, point) in [("z", self.z), ("w", self.w), ("z+w", self.z + self.w)] {
            let d = lattice_distance(point, &self.tau);
            if d < threshold {
                return Err(Error::PoleProximity {
                    point,
                    distance: d,
                    divisor: format!("{label} in Z tau + Z"),
                });
            }
        }
        Ok(())
    }
}

/// Raw evaluation of J without pole-distance validation.
pub(crate) fn j_value(
    z: Complex64,
    w: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Complex64 {
    theta_elementary(z + w, tau, prec)
        / (theta_elementary(z, tau, prec) * theta_elementary(w, tau, prec))
}

/// J(z, w, tau) with pole-proximity checking.
pub fn jacobi_j(p: &JacobiPoint, prec: &Precision) -> Result<Complex64> {
    p.check_pole_distance(prec.q_tail_eps)?;
    Ok(j_value(p.z, p.w, &p.tau, prec))
}

/// Convenience wrapper: validate the argument triple, then evaluate J.
pub fn j_value_checked(
    z: Complex64,
    w: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    jacobi_j(&JacobiPoint::new(z, w, *tau)?, prec)
}

/// Closed-form covariance factor of J for shifts (m, n), (m', n') and a
/// matrix (a b; c d) in SL2(Z):
///
///   J((z+m tau+n)/(c tau+d), (w+m' tau+n')/(c tau+d), (a tau+b)/(c tau+d))
///     = factor * J(z, w, tau),
///   factor = (c tau + d) exp(2 pi i c/(c tau+d) (z+m tau+n)(w+m' tau+n')
///                            - 2 pi i m' z - 2 pi i m w - 2 pi i m m' tau).
pub fn jacobi_transform_factor(
    z: Complex64,
    w: Complex64,
    tau: &UpperHalfPoint,
    shift_z: (i64, i64),
    shift_w: (i64, i64),
    gamma: [[i64; 2]; 2],
) -> Result<Complex64> {
    let [[a, b], [c, d]] = gamma;
    if a * d - b * c != 1 {
        return Err(Error::NotSl2(gamma));
    }
    let t = tau.get();
    let (m, n) = (shift_z.0 as f64, shift_z.1 as f64);
    let (mp, np) = (shift_w.0 as f64, shift_w.1 as f64);
    let cd = (c as f64) * t + d as f64;
    let expo = two_pi_i() * (c as f64) / cd * (z + m * t + n) * (w + mp * t + np)
        - two_pi_i() * mp * z
        - two_pi_i() * m * w
        - two_pi_i() * m * mp * t;
    Ok(cd * expo.exp())
}

/// Radius for w-expansions of J(z, ., tau): stay inside the pole set
/// (Z tau + Z) minus 0 and -z + (Z tau + Z).
pub(crate) fn w_expansion_radius(z: Complex64, tau: &UpperHalfPoint) -> f64 {
    W_RADIUS_FRAC * lattice_min_norm(tau).min(lattice_distance(z, tau))
}

/// Laurent data of w -> J(z, w, tau) around w = 0:
/// J = 1/w + sum_{k>=0} r_k(z, tau) w^k, coefficients through w^K.
pub fn laurent_r(
    z: Complex64,
    tau: &UpperHalfPoint,
    k_max: usize,
    prec: &Precision,
) -> Result<TruncatedLaurent> {
    let radius = w_expansion_radius(z, tau);
    if radius < 1e-10 {
        return Err(Error::PoleProximity {
            point: z,
            distance: radius / W_RADIUS_FRAC,
            divisor: "Z tau + Z (w-expansion radius collapsed)".into(),
        });
    }
    let t = *tau;
    let pp = *prec;
    cauchy_coefficients(move |w| j_value(z, w, &t, &pp), ZERO, radius, 1, k_max, prec)
}

/// Defect of the mixed heat equation 2 pi i dJ/dtau = d^2 J / dz dw.
/// Zero (to quadrature accuracy) wherever J is holomorphic.
pub fn heat_equation_defect(p: &JacobiPoint, prec: &Precision) -> Result<Complex64> {
    let (lhs, rhs) = heat_equation_sides(p, prec)?;
    Ok(lhs - rhs)
}

/// Both sides of the mixed heat equation: (2 pi i dJ/dtau, d^2 J/dz dw).
pub fn heat_equation_sides(
    p: &JacobiPoint,
    prec: &Precision,
) -> Result<(Complex64, Complex64)> {
    p.check_pole_distance(1e-6)?;
    let (z, w, tau) = (p.z, p.w, p.tau);
    let dz0 = lattice_distance(z, &tau);
    let dw0 = lattice_distance(w, &tau);
    let dzw = lattice_distance(z + w, &tau);

    // tau-derivative: pole positions move with speed |m| <= Im(point)/Im(tau) + 1
    let speeds = [
        (z.im.abs() / tau.im()).ceil() + 2.0,
        (w.im.abs() / tau.im()).ceil() + 2.0,
        ((z + w).im.abs() / tau.im()).ceil() + 2.0,
    ];
    let speed = speeds.iter().cloned().fold(2.0, f64::max);
    let rho_tau = (prec.deriv_radius_frac * dz0.min(dw0).min(dzw) / speed).min(0.2 * tau.im());
    let pp = *prec;
    let dtau = cauchy_coefficients(
        move |t| j_value(z, w, &UpperHalfPoint::new(t).expect("tau circle"), &pp),
        tau.get(),
        rho_tau,
        0,
        1,
        prec,
    )?
    .coefficient(1);

    // mixed z, w derivative via nested circles
    let rho_z = prec.deriv_radius_frac * dz0.min(dzw / 2.0);
    let rho_w = prec.deriv_radius_frac * dw0.min(dzw - rho_z).max(1e-9);
    let pp2 = *prec;
    let t2 = tau;
    let dw_of = move |zz: Complex64| -> Complex64 {
        let inner = cauchy_coefficients(
            move |ww| j_value(zz, ww, &t2, &pp2),
            w,
            rho_w,
            0,
            1,
            &pp2,
        )
        .map(|l| l.coefficient(1));
        inner.unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let dzdw = cauchy_coefficients(dw_of, z, rho_z, 0, 1, prec)?.coefficient(1);
    Ok((two_pi_i() * dtau, dzdw))
}

/// Zagier's two-variable form, on the region where both defining series
/// converge geometrically:
///
///   F(z, w, tau) = sum_{n>=0} e^{-n w} / (q^{-n} e^z - 1)
///                - sum_{m>=0} e^{m z} e^w / (q^{-m} - e^w),
///
/// where q = exp(2 pi i tau). The implemented domain is the conservative
/// stripe |Re z| <= pi Im tau (1 - margin), |Re w| <= pi Im tau (1 - margin)
/// with e^z and e^w kept away from 1; outside it the series definition is
/// rejected (the analytic continuation is delegated to the identity
/// J(z, w, tau) = 2 pi i F(2 pi i z, 2 pi i w, tau)).
pub fn zagier_f(
    z: Complex64,
    w: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    const MARGIN: f64 = 0.05;
    let stripe = std::f64::consts::PI * tau.im() * (1.0 - MARGIN);
    if z.re.abs() > stripe || w.re.abs() > stripe {
        return Err(Error::Domain(format!(
            "(z, w) outside the series stripe |Re| <= {stripe:.3}; use the J-identity instead"
        )));
    }
    let ez = z.exp();
    let ew = w.exp();
    if (ez - ONE).norm() < 1e-8 || (ONE - ew).norm() < 1e-8 {
        return Err(Error::Domain("e^z or e^w too close to 1".into()));
    }
    let q = tau.q();
    let stop = 0.05 * prec.q_tail_eps;

    // first sum, rewritten with q^n in the denominator so nothing overflows
    let mut sum1 = ZERO;
    let ratio1 = (-w).exp() * q;
    let mut num = ONE;
    let mut qn = ONE;
    for n in 0..10_000 {
        let term = num / (ez - qn) * qn;
        sum1 += term;
        if term.norm() < stop && n >= 2 {
            break;
        }
        num *= ratio1;
        qn *= q;
    }
    // second sum
    let mut sum2 = ZERO;
    let ratio2 = z.exp() * q;
    let mut num2 = ew;
    let mut qm = ONE;
    for m in 0..10_000 {
        let term = num2 * qm / (ONE - ew * qm);
        sum2 += term;
        if term.norm() < stop && m >= 2 {
            break;
        }
        num2 *= ratio2;
        qm *= q;
    }
    Ok(sum1 - sum2)
}

/// Eisenstein-Kronecker function e_k(z, tau), k >= 1, defined through the
/// w-expansion
///
///   J(z, w, tau) = exp(2 pi i (conj(z) w - z w)/(tau - conj(tau)))
///                  * (1/w + sum_{k>=0} (-1)^k e_{k+1}(z, tau) w^k).
///
/// Real-analytic but not holomorphic in z: the conjugate enters explicitly.
pub fn eisenstein_kronecker_e(
    k: usize,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::Domain("e_k needs k >= 1".into()));
    }
    let lau = laurent_r(z, tau, k.max(1), prec)?;
    // multiply by exp(-2 pi i (conj z - z) w / (tau - conj tau)) = exp(A w)
    let a = -two_pi_i() * (z.conj() - z) / (tau.get() - tau.get().conj());
    let mut taylor = Vec::with_capacity(k + 2);
    let mut pw = ONE;
    for j in 0..=(k + 1) {
        taylor.push(pw / crate::numeric::factorial(j));
        pw *= a;
    }
    let product = lau.mul_taylor(&taylor);
    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * product.coefficient(k as i64 - 1))
}

/// Character-twisted lattice sum for e_k, valid for k >= 3 where the series
/// converges absolutely:
///
///   e_k(z, tau) = sum over nonzero lattice points gamma of
///                 exp(2 pi i (conj(z) gamma - z conj(gamma))/(tau - conj(tau))) / gamma^k.
///
/// Rows are summed with the twisted closed form; independent of the
/// J-expansion route.
pub fn eisenstein_character_sum(
    k: usize,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    if k < 3 {
        return Err(Error::Domain("absolutely convergent character sum needs k >= 3".into()));
    }
    let t = tau.get();
    let a = (z.conj() * t).im / t.im;
    let b = -z.im / t.im;
    let row = |m: i64| -> Complex64 {
        if m == 0 {
            zero_row_sum(k, b)
        } else {
            (two_pi_i() * a * m as f64).exp() * twisted_row_sum(k, (m as f64) * t, b)
        }
    };
    let mut radius = prec.lattice_radius as i64;
    let mut sum = row(0);
    for m in 1..=radius {
        sum += row(m) + row(-m);
    }
    loop {
        let mut next = sum;
        for m in (radius + 1)..=(2 * radius) {
            next += row(m) + row(-m);
        }
        if (next - sum).norm() < prec.q_tail_eps {
            return Ok(next);
        }
        sum = next;
        radius *= 2;
        if radius > (1 << 16) {
            return Err(Error::Domain("character sum failed to converge".into()));
        }
    }
}

/// Contour residue of z -> f(z) at `center`, with the circle radius chosen
/// as a fraction of `clearance` (the distance to the nearest other pole).
pub fn contour_residue<F>(
    f: F,
    center: Complex64,
    clearance: f64,
    prec: &Precision,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let radius = prec.deriv_radius_frac * clearance;
    if !(radius > 0.0) {
        return Err(Error::Domain("residue clearance must be positive".into()));
    }
    Ok(cauchy_coefficients(f, center, radius, 1, 0, prec)?.residue())
}
