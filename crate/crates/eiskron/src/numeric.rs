//! Complex-analytic kernel: Cauchy coefficient extraction on circles,
//! holomorphic differentiation, and absolutely convergent lattice sums.
//!
//! Everything here works in plain `f64` precision. The trapezoid rule on a
//! circle is spectrally accurate for analytic integrands, so 256 nodes put
//! quadrature error at rounding level whenever the contour keeps a safety
//! margin from the nearest singularity.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// 2 pi i, the ubiquitous period factor.
pub fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// pi i.
pub fn pi_i() -> Complex64 {
    Complex64::new(0.0, PI)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn is_finite_c(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Numerical tuning knobs shared by all evaluators.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Precision {
    /// Target for series/product tails and truncation saturation.
    pub q_tail_eps: f64,
    /// Trapezoid nodes on a circle; must be a power of two >= 16.
    pub quad_points: usize,
    /// Initial cutoff for lattice sums (doubled adaptively).
    pub lattice_radius: usize,
    /// Fraction of the distance to the nearest singularity used as the
    /// radius of derivative-extraction circles. Must lie in (0, 1).
    pub deriv_radius_frac: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            q_tail_eps: 1e-14,
            quad_points: 256,
            lattice_radius: 64,
            deriv_radius_frac: 0.25,
        }
    }
}

impl Precision {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_tail_eps > 0.0) {
            return Err(Error::InvalidPrecision("q_tail_eps must be positive".into()));
        }
        if self.quad_points < 16 || !self.quad_points.is_power_of_two() {
            return Err(Error::InvalidPrecision(
                "quad_points must be a power of two >= 16".into(),
            ));
        }
        if self.lattice_radius < 4 {
            return Err(Error::InvalidPrecision("lattice_radius must be >= 4".into()));
        }
        if !(self.deriv_radius_frac > 0.0 && self.deriv_radius_frac < 1.0) {
            return Err(Error::InvalidPrecision(
                "deriv_radius_frac must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// A point tau with Im(tau) > 0, anchoring the lattice Z*tau + Z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPoint {
    tau: Complex64,
}

impl UpperHalfPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !is_finite_c(tau) {
            return Err(Error::NotUpperHalf(tau));
        }
        Ok(UpperHalfPoint { tau })
    }

    pub fn get(&self) -> Complex64 {
        self.tau
    }

    pub fn im(&self) -> f64 {
        self.tau.im
    }

    /// q_tau = exp(2 pi i tau).
    pub fn q(&self) -> Complex64 {
        (two_pi_i() * self.tau).exp()
    }
}

/// Finitely many Laurent coefficients of a one-variable expansion around
/// `center`, indexed from `-pole_order` to `trunc_degree`.
#[derive(Clone, Debug)]
pub struct TruncatedLaurent {
    pole_order: usize,
    coefficients: Vec<Complex64>,
    center: Complex64,
    radius_used: f64,
}

impl TruncatedLaurent {
    pub fn new(
        pole_order: usize,
        coefficients: Vec<Complex64>,
        center: Complex64,
        radius_used: f64,
    ) -> Self {
        TruncatedLaurent {
            pole_order,
            coefficients,
            center,
            radius_used,
        }
    }

    pub fn pole_order(&self) -> usize {
        self.pole_order
    }

    pub fn trunc_degree(&self) -> i64 {
        self.coefficients.len() as i64 - self.pole_order as i64 - 1
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius_used(&self) -> f64 {
        self.radius_used
    }

    /// Coefficient of (w - center)^k; zero outside the stored window.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k + self.pole_order as i64;
        if idx < 0 || idx >= self.coefficients.len() as i64 {
            ZERO
        } else {
            self.coefficients[idx as usize]
        }
    }

    /// Residue, i.e. the coefficient of (w - center)^(-1).
    pub fn residue(&self) -> Complex64 {
        self.coefficient(-1)
    }

    /// Multiplies by an entire power series given by its Taylor coefficients
    /// at the same center. The result keeps the same pole order and is
    /// truncated to the degree supported by both factors.
    pub fn mul_taylor(&self, taylor: &[Complex64]) -> TruncatedLaurent {
        let p = self.pole_order as i64;
        let t = self.trunc_degree();
        // degree k of the product needs self-coefficients down to k - (len-1),
        // all available; the top reliable degree is t - (available shift) but
        // with an entire factor every product degree <= t is complete only if
        // taylor reaches degree k + p. Keep min(t, taylor_len - 1 - p).
        let top = t.min(taylor.len() as i64 - 1 - p);
        let mut coeffs = Vec::new();
        for k in -p..=top.max(-p) {
            let mut acc = ZERO;
            for (j, &a) in taylor.iter().enumerate() {
                let idx = k - j as i64;
                if idx < -p {
                    break;
                }
                acc += a * self.coefficient(idx);
            }
            coeffs.push(acc);
        }
        TruncatedLaurent::new(self.pole_order, coeffs, self.center, self.radius_used)
    }
}

/// Laurent coefficients c_k = (1/2 pi i) * contour integral of
/// f(w) (w - center)^(-k-1) dw on the circle of the given radius,
/// computed with the trapezoid rule on `prec.quad_points` nodes.
///
/// `f` must be holomorphic on the closed disc except possibly a pole of
/// order <= `pole_order` at the center, and the circle must stay strictly
/// inside the domain of analyticity.
pub fn cauchy_coefficients<F>(
    f: F,
    center: Complex64,
    radius: f64,
    pole_order: usize,
    trunc_degree: usize,
    prec: &Precision,
) -> Result<TruncatedLaurent>
where
    F: Fn(Complex64) -> Complex64,
{
    prec.validate()?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("contour radius {radius} must be positive")));
    }
    let m = prec.quad_points;
    // roots[l] = exp(-2 pi i l / m); index arithmetic keeps phases exact.
    let roots: Vec<Complex64> = (0..m)
        .map(|l| Complex64::from_polar(1.0, -2.0 * PI * l as f64 / m as f64))
        .collect();
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let node = center + radius * roots[j].conj();
        let v = f(node);
        if !is_finite_c(v) {
            return Err(Error::NonFinite { at: node });
        }
        values.push(v);
    }
    let mut coeffs = Vec::with_capacity(pole_order + trunc_degree + 1);
    for k in -(pole_order as i64)..=(trunc_degree as i64) {
        let mut acc = ZERO;
        for j in 0..m {
            let l = (j as i64 * k).rem_euclid(m as i64) as usize;
            acc += values[j] * roots[l];
        }
        let scale = radius.powi(-(k as i32)) / m as f64;
        coeffs.push(acc * scale);
    }
    Ok(TruncatedLaurent::new(pole_order, coeffs, center, radius))
}

/// order-th derivative of a holomorphic function at a point, read off a
/// Cauchy circle of radius `deriv_radius_frac * singularity_distance`.
pub fn holomorphic_derivative<F>(
    f: F,
    at: Complex64,
    order: usize,
    singularity_distance: f64,
    prec: &Precision,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(singularity_distance > 0.0) || !singularity_distance.is_finite() {
        return Err(Error::Domain(format!(
            "declared singularity distance {singularity_distance} must be positive and finite"
        )));
    }
    if order == 0 {
        return Ok(f(at));
    }
    let radius = prec.deriv_radius_frac * singularity_distance;
    let lau = cauchy_coefficients(f, at, radius, 0, order, prec)?;
    Ok(lau.coefficient(order as i64) * factorial(order))
}

/// Distance from z to the lattice Z*tau + Z.
pub fn lattice_distance(z: Complex64, tau: &UpperHalfPoint) -> f64 {
    let t = tau.get();
    let x = z.im / t.im;
    let mut best = f64::INFINITY;
    let m0 = x.floor() as i64;
    for m in (m0 - 1)..=(m0 + 2) {
        let rem = z - (m as f64) * t;
        let n0 = rem.re.floor();
        for n in [n0, n0 + 1.0] {
            let d = (rem - n).norm();
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Minimal norm of a nonzero lattice point of Z*tau + Z.
pub fn lattice_min_norm(tau: &UpperHalfPoint) -> f64 {
    let t = tau.get();
    let mut best = f64::INFINITY;
    for m in -3i64..=3 {
        for n in -3i64..=3 {
            if m == 0 && n == 0 {
                continue;
            }
            let d = ((m as f64) * t + n as f64).norm();
            if d < best {
                best = d;
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Row sums in closed form.
//
// The absolutely convergent double sums below are evaluated row by row: the
// inner sum over n is the exact analytic value
//     T_k(w, b) = sum_{n in Z} exp(2 pi i b n) / (w + n)^k,      k >= 2,
// obtained by differentiating the Fourier identity
//     sum_n exp(2 pi i b n) / (w + n) = 2 pi i exp(-2 pi i b w) / (1 - exp(-2 pi i w))
// (k - 1) times; for b = 0 this reduces to the cotangent forms, e.g.
// T_2(w, 0) = pi^2 / sin^2(pi w). Row values then decay geometrically in the
// row index, so the outer cutoff doubling terminates quickly. The naive
// square-shell double sum is kept in `lattice_sum_direct` as a reference.
// ---------------------------------------------------------------------------

/// Exact inner row sum T_k(w, b) for k >= 2, b taken mod 1, w not in Z.
pub fn twisted_row_sum(k: usize, w: Complex64, b: f64) -> Complex64 {
    assert!(k >= 2, "closed row sums need k >= 2");
    let b = b.rem_euclid(1.0);
    if w.im < 0.0 {
        // reflect n -> -n onto the numerically stable half plane; the basis
        // functions below lose all significance for Im w << 0
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        return sign * twisted_row_sum(k, -w, (-b).rem_euclid(1.0));
    }
    // Coefficients over the basis (1 - U)^(-m) under repeated d/dw, where
    // each step maps c_m to -2 pi i ((b - m) c_m + (m - 1) c_{m-1}).
    let mut c = vec![ZERO; k + 1];
    c[1] = ONE;
    for _ in 1..k {
        let mut next = vec![ZERO; k + 1];
        for m in 1..=k {
            next[m] = -two_pi_i() * ((b - m as f64) * c[m] + (m as f64 - 1.0) * c[m - 1]);
        }
        c = next;
    }
    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let lead = two_pi_i() * (sign / factorial(k - 1));
    let mut acc = ZERO;
    if w.im > 0.0 {
        // 1 - U = -U (1 - V) with V = exp(2 pi i w), |V| < 1; combine the
        // exponents before exponentiating so nothing overflows.
        let v = (two_pi_i() * w).exp();
        let one_minus_v = ONE - v;
        for m in 1..=k {
            if c[m] == ZERO {
                continue;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let expo = (two_pi_i() * (m as f64 - b) * w).exp();
            acc += c[m] * sign * expo * one_minus_v.powi(-(m as i32));
        }
    } else {
        let u = (-two_pi_i() * w).exp();
        let one_minus_u = ONE - u;
        let pref = (-two_pi_i() * b * w).exp();
        for m in 1..=k {
            if c[m] == ZERO {
                continue;
            }
            acc += c[m] * pref * one_minus_u.powi(-(m as i32));
        }
    }
    lead * acc
}

fn binomial(n: usize, j: usize) -> f64 {
    let mut acc = 1.0;
    for l in 0..j {
        acc = acc * (n - l) as f64 / (l + 1) as f64;
    }
    acc
}

/// Bernoulli numbers B_0..B_k, B_1 = -1/2 convention.
fn bernoulli_numbers(k: usize) -> Vec<f64> {
    let mut b = vec![0.0; k + 1];
    b[0] = 1.0;
    for m in 1..=k {
        let mut acc = 0.0;
        for j in 0..m {
            acc += binomial(m + 1, j) * b[j];
        }
        b[m] = -acc / (m + 1) as f64;
    }
    b
}

fn bernoulli_poly(k: usize, x: f64) -> f64 {
    let b = bernoulli_numbers(k);
    let mut acc = 0.0;
    for j in 0..=k {
        acc += binomial(k, j) * b[j] * x.powi((k - j) as i32);
    }
    acc
}

/// sum over n != 0 of exp(2 pi i b n) / n^k via the Fourier expansion of the
/// Bernoulli polynomial: the value is -(2 pi i)^k B_k({b}) / k! for k >= 2.
pub fn zero_row_sum(k: usize, b: f64) -> Complex64 {
    assert!(k >= 2);
    let x = b.rem_euclid(1.0);
    -(two_pi_i().powu(k as u32)) * bernoulli_poly(k, x) / factorial(k)
}

/// The absolutely convergent lattice sum
///     sum over (m, n) in Z^2 of 1 / ((x + m) tau + (y + n))^k,     k >= 3,
/// with the (0,0) term omitted when (x, y) = (0, 0).
///
/// Rows are summed in closed form and the row cutoff starts at
/// `prec.lattice_radius`, doubling until two successive values differ by
/// less than `prec.q_tail_eps`.
pub fn lattice_sum(
    k: usize,
    offset: (f64, f64),
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    prec.validate()?;
    if k < 3 {
        return Err(Error::Domain(format!(
            "lattice_sum needs k >= 3 (got {k}); conditionally convergent weights are handled elsewhere"
        )));
    }
    let (x, y) = offset;
    if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("offset ({x}, {y}) must lie in [0,1)^2")));
    }
    let t = tau.get();
    let row = |m: i64| -> Complex64 {
        if x == 0.0 && m == 0 {
            if y == 0.0 {
                zero_row_sum(k, 0.0)
            } else {
                twisted_row_sum(k, Complex64::new(y, 0.0), 0.0)
            }
        } else {
            twisted_row_sum(k, (x + m as f64) * t + y, 0.0)
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
            return Err(Error::Domain(
                "lattice sum failed to converge under cutoff doubling".into(),
            ));
        }
    }
}

/// Enumeration order for the reference double sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummationOrder {
    SquareShells,
    Spiral,
}

/// Direct double sum over the square max(|m|, |n|) <= radius, in the given
/// enumeration order. Reference implementation for cross-checks; truncation
/// error decays only polynomially in the radius.
pub fn lattice_sum_direct(
    k: usize,
    offset: (f64, f64),
    tau: &UpperHalfPoint,
    radius: i64,
    order: SummationOrder,
) -> Complex64 {
    let (x, y) = offset;
    let t = tau.get();
    let term = |m: i64, n: i64| -> Complex64 {
        if x == 0.0 && y == 0.0 && m == 0 && n == 0 {
            return ZERO;
        }
        ((x + m as f64) * t + (y + n as f64)).powi(-(k as i32))
    };
    let mut sum = ZERO;
    match order {
        SummationOrder::SquareShells => {
            sum += term(0, 0);
            for s in 1..=radius {
                for m in -s..=s {
                    sum += term(m, s) + term(m, -s);
                }
                for n in (-s + 1)..=(s - 1) {
                    sum += term(s, n) + term(-s, n);
                }
            }
        }
        SummationOrder::Spiral => {
            // outward rectangular spiral covering the same square
            let (mut m, mut n) = (0i64, 0i64);
            sum += term(m, n);
            let mut step = 1i64;
            'outer: loop {
                for _ in 0..step {
                    m += 1;
                    if m.abs().max(n.abs()) > radius {
                        break 'outer;
                    }
                    sum += term(m, n);
                }
                for _ in 0..step {
                    n += 1;
                    sum += term(m, n);
                }
                step += 1;
                for _ in 0..step {
                    m -= 1;
                    sum += term(m, n);
                }
                for _ in 0..step {
                    n -= 1;
                    sum += term(m, n);
                }
                step += 1;
            }
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn upper_half_point_rejects_lower_half() {
        assert!(UpperHalfPoint::new(Complex64::new(0.3, -1.0)).is_err());
        assert!(UpperHalfPoint::new(Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn precision_validation() {
        let mut p = Precision::default();
        assert!(p.validate().is_ok());
        p.quad_points = 100;
        assert!(p.validate().is_err());
        p.quad_points = 16;
        p.lattice_radius = 2;
        assert!(p.validate().is_err());
    }

    #[test]
    fn cauchy_simple_pole() {
        let prec = Precision::default();
        let lau = cauchy_coefficients(|w| 1.0 / w, ZERO, 0.7, 1, 8, &prec).unwrap();
        assert!((lau.residue() - ONE).norm() < 1e-12);
        for k in 0..=8 {
            assert!(lau.coefficient(k).norm() < 1e-12, "c_{k} not small");
        }
    }

    #[test]
    fn cauchy_exponential_taylor() {
        let prec = Precision::default();
        let lau = cauchy_coefficients(|w| w.exp(), ZERO, 1.0, 0, 10, &prec).unwrap();
        for k in 0..=10usize {
            let expected = 1.0 / factorial(k);
            assert!(
                (lau.coefficient(k as i64) - expected).norm() < 1e-12,
                "exp coefficient {k}"
            );
        }
    }

    #[test]
    fn cauchy_recovers_random_polynomials() {
        use rand::prelude::*;
        let prec = Precision::default();
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..10 {
            let deg = rng.random_range(3..=12);
            let coeffs: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let center = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let f = |w: Complex64| {
                coeffs
                    .iter()
                    .rev()
                    .fold(ZERO, |acc, &c| acc * (w - center) + c)
            };
            let lau = cauchy_coefficients(&f, center, 0.9, 0, deg, &prec).unwrap();
            for (kk, &c) in coeffs.iter().enumerate() {
                let got = lau.coefficient(kk as i64);
                let scale = c.norm().max(1.0);
                assert!((got - c).norm() / scale < 1e-10, "degree {kk}");
            }
        }
    }

    #[test]
    fn laurent_taylor_product() {
        // (1/w + 2 + 3w) * (1 + w + w^2/2) has c_-1 = 1, c_0 = 3, c_1 = 5.5
        let lau = TruncatedLaurent::new(
            1,
            vec![ONE, Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)],
            ZERO,
            0.5,
        );
        let taylor = [ONE, ONE, Complex64::new(0.5, 0.0)];
        let prod = lau.mul_taylor(&taylor);
        assert_eq!(prod.pole_order(), 1);
        assert!((prod.coefficient(-1) - 1.0).norm() < 1e-15);
        assert!((prod.coefficient(0) - 3.0).norm() < 1e-15);
        assert!((prod.coefficient(1) - 5.5).norm() < 1e-15);
        // degrees beyond the reliable window are dropped, not fabricated
        assert!(prod.trunc_degree() <= 1);
    }

    #[test]
    fn cauchy_reports_nonfinite_node() {
        let prec = Precision::default();
        // pole sits on the contour
        let err = cauchy_coefficients(|w| 1.0 / (w - 0.5), ZERO, 0.5, 0, 2, &prec);
        match err {
            Err(Error::NonFinite { .. }) => {}
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_saturation_under_node_doubling() {
        let prec = Precision::default();
        let mut prec2 = prec;
        prec2.quad_points = 2 * prec.quad_points;
        let f = |w: Complex64| (w.exp() + 1.0) / (w - Complex64::new(2.0, 1.0));
        let a = cauchy_coefficients(f, ZERO, 0.8, 0, 6, &prec).unwrap();
        let b = cauchy_coefficients(f, ZERO, 0.8, 0, 6, &prec2).unwrap();
        for k in 0..=6 {
            assert!(
                (a.coefficient(k) - b.coefficient(k)).norm() < prec.q_tail_eps,
                "coefficient {k} moved under node doubling"
            );
        }
    }

    #[test]
    fn derivative_of_square() {
        let prec = Precision::default();
        let d = holomorphic_derivative(|z| z * z, ONE, 1, 1.0, &prec).unwrap();
        assert!((d - 2.0).norm() < 1e-12);
    }

    #[test]
    fn derivative_rejects_bad_distance() {
        let prec = Precision::default();
        assert!(holomorphic_derivative(|z| z, ZERO, 1, 0.0, &prec).is_err());
        assert!(holomorphic_derivative(|z| z, ZERO, 1, -1.0, &prec).is_err());
    }

    #[test]
    fn row_sum_matches_cotangent_forms() {
        let w = Complex64::new(0.31, -0.27);
        let pw = PI * w;
        let s2 = PI * PI / (pw.sin() * pw.sin());
        assert!((twisted_row_sum(2, w, 0.0) - s2).norm() < 1e-11);
        let s3 = PI.powi(3) * pw.cos() / pw.sin().powi(3);
        assert!((twisted_row_sum(3, w, 0.0) - s3).norm() < 1e-10);
    }

    #[test]
    fn row_sum_matches_partial_sums() {
        for (k, b, w) in [
            (3usize, 0.37, Complex64::new(0.4, 0.9)),
            (4, 0.0, Complex64::new(-0.2, -1.1)),
            (4, 0.81, Complex64::new(0.15, 0.4)),
        ] {
            let mut direct = ZERO;
            let cap = 30_000i64;
            for n in -cap..=cap {
                direct += (two_pi_i() * b * n as f64).exp() * (w + n as f64).powi(-(k as i32));
            }
            let closed = twisted_row_sum(k, w, b);
            assert!(
                (closed - direct).norm() < 1e-8,
                "k={k} b={b}: {closed} vs {direct}"
            );
        }
    }

    #[test]
    fn zero_row_matches_partial_sums() {
        let b = 0.23;
        let mut direct = ZERO;
        for n in 1..=30_000i64 {
            let nf = n as f64;
            direct += (two_pi_i() * b * nf).exp() / nf.powi(3);
            direct += (-two_pi_i() * b * nf).exp() / (-nf).powi(3);
        }
        assert!((zero_row_sum(3, b) - direct).norm() < 1e-8);
        // untwisted even weight gives 2 zeta(4)
        let z4 = PI.powi(4) / 90.0;
        assert!((zero_row_sum(4, 0.0) - 2.0 * z4).norm() < 1e-12);
    }

    #[test]
    fn lattice_sum_odd_weight_cancels_at_origin() {
        let prec = Precision::default();
        let v = lattice_sum(3, (0.0, 0.0), &tau(0.0, 1.0), &prec).unwrap();
        assert!(v.norm() < 1e-10, "odd weight at (0,0) should cancel, got {v}");
    }

    #[test]
    fn lattice_sum_saturates_under_cutoff_doubling() {
        let mut prec = Precision::default();
        let t = tau(0.0, 1.0);
        let a = lattice_sum(4, (0.0, 0.0), &t, &prec).unwrap();
        prec.lattice_radius *= 2;
        let b = lattice_sum(4, (0.0, 0.0), &t, &prec).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn lattice_sum_odd_offset_antisymmetry() {
        let prec = Precision::default();
        let t = tau(0.0, 2.0);
        let a = lattice_sum(3, (1.0 / 3.0, 0.0), &t, &prec).unwrap();
        let b = lattice_sum(3, (2.0 / 3.0, 0.0), &t, &prec).unwrap();
        assert!((a + b).norm() < 1e-9, "substitution (m,n) -> (-m-1,-n): {a} vs {b}");
    }

    #[test]
    fn lattice_sum_rejects_low_weight() {
        let prec = Precision::default();
        assert!(lattice_sum(2, (0.0, 0.0), &tau(0.0, 1.0), &prec).is_err());
    }

    #[test]
    fn direct_orders_agree_and_match_closed_form() {
        let t = tau(0.0, 1.0);
        // same index set in two enumeration orders: identical up to rounding
        let sq = lattice_sum_direct(4, (0.0, 0.0), &t, 40, SummationOrder::SquareShells);
        let sp = lattice_sum_direct(4, (0.0, 0.0), &t, 40, SummationOrder::Spiral);
        assert!((sq - sp).norm() < 1e-9);
        // direct square truncation approaches the closed-form value at its
        // own polynomial rate
        let prec = Precision::default();
        let exact = lattice_sum(6, (0.0, 0.0), &t, &prec).unwrap();
        let direct = lattice_sum_direct(6, (0.0, 0.0), &t, 64, SummationOrder::SquareShells);
        assert!((exact - direct).norm() < 1e-7);
    }

    #[test]
    fn lattice_distance_basics() {
        let t = tau(0.3, 1.2);
        assert!(lattice_distance(ZERO, &t) < 1e-15);
        assert!(lattice_distance(t.get(), &t) < 1e-15);
        let z = 0.5 * t.get() + 0.5;
        let d = lattice_distance(z, &t);
        assert!(d > 0.4, "interior point should be far from the lattice, d = {d}");
    }
}
