//! One-variable special functions on C x H: the elementary theta function,
//! Weierstrass sigma / zeta / p, the quasi-period eta(., tau), the Dedekind
//! eta function and theta_11.
//!
//! The elementary theta function is normalized so that its Taylor expansion
//! at z = 0 starts with z, its zero divisor is exactly the lattice
//! Z*tau + Z, and it satisfies
//!
//!   theta((z + m tau + n)/(c tau + d), (a tau + b)/(c tau + d))
//!     = (c tau + d)^(-1)
//!       * exp(pi i c (z + m tau + n)^2 / (c tau + d)
//!             + pi i (m + n) - 2 pi i m z - pi i m^2 tau) * theta(z, tau)
//!
//! for every integer shift (m, n) and every matrix (a b; c d) in SL2(Z).

use crate::deck::DeckElement;
use crate::error::{Error, Result};
use crate::numeric::{
    cauchy_coefficients, lattice_distance, pi_i, two_pi_i, Precision, UpperHalfPoint, ONE, ZERO,
};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Fixed interior base point used when a quasi-period is read off as a
/// zeta-function difference; any point off the lattice works.
fn quasi_period_base(tau: &UpperHalfPoint) -> Complex64 {
    0.2813 * tau.get() + 0.3172
}

/// eta(1, tau) = -G_2(tau), via the weight-two q-series
/// G_2 = pi^2/3 - 8 pi^2 sum_{n>=1} sigma_1(n) q^n.
pub fn eta_one(tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let q = tau.q();
    let qn_abs = q.norm();
    let mut sum = ZERO;
    let mut qpow = ONE;
    let mut n = 1usize;
    loop {
        qpow *= q;
        let mut sigma1 = 0u64;
        for d in 1..=n {
            if n % d == 0 {
                sigma1 += d as u64;
            }
        }
        sum += qpow * sigma1 as f64;
        // sigma_1(n) <= n^2, so the tail is dominated by a geometric series
        if (n * n) as f64 * qn_abs.powi(n as i32 + 1) / (1.0 - qn_abs) < 0.01 * prec.q_tail_eps {
            break;
        }
        n += 1;
        if n > 40_000 {
            break;
        }
    }
    let g2 = PI * PI / 3.0 - 8.0 * PI * PI * sum;
    -g2
}

/// d/dtau of eta(1, tau), by differentiating the q-series term by term.
pub fn partial_tau_eta_one(tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let q = tau.q();
    let qn_abs = q.norm();
    let mut sum = ZERO;
    let mut qpow = ONE;
    let mut n = 1usize;
    loop {
        qpow *= q;
        let mut sigma1 = 0u64;
        for d in 1..=n {
            if n % d == 0 {
                sigma1 += d as u64;
            }
        }
        sum += qpow * (sigma1 as f64 * n as f64);
        if (n * n * n) as f64 * qn_abs.powi(n as i32 + 1) / (1.0 - qn_abs) < 0.01 * prec.q_tail_eps
        {
            break;
        }
        n += 1;
        if n > 40_000 {
            break;
        }
    }
    8.0 * PI * PI * two_pi_i() * sum
}

/// G_2(tau) summed as an Eisenstein series with the inner sum in closed
/// cotangent form: G_2 = pi^2/3 + 2 pi^2 sum_{m>=1} csc^2(pi m tau).
/// Independent cross-route for `eta_one`.
pub fn g2_eisenstein_oracle(tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let t = tau.get();
    let mut sum = Complex64::new(PI * PI / 3.0, 0.0);
    let mut m = 1i64;
    loop {
        // csc^2(pi m tau) decays like 4 exp(-2 pi m Im tau)
        let w = PI * (m as f64) * t;
        let s = w.sin();
        let term = 2.0 * PI * PI / (s * s);
        sum += term;
        if term.norm() < 0.01 * prec.q_tail_eps && m > 2 {
            break;
        }
        m += 1;
        if m > 4000 {
            break;
        }
    }
    sum
}

/// A quasi-period value eta(m tau + n, tau) together with the lattice point
/// it belongs to. The map is additive: eta(m tau + n) = m eta(tau) + n eta(1).
#[derive(Clone, Copy, Debug)]
pub struct QuasiPeriodValue {
    pub value: Complex64,
    pub lattice_point: (i64, i64),
}

/// Quasi-period eta(m tau + n, tau) = zeta(z, tau) - zeta(z + m tau + n, tau).
pub fn quasi_period(
    m: i64,
    n: i64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<QuasiPeriodValue> {
    let z0 = quasi_period_base(tau);
    let shift = (m as f64) * tau.get() + n as f64;
    let (_, z1, _) = weierstrass_sigma_zeta_p(z0, tau, prec)?;
    let (_, z2, _) = weierstrass_sigma_zeta_p(z0 + shift, tau, prec)?;
    Ok(QuasiPeriodValue {
        value: z1 - z2,
        lattice_point: (m, n),
    })
}

/// eta(tau, tau), read off as a zeta difference. Together with the q-series
/// route for eta(1, tau) this gives a two-route check of the Legendre
/// relation eta(tau, tau) = 2 pi i + tau * eta(1, tau).
pub fn eta_tau(tau: &UpperHalfPoint, prec: &Precision) -> Result<Complex64> {
    Ok(quasi_period(1, 0, tau, prec)?.value)
}

/// Reduce z modulo the lattice to |Im z0| <= Im tau / 2, |Re z0| <= 1/2-ish.
fn lattice_reduce(z: Complex64, tau: &UpperHalfPoint) -> (Complex64, i64, i64) {
    let t = tau.get();
    let m = (z.im / t.im).round() as i64;
    let z1 = z - (m as f64) * t;
    let n = z1.re.round() as i64;
    (z1 - n as f64, m, n)
}

/// Product evaluation on the reduced stripe:
/// theta(z) = sin(pi z)/pi * prod_{n>=1} (1-q^n q_z)(1-q^n/q_z)/(1-q^n)^2.
fn theta_reduced(z0: Complex64, tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let q = tau.q();
    let qz = (two_pi_i() * z0).exp();
    let qz_inv = 1.0 / qz;
    let mut prod = (PI * z0).sin() / PI;
    let mut qn = ONE;
    let scale = qz.norm().max(qz_inv.norm()) + 1.0;
    let mut n = 0usize;
    loop {
        qn *= q;
        n += 1;
        let a = ONE - qn * qz;
        let b = ONE - qn * qz_inv;
        let c = ONE - qn;
        prod *= a * b / (c * c);
        let tail = qn.norm() * q.norm() * scale;
        if tail < 0.02 * prec.q_tail_eps && n >= 2 {
            break;
        }
        if n > 2_000_000 {
            break;
        }
    }
    prod
}

/// The elementary theta function theta(z, tau). Entire in z, zero divisor
/// Z*tau + Z, with theta(z, tau) = z + higher order terms at z = 0.
///
/// z is lattice-reduced before the product is evaluated and the
/// quasi-periodicity factor for the identity matrix is multiplied back.
pub fn theta_elementary(z: Complex64, tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let (z0, m, n) = lattice_reduce(z, tau);
    let base = theta_reduced(z0, tau, prec);
    if m == 0 && n == 0 {
        return base;
    }
    // theta(z0 + m tau + n) = exp(pi i (m+n) - 2 pi i m z0 - pi i m^2 tau) theta(z0)
    let mf = m as f64;
    let nf = n as f64;
    let expo = pi_i() * (mf + nf) - two_pi_i() * mf * z0 - pi_i() * mf * mf * tau.get();
    expo.exp() * base
}

/// Closed-form covariance factor of the elementary theta function for a deck
/// element ((m, n), gamma): theta(deck * (z, tau)) = factor * theta(z, tau).
pub fn theta_transform_factor(
    z: Complex64,
    tau: &UpperHalfPoint,
    deck: &DeckElement,
) -> Complex64 {
    let (m, n) = deck.shift();
    let [[_, _], [c, d]] = deck.gamma();
    let t = tau.get();
    let mf = m as f64;
    let nf = n as f64;
    let cd = (c as f64) * t + d as f64;
    let zs = z + mf * t + nf;
    let expo = pi_i() * (c as f64) * zs * zs / cd + pi_i() * (mf + nf)
        - two_pi_i() * mf * z
        - pi_i() * mf * mf * t;
    expo.exp() / cd
}

/// Predicted value of theta at the deck-transformed point, computed from
/// theta(z, tau) and the closed-form factor. Compare against direct
/// evaluation to test the transformation law.
pub fn theta_transform(
    z: Complex64,
    tau: &UpperHalfPoint,
    deck: &DeckElement,
    prec: &Precision,
) -> Complex64 {
    theta_transform_factor(z, tau, deck) * theta_elementary(z, tau, prec)
}

/// Local Taylor data of theta at z: (theta, theta', theta'').
fn theta_taylor(
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<(Complex64, Complex64, Complex64)> {
    let dist = lattice_distance(z, tau).min(1.0).max(1e-3);
    let radius = prec.deriv_radius_frac * dist;
    let tt = *tau;
    let pp = *prec;
    let lau = cauchy_coefficients(
        move |w| theta_elementary(w, &tt, &pp),
        z,
        radius,
        0,
        2,
        prec,
    )?;
    Ok((
        lau.coefficient(0),
        lau.coefficient(1),
        lau.coefficient(2) * 2.0,
    ))
}

/// Weierstrass sigma, zeta and p at z:
///   sigma = exp(-z^2 eta(1,tau)/2) * theta(z, tau),
///   zeta  = theta'/theta - eta(1,tau) * z,
///   p     = -zeta' (read off the same Cauchy circle).
pub fn weierstrass_sigma_zeta_p(
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<(Complex64, Complex64, Complex64)> {
    let dist = lattice_distance(z, tau);
    if dist < prec.q_tail_eps {
        return Err(Error::PoleProximity {
            point: z,
            distance: dist,
            divisor: "Z tau + Z".into(),
        });
    }
    let eta1 = eta_one(tau, prec);
    let (t0, t1, t2) = theta_taylor(z, tau, prec)?;
    let sigma = (-z * z * eta1 / 2.0).exp() * t0;
    let zeta = t1 / t0 - eta1 * z;
    // zeta' = (theta''theta - theta'^2)/theta^2 - eta1, and p = -zeta'
    let p = -(t2 * t0 - t1 * t1) / (t0 * t0) + eta1;
    Ok((sigma, zeta, p))
}

/// Dedekind eta function exp(2 pi i tau / 24) * prod (1 - q^n).
pub fn dedekind_eta(tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let q = tau.q();
    let mut prod = (two_pi_i() * tau.get() / 24.0).exp();
    let mut qn = ONE;
    let mut n = 0usize;
    loop {
        qn *= q;
        n += 1;
        prod *= ONE - qn;
        if qn.norm() * q.norm() < 0.02 * prec.q_tail_eps && n >= 2 {
            break;
        }
        if n > 2_000_000 {
            break;
        }
    }
    prod
}

/// Riemann theta with characteristic (1/2, 1/2):
/// theta_11(z, tau) = sum_n exp(pi i (n + 1/2)^2 tau + 2 pi i (n + 1/2)(z + 1/2)).
pub fn theta11(z: Complex64, tau: &UpperHalfPoint, prec: &Precision) -> Complex64 {
    let t = tau.get();
    let term = |n: i64| -> Complex64 {
        let h = n as f64 + 0.5;
        (pi_i() * h * h * t + two_pi_i() * h * (z + 0.5)).exp()
    };
    // centre the window where the Gaussian weight peaks
    let centre = (-z.im / t.im - 0.5).round() as i64;
    let mut sum = term(centre);
    let peak = sum.norm().max(1e-300);
    let mut k = 1i64;
    loop {
        let up = term(centre + k);
        let dn = term(centre - k);
        sum += up + dn;
        if (up.norm() + dn.norm()) < 0.01 * prec.q_tail_eps * peak && k >= 3 {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    sum
}
