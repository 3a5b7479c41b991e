//! Level-N Eisenstein series and modular forms.
//!
//! For torsion data (x, y) mod N the weight-k series are
//!
//!   E^(k)_{x/N, y/N}(tau) = (-1)^k (k-1)! (2 pi i)^(-k)
//!                           * sum_{(m,n)} ((x/N) tau + y/N + m tau + n)^(-k),  k >= 3,
//!
//! with the (0,0) term dropped when (x, y) = (0, 0); the weight-two values
//! use the Weierstrass route
//!
//!   E~^(2)_{x/N, y/N}(tau) = (2 pi i)^(-2) p((x tau + y)/N, tau),   E~^(2)_{0,0} = 0.
//!
//! The level-N forms are the finite character sums
//!
//!   F^(k)_{a/N, b/N}(tau) = N^(-k) sum_{(x,y) in (Z/N)^2} zeta_N^(x b - y a) E^(k)_{x/N, y/N}(tau)
//!
//! (weight-two with the tilde values), and the D-variant is
//!
//!   _D F^(k) = D^2 F^(k)_{a/N, b/N} - D^(2-k) F^(k)_{Da/N, Db/N}.
//!
//! Weight 1 is not Hecke-summed here: it is routed through the
//! Eisenstein-Kronecker function e_1, which the `route` tag records.

use crate::error::{Error, Result};
use crate::jacobi::eisenstein_kronecker_e;
use crate::numeric::{factorial, lattice_sum, two_pi_i, Precision, UpperHalfPoint, ZERO};
use crate::theta::weierstrass_sigma_zeta_p;
use num_complex::Complex64;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Which computation produced a modular value; kept so tests can pair
/// genuinely independent routes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Lattice,
    Wp,
    Kronecker,
}

/// An evaluation of a level-N modular form, tagged with its metadata.
#[derive(Clone, Copy, Debug)]
pub struct ModularValue {
    pub value: Complex64,
    pub weight: usize,
    pub level: i64,
    pub torsion: (i64, i64),
    pub route: Route,
}

/// E^(k)_{x/N, y/N}(tau). Weight two returns the tilde-normalized value.
pub fn eisenstein_e(
    k: usize,
    x: i64,
    y: i64,
    level: i64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    if level < 1 {
        return Err(Error::Domain("level must be positive".into()));
    }
    if k < 2 {
        return Err(Error::Unsupported(
            "weight 1 has no direct summation route; use the Kronecker route through F^(1)".into(),
        ));
    }
    let xr = x.rem_euclid(level);
    let yr = y.rem_euclid(level);
    if k == 2 {
        if xr == 0 && yr == 0 {
            // tilde convention
            return Ok(ZERO);
        }
        let point = ((xr as f64) * tau.get() + yr as f64) / level as f64;
        let (_, _, p) = weierstrass_sigma_zeta_p(point, tau, prec)?;
        return Ok(p / (two_pi_i() * two_pi_i()));
    }
    let offset = (xr as f64 / level as f64, yr as f64 / level as f64);
    let sum = lattice_sum(k, offset, tau, prec)?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * factorial(k - 1) * sum / two_pi_i().powu(k as u32))
}

/// F^(k)_{a/N, b/N}(tau). Requires (a, b) nonzero mod N.
pub fn modular_f(
    k: usize,
    a: i64,
    b: i64,
    level: i64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<ModularValue> {
    if level < 3 {
        return Err(Error::Domain(format!("level N = {level} must be >= 3")));
    }
    if a.rem_euclid(level) == 0 && b.rem_euclid(level) == 0 {
        return Err(Error::Domain(format!(
            "torsion index ({a}, {b}) vanishes mod {level}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("weight must be >= 1".into()));
    }
    if k == 1 {
        // Kronecker route: e_1(a tau/N + b/N, tau) = -2 pi i F^(1), inverted
        let point = ((a.rem_euclid(level) as f64) * tau.get() + b.rem_euclid(level) as f64)
            / level as f64;
        let e1 = eisenstein_kronecker_e(1, point, tau, prec)?;
        return Ok(ModularValue {
            value: -e1 / two_pi_i(),
            weight: 1,
            level,
            torsion: (a, b),
            route: Route::Kronecker,
        });
    }
    // zeta_N powers cached for the whole character sum
    let n = level as usize;
    let zeta_pow: Vec<Complex64> = (0..n)
        .map(|j| (two_pi_i() * (j as f64) / level as f64).exp())
        .collect();
    let mut sum = ZERO;
    for x in 0..level {
        for y in 0..level {
            let e = eisenstein_e(k, x, y, level, tau, prec)?;
            if e == ZERO {
                continue;
            }
            let phase = (x * b - y * a).rem_euclid(level) as usize;
            sum += zeta_pow[phase] * e;
        }
    }
    let scale = (level as f64).powi(-(k as i32));
    Ok(ModularValue {
        value: scale * sum,
        weight: k,
        level,
        torsion: (a, b),
        route: if k == 2 { Route::Wp } else { Route::Lattice },
    })
}

/// The D-variant _D F^(k)_{a/N, b/N} = D^2 F^(k)_{a/N,b/N} - D^(2-k) F^(k)_{Da/N,Db/N}.
/// Requires gcd(D, N) = 1 so that (Da, Db) stays nonzero mod N.
pub fn modular_df(
    k: usize,
    a: i64,
    b: i64,
    level: i64,
    d: i64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<ModularValue> {
    if gcd(d, level) != 1 {
        return Err(Error::Domain(format!(
            "gcd(D, N) = gcd({d}, {level}) != 1: (Da, Db) could vanish mod N"
        )));
    }
    let f1 = modular_f(k, a, b, level, tau, prec)?;
    let f2 = modular_f(k, d * a, d * b, level, tau, prec)?;
    let df = d as f64;
    let value = df * df * f1.value - df.powi(2 - k as i32) * f2.value;
    Ok(ModularValue {
        value,
        weight: k,
        level,
        torsion: (a, b),
        route: f1.route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn odd_weight_zero_offset_cancels() {
        let prec = Precision::default();
        let v = eisenstein_e(3, 0, 0, 3, &tau(0.0, 1.0), &prec).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn weight_four_saturates_under_cutoff_doubling() {
        let prec = Precision::default();
        let mut coarse = prec;
        coarse.lattice_radius = 8;
        let t = tau(0.0, 1.0);
        let a = eisenstein_e(4, 0, 0, 3, &t, &prec).unwrap();
        let b = eisenstein_e(4, 0, 0, 3, &t, &coarse).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn weight_two_is_weierstrass() {
        let prec = Precision::default();
        let t = tau(0.0, 1.7);
        let v = eisenstein_e(2, 1, 0, 4, &t, &prec).unwrap();
        let (_, _, p) = weierstrass_sigma_zeta_p(t.get() / 4.0, &t, &prec).unwrap();
        let expected = p / (two_pi_i() * two_pi_i());
        assert!((v - expected).norm() < 1e-9);
        // tilde convention at the zero class
        assert_eq!(eisenstein_e(2, 0, 0, 4, &t, &prec).unwrap(), ZERO);
        assert_eq!(eisenstein_e(2, 4, 8, 4, &t, &prec).unwrap(), ZERO);
    }

    #[test]
    fn weight_one_unsupported_directly() {
        let prec = Precision::default();
        assert!(eisenstein_e(1, 1, 0, 3, &tau(0.0, 1.0), &prec).is_err());
    }

    #[test]
    fn f_depends_only_on_residues() {
        let prec = Precision::default();
        let t = tau(0.2, 1.3);
        for k in [1usize, 2, 3, 4] {
            let a = modular_f(k, 1, 2, 5, &t, &prec).unwrap().value;
            let b = modular_f(k, 6, 2, 5, &t, &prec).unwrap().value;
            let c = modular_f(k, 1, -3, 5, &t, &prec).unwrap().value;
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0), "weight {k} (a+N, b)");
            assert!((a - c).norm() < 1e-12 * a.norm().max(1.0), "weight {k} (a, b-N)");
        }
    }

    #[test]
    fn f_rejects_zero_torsion() {
        let prec = Precision::default();
        assert!(modular_f(3, 0, 0, 4, &tau(0.0, 1.0), &prec).is_err());
        assert!(modular_f(3, 4, 8, 4, &tau(0.0, 1.0), &prec).is_err());
    }

    #[test]
    fn bridge_to_kronecker_functions() {
        // e_k(a tau/N + b/N, tau) = (-1)^k (2 pi i)^k / (k-1)! * F^(k)
        let prec = Precision::default();
        for t in [tau(0.0, 2.0), tau(1.0 / 3.0, 1.5)] {
            for (level, a, b) in [(3i64, 1i64, 0i64), (4, 1, 1), (5, 2, 3)] {
                let point = ((a as f64) * t.get() + b as f64) / level as f64;
                for k in 2..=6usize {
                    let e = eisenstein_kronecker_e(k, point, &t, &prec).unwrap();
                    let f = modular_f(k, a, b, level, &t, &prec).unwrap().value;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let scale = sign * two_pi_i().powu(k as u32) / factorial(k - 1);
                    assert!(
                        (e - scale * f).norm() < 1e-7 * e.norm().max(1.0),
                        "bridge k={k}, N={level}, (a,b)=({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn character_sum_orthogonality() {
        // sum over (x, y) of zeta_N^(x b - y a) = 0 for (a, b) nonzero mod N
        for level in [3i64, 4, 5] {
            for (a, b) in [(1i64, 0i64), (0, 1), (1, 2)] {
                let mut sum = ZERO;
                for x in 0..level {
                    for y in 0..level {
                        let phase = (x * b - y * a).rem_euclid(level) as f64;
                        sum += (two_pi_i() * phase / level as f64).exp();
                    }
                }
                assert!(sum.norm() < 1e-12, "orthogonality N={level} (a,b)=({a},{b})");
            }
        }
    }

    #[test]
    fn df_congruent_d_collapses() {
        // D = 1 mod N: _D F^(k) = (D^2 - D^(2-k)) F^(k)
        let prec = Precision::default();
        let t = tau(0.1, 1.4);
        let (level, d) = (4i64, 5i64);
        for k in [2usize, 3, 4] {
            let f = modular_f(k, 1, 2, level, &t, &prec).unwrap().value;
            let df = modular_df(k, 1, 2, level, d, &t, &prec).unwrap().value;
            let factor = (d * d) as f64 - (d as f64).powi(2 - k as i32);
            assert!(
                (df - factor * f).norm() < 1e-12 * df.norm().max(1.0),
                "weight {k}"
            );
        }
    }

    #[test]
    fn df_depends_on_d() {
        let prec = Precision::default();
        let t = tau(0.0, 1.2);
        let a = modular_df(3, 1, 0, 4, 3, &t, &prec).unwrap().value;
        let b = modular_df(3, 1, 0, 4, 7, &t, &prec).unwrap().value;
        assert!((a - b).norm() > 1e-6, "D-dependence must be genuine");
    }

    #[test]
    fn df_rejects_common_factor() {
        let prec = Precision::default();
        assert!(modular_df(3, 1, 0, 4, 2, &tau(0.0, 1.0), &prec).is_err());
    }

    #[test]
    fn weight_one_route_is_tagged() {
        let prec = Precision::default();
        let v = modular_f(1, 1, 0, 4, &tau(0.0, 1.5), &prec).unwrap();
        assert_eq!(v.route, Route::Kronecker);
        assert!(v.value.norm() > 0.0);
        let w = modular_f(2, 1, 0, 4, &tau(0.0, 1.5), &prec).unwrap();
        assert_eq!(w.route, Route::Wp);
        let x = modular_f(4, 1, 0, 4, &tau(0.0, 1.5), &prec).unwrap();
        assert_eq!(x.route, Route::Lattice);
    }
}
