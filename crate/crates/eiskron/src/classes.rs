//! De Rham Eisenstein class coefficients in the fixed analytic
//! trivializations.
//!
//! Cohomology classes are carried as their canonical representatives: a
//! weight-(n+2) form f(tau) sits on the dtau (x) omega^n slot with scalar
//! coefficient f(tau)/(2 pi i), the division by 2 pi i being the
//! Kodaira-Spencer normalization omega^2 -> Omega^1, g -> g/(2 pi i).
//!
//! The Eisenstein class evaluated at the torsion section (a, b) has
//! weight-form
//!
//!   n = 0:   N^(-1) F^(2)_{a/N, b/N},
//!   n >= 1:  -N^(n-1) (-1)^n / n!  F^(n+2)_{a/N, b/N},
//!
//! and the D-variant specialization recovers these up to the explicit
//! factor (D^(n+2) - 1)/D^n when D = 1 mod N.

use crate::error::{Error, Result};
use crate::numeric::{factorial, two_pi_i, Precision, UpperHalfPoint};
use crate::theta::{eta_one, partial_tau_eta_one};
use num_complex::Complex64;
use std::sync::Arc;

type FormFn = dyn Fn(&UpperHalfPoint, &Precision) -> Result<Complex64> + Send + Sync;

/// Canonical representative of a degree-n class: the weight-(n+2) scalar and
/// its Kodaira-Spencer-normalized dtau (x) omega^n coefficient.
#[derive(Clone)]
pub struct CohomologyRepresentative {
    pub degree: usize,
    pub level: i64,
    pub torsion: Option<(i64, i64)>,
    form: Arc<FormFn>,
}

impl CohomologyRepresentative {
    /// The underlying weight-(n+2) modular form value.
    pub fn weight_form(&self, tau: &UpperHalfPoint, prec: &Precision) -> Result<Complex64> {
        (self.form)(tau, prec)
    }

    /// The scalar multiplying dtau (x) omega^n, i.e. weight_form / (2 pi i).
    pub fn coefficient(&self, tau: &UpperHalfPoint, prec: &Precision) -> Result<Complex64> {
        Ok(self.weight_form(tau, prec)? / two_pi_i())
    }
}

/// Kodaira-Spencer normalization: the square of the canonical differential
/// maps to dtau/(2 pi i), so a weight-two value g becomes g/(2 pi i).
pub fn kodaira_spencer(g: Complex64) -> Complex64 {
    g / two_pi_i()
}

/// The Gauss-Manin connection on rank-two H^1-data (columns over the basis
/// {eta, omega}); the dual action on H-data is in `dvariant`.
pub fn gauss_manin_h1(
    chi: Complex64,
    xi: Complex64,
    dchi: Complex64,
    dxi: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> (Complex64, Complex64) {
    let eta = eta_one(tau, prec);
    let etap = partial_tau_eta_one(tau, prec);
    (
        dchi + eta / two_pi_i() * chi + xi / two_pi_i(),
        dxi + etap * chi - eta * eta / two_pi_i() * chi - eta / two_pi_i() * xi,
    )
}

/// Kodaira-Spencer through the Gauss-Manin route: include omega^2 into
/// omega (x) H^1 as (0, g), apply the connection, and project onto the
/// eta-component. Agrees with `kodaira_spencer` identically; kept as the
/// cross-route for tests.
pub fn kodaira_spencer_via_gauss_manin(
    g: Complex64,
    dg: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Complex64 {
    let (eta_component, _) = gauss_manin_h1(Complex64::new(0.0, 0.0), g, Complex64::new(0.0, 0.0), dg, tau, prec);
    eta_component
}

/// Wrap a weight-(n+2) evaluator as a cohomology representative, after a
/// numerical spot-check of the weight under a few Gamma(N) matrices.
pub fn form_to_representative<F>(
    n: usize,
    f: F,
    level: i64,
    prec: &Precision,
) -> Result<CohomologyRepresentative>
where
    F: Fn(&UpperHalfPoint, &Precision) -> Result<Complex64> + Send + Sync + 'static,
{
    let weight = (n + 2) as i32;
    let test_tau = UpperHalfPoint::new(Complex64::new(0.31, 1.17)).expect("interior point");
    let words: [[[i64; 2]; 2]; 2] = [
        [[1, level], [0, 1]],
        [[1, 0], [level, 1]],
    ];
    for gamma in words {
        let [[a, b], [c, d]] = gamma;
        let t = test_tau.get();
        let cd = (c as f64) * t + d as f64;
        let moved = UpperHalfPoint::new(((a as f64) * t + b as f64) / cd)
            .expect("Moebius image stays upper half");
        let lhs = f(&moved, prec)?;
        let rhs = cd.powi(weight) * f(&test_tau, prec)?;
        let err = (lhs - rhs).norm() / rhs.norm().max(1e-12);
        if err > 1e-6 {
            return Err(Error::WeightCheck { gamma, error: err });
        }
    }
    Ok(CohomologyRepresentative {
        degree: n,
        level,
        torsion: None,
        form: Arc::new(f),
    })
}

/// Weight-form scalar of the degree-n Eisenstein class at torsion (a, b):
/// N^(-1) F^(2) for n = 0, else -N^(n-1) (-1)^n / n! * F^(n+2).
pub fn eisenstein_class_scalar(n: usize, level: i64) -> f64 {
    if n == 0 {
        1.0 / level as f64
    } else {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        -(level as f64).powi(n as i32 - 1) * sign / factorial(n)
    }
}

/// The degree-n de Rham Eisenstein class evaluated at t_{a,b}, as a
/// canonical representative built on modular_f(n+2, a, b, N, tau).
pub fn eisenstein_class_coefficient(
    n: usize,
    a: i64,
    b: i64,
    level: i64,
    prec: &Precision,
) -> Result<CohomologyRepresentative> {
    if a.rem_euclid(level) == 0 && b.rem_euclid(level) == 0 {
        return Err(Error::Domain(format!(
            "torsion index ({a}, {b}) vanishes mod {level}"
        )));
    }
    let scalar = eisenstein_class_scalar(n, level);
    let mut rep = form_to_representative(
        n,
        move |tau: &UpperHalfPoint, p: &Precision| {
            Ok(scalar * crate::eisenstein::modular_f(n + 2, a, b, level, tau, p)?.value)
        },
        level,
        prec,
    )?;
    rep.torsion = Some((a, b));
    Ok(rep)
}
