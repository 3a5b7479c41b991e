//! Level-N combinatorics and the automorphy calculus: the deck group
//! Z^2 x| Gamma(N) acting on C x H, the Poincare factor of automorphy, the
//! Taylor coefficients a_r, and the automorphy matrices A_n describing the
//! logarithm sheaves in their fixed trivializations.
//!
//! Sections of the rank-r(n) sheaf are vectors S of holomorphic functions on
//! C x H transforming as S(d * (z, tau)) = A_n(d, z, tau) * S(z, tau), and
//! every matrix here satisfies the cocycle law
//! A(d1 d2, x) = A(d1, d2 x) * A(d2, x).

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::numeric::{factorial, two_pi_i, Precision, UpperHalfPoint, ZERO};
use num_complex::Complex64;
use rand::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Level data: the level N >= 3, an auxiliary integer D > 1 and the
/// connected-component index j0 with gcd(j0, N) = 1.
#[derive(Clone, Copy, Debug)]
pub struct LevelContext {
    pub level: i64,
    pub d: i64,
    pub j0: i64,
}

impl LevelContext {
    pub fn new(level: i64, d: i64, j0: i64) -> Result<Self> {
        if level < 3 {
            return Err(Error::Domain(format!("level N = {level} must be >= 3")));
        }
        if d < 2 {
            return Err(Error::Domain(format!("D = {d} must be > 1")));
        }
        if gcd(j0, level) != 1 {
            return Err(Error::Domain(format!("component index j0 = {j0} must be coprime to N = {level}")));
        }
        Ok(LevelContext { level, d, j0 })
    }

    /// gcd(D, N) = 1 is required whenever D-variant data is specialized.
    pub fn require_d_coprime(&self) -> Result<()> {
        if gcd(self.d, self.level) != 1 {
            return Err(Error::Domain(format!(
                "gcd(D, N) = gcd({}, {}) != 1",
                self.d, self.level
            )));
        }
        Ok(())
    }
}

/// An N-torsion index (a, b), representing the section a e_1 + b e_2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorsionIndex {
    pub a: i64,
    pub b: i64,
    pub level: i64,
}

impl TorsionIndex {
    pub fn new(a: i64, b: i64, level: i64) -> Self {
        TorsionIndex { a, b, level }
    }

    /// (a, b) not both divisible by N, the standing hypothesis for
    /// Eisenstein specialization.
    pub fn require_nonzero(&self) -> Result<()> {
        if self.a.rem_euclid(self.level) == 0 && self.b.rem_euclid(self.level) == 0 {
            return Err(Error::Domain(format!(
                "torsion index ({}, {}) vanishes mod {}",
                self.a, self.b, self.level
            )));
        }
        Ok(())
    }
}

/// Element ((m, n), gamma) of Z^2 x| Gamma(N), acting on C x H by
/// (z, tau) -> ((z + m tau + n)/(c tau + d), (a tau + b)/(c tau + d)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeckElement {
    shift: (i64, i64),
    gamma: [[i64; 2]; 2],
}

impl DeckElement {
    /// Validates det(gamma) = 1 and gamma congruent to the identity mod
    /// `level`. Pass level 1 for plain SL2(Z) elements.
    pub fn new(shift: (i64, i64), gamma: [[i64; 2]; 2], level: i64) -> Result<Self> {
        let [[a, b], [c, d]] = gamma;
        if a * d - b * c != 1 {
            return Err(Error::NotSl2(gamma));
        }
        if level > 1 {
            let ok = (a - 1).rem_euclid(level) == 0
                && (d - 1).rem_euclid(level) == 0
                && b.rem_euclid(level) == 0
                && c.rem_euclid(level) == 0;
            if !ok {
                return Err(Error::NotLevelCongruent(gamma, level));
            }
        }
        Ok(DeckElement { shift, gamma })
    }

    pub fn identity() -> Self {
        DeckElement {
            shift: (0, 0),
            gamma: [[1, 0], [0, 1]],
        }
    }

    /// Pure translation ((m, n), identity).
    pub fn translation(m: i64, n: i64) -> Self {
        DeckElement {
            shift: (m, n),
            gamma: [[1, 0], [0, 1]],
        }
    }

    pub fn shift(&self) -> (i64, i64) {
        self.shift
    }

    pub fn gamma(&self) -> [[i64; 2]; 2] {
        self.gamma
    }

    /// Group law ((m,n), g) o ((m',n'), g') = ((m',n') + g'^t (m,n), g g').
    pub fn compose(&self, other: &DeckElement) -> DeckElement {
        let (m, n) = self.shift;
        let (mp, np) = other.shift;
        let [[a, b], [c, d]] = other.gamma;
        let shift = (mp + a * m + c * n, np + b * m + d * n);
        let [[a1, b1], [c1, d1]] = self.gamma;
        let gamma = [
            [a1 * a + b1 * c, a1 * b + b1 * d],
            [c1 * a + d1 * c, c1 * b + d1 * d],
        ];
        DeckElement { shift, gamma }
    }

    pub fn inverse(&self) -> DeckElement {
        let [[a, b], [c, d]] = self.gamma;
        let ginv = [[d, -b], [-c, a]];
        // solve ((mi,ni), ginv) with (m,n) + g^t (mi,ni) = 0
        let (m, n) = self.shift;
        // g^t (mi,ni) = (a mi + c ni, b mi + d ni); invert the transpose
        let mi = -(d * m - c * n);
        let ni = -(-b * m + a * n);
        DeckElement {
            shift: (mi, ni),
            gamma: ginv,
        }
    }

    /// c tau + d for the underlying matrix.
    pub fn cz_denominator(&self, tau: &UpperHalfPoint) -> Complex64 {
        let [[_, _], [c, d]] = self.gamma;
        (c as f64) * tau.get() + d as f64
    }

    /// The action on C x H.
    pub fn act(&self, z: Complex64, tau: &UpperHalfPoint) -> (Complex64, UpperHalfPoint) {
        let [[a, b], [c, d]] = self.gamma;
        let t = tau.get();
        let cd = (c as f64) * t + d as f64;
        let (m, n) = self.shift;
        let z_new = (z + (m as f64) * t + n as f64) / cd;
        let t_new = ((a as f64) * t + b as f64) / cd;
        // Im of the image is Im(tau) / |c tau + d|^2 > 0 automatically
        (z_new, UpperHalfPoint::new(t_new).expect("Moebius image stays in the upper half plane"))
    }
}

/// r(n) = (n+1)(n+2)/2, the rank of the degree-n sheaf.
pub fn rank(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Ordered basis labels (i, j) with i + j <= n: j ascending outer, i
/// ascending inner, matching the basis e^(n-i-j) f^i g^j / (n-i-j)!.
pub fn basis_indices(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(rank(n));
    for j in 0..=n {
        for i in 0..=(n - j) {
            out.push((i, j));
        }
    }
    out
}

/// Linear position of the basis label (i, j) in the degree-n ordering.
pub fn basis_position(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i + j <= n);
    // the j-block starts after sum_{j' < j} (n + 1 - j') earlier slots
    j * (n + 1) - j * (j.saturating_sub(1)) / 2 + i
}

/// A single basis slot of the degree-n trivialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisIndex {
    pub n: usize,
    pub i: usize,
    pub j: usize,
}

impl BasisIndex {
    pub fn position(&self) -> usize {
        basis_position(self.n, self.i, self.j)
    }
}

/// Poincare factor of automorphy on C x C^2 x H (independent of the third
/// coordinate):
/// exp(-2 pi i c/(c tau + d) (z + m tau + n)(w + m' tau + n')
///     + 2 pi i m' z + 2 pi i m w + 2 pi i m m' tau).
pub fn poincare_factor(
    shift_z: (i64, i64),
    shift_w: (i64, i64),
    gamma: [[i64; 2]; 2],
    z: Complex64,
    w: Complex64,
    tau: &UpperHalfPoint,
) -> Complex64 {
    let t = tau.get();
    let (m, n) = (shift_z.0 as f64, shift_z.1 as f64);
    let (mp, np) = (shift_w.0 as f64, shift_w.1 as f64);
    let c = gamma[1][0] as f64;
    let d = gamma[1][1] as f64;
    let cd = c * t + d;
    let expo = -two_pi_i() * c / cd * (z + m * t + n) * (w + mp * t + np)
        + two_pi_i() * mp * z
        + two_pi_i() * m * w
        + two_pi_i() * m * mp * t;
    expo.exp()
}

/// Taylor coefficient a_r of the Poincare factor at w = 0 with trivial
/// w-shift: a_r = (1/r!) (2 pi i (d m - c z - c n)/(c tau + d))^r for r >= 0,
/// zero for r < 0.
pub fn a_coefficient(
    r: i64,
    deck: &DeckElement,
    z: Complex64,
    tau: &UpperHalfPoint,
) -> Complex64 {
    if r < 0 {
        return ZERO;
    }
    let (m, n) = deck.shift();
    let [[_, _], [c, d]] = deck.gamma();
    let cd = deck.cz_denominator(tau);
    let base = two_pi_i() * ((d * m) as f64 - (c as f64) * z - (c * n) as f64) / cd;
    base.powu(r as u32) / factorial(r as usize)
}

/// Automorphy matrix of the first logarithm sheaf:
/// rows (1, 0, 0), (2 pi i (dm - cz - cn), c tau + d, 0), (0, 0, 1/(c tau + d)).
pub fn automorphy_a1(deck: &DeckElement, z: Complex64, tau: &UpperHalfPoint) -> CMatrix {
    automorphy_an(1, deck, z, tau)
}

/// Automorphy matrix A_n of the degree-n logarithm sheaf in the Def-ordered
/// basis. The entry at row (i_r, j), column (i_s, j) is
/// a_(i_r - i_s) * (c tau + d)^(i_r - j); entries across different j-blocks
/// vanish.
pub fn automorphy_an(
    n: usize,
    deck: &DeckElement,
    z: Complex64,
    tau: &UpperHalfPoint,
) -> CMatrix {
    let idx = basis_indices(n);
    let r = rank(n);
    let cd = deck.cz_denominator(tau);
    // a_0..a_n once
    let mut a = Vec::with_capacity(n + 1);
    for k in 0..=n as i64 {
        a.push(a_coefficient(k, deck, z, tau));
    }
    let mut m = CMatrix::zeros(r, r);
    for (row, &(ir, jr)) in idx.iter().enumerate() {
        for (col, &(is, js)) in idx.iter().enumerate() {
            if jr != js || ir < is {
                continue;
            }
            let v = a[ir - is] * cd.powi(ir as i32 - jr as i32);
            m.set(row, col, v);
        }
    }
    m
}

/// Tensor variants of A_n for the differential-module trivializations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    /// Omega^1 relative: factor (c tau + d).
    Relative1Form,
    /// Omega^1 absolute: the 2x2 matrix ((c tau + d, 0), ((cz + cn - dm)(c tau + d), (c tau + d)^2)).
    Absolute1Form,
    /// Omega^2 absolute: factor (c tau + d)^3.
    Absolute2Form,
}

/// Automorphy matrix of (differential module) tensor A_n, built with the
/// Kronecker-product convention. Size r(n) for the scalar factors and
/// 2 r(n) for the absolute one-forms.
pub fn automorphy_tensor(
    n: usize,
    deck: &DeckElement,
    z: Complex64,
    tau: &UpperHalfPoint,
    kind: TensorKind,
) -> CMatrix {
    let an = automorphy_an(n, deck, z, tau);
    let cd = deck.cz_denominator(tau);
    match kind {
        TensorKind::Relative1Form => an.scale(cd),
        TensorKind::Absolute2Form => an.scale(cd * cd * cd),
        TensorKind::Absolute1Form => {
            let (m, nn) = deck.shift();
            let c = deck.gamma()[1][0] as f64;
            let d = deck.gamma()[1][1] as f64;
            let low = (c * z + c * nn as f64 - d * m as f64) * cd;
            let mut omega = CMatrix::zeros(2, 2);
            omega.set(0, 0, cd);
            omega.set(1, 0, low);
            omega.set(1, 1, cd * cd);
            omega.kron(&an)
        }
    }
}

/// Relative defect of the transformation law for a section evaluator:
/// || S(d * (z,tau)) - M(d, z, tau) S(z, tau) ||_inf / (1 + || S(z,tau) ||_inf),
/// with M either A_n itself or one of its tensor variants.
pub fn section_transform_defect<F>(
    n: usize,
    kind: Option<TensorKind>,
    eval: F,
    deck: &DeckElement,
    z: Complex64,
    tau: &UpperHalfPoint,
) -> Result<f64>
where
    F: Fn(Complex64, &UpperHalfPoint) -> Result<Vec<Complex64>>,
{
    let m = match kind {
        None => automorphy_an(n, deck, z, tau),
        Some(k) => automorphy_tensor(n, deck, z, tau, k),
    };
    let here = eval(z, tau)?;
    if here.len() != m.cols() {
        return Err(Error::LengthMismatch {
            expected: m.cols(),
            got: here.len(),
        });
    }
    let (z2, t2) = deck.act(z, tau);
    let there = eval(z2, &t2)?;
    if there.len() != m.rows() {
        return Err(Error::LengthMismatch {
            expected: m.rows(),
            got: there.len(),
        });
    }
    let predicted = m.mul_vec(&here);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, b) in there.iter().zip(predicted.iter()) {
        worst = worst.max((a - b).norm());
    }
    for a in here.iter() {
        scale = scale.max(a.norm());
    }
    Ok(worst / (1.0 + scale))
}

/// Random element of Gamma(N) as a word of length <= max_len in the
/// generators I + N E_12, I + N E_21 and their inverses.
pub fn random_gamma_word<R: Rng>(level: i64, max_len: usize, rng: &mut R) -> [[i64; 2]; 2] {
    let mut g = [[1i64, 0], [0, 1]];
    let len = rng.random_range(0..=max_len);
    for _ in 0..len {
        let n = level * if rng.random_bool(0.5) { 1 } else { -1 };
        let factor = if rng.random_bool(0.5) {
            [[1, n], [0, 1]]
        } else {
            [[1, 0], [n, 1]]
        };
        g = [
            [
                g[0][0] * factor[0][0] + g[0][1] * factor[1][0],
                g[0][0] * factor[0][1] + g[0][1] * factor[1][1],
            ],
            [
                g[1][0] * factor[0][0] + g[1][1] * factor[1][0],
                g[1][0] * factor[0][1] + g[1][1] * factor[1][1],
            ],
        ];
    }
    g
}

/// Random deck element with shifts bounded by `shift_bound`.
pub fn random_deck<R: Rng>(
    level: i64,
    max_len: usize,
    shift_bound: i64,
    rng: &mut R,
) -> DeckElement {
    let gamma = random_gamma_word(level, max_len, rng);
    let m = rng.random_range(-shift_bound..=shift_bound);
    let n = rng.random_range(-shift_bound..=shift_bound);
    DeckElement::new((m, n), gamma, level).expect("generated word lies in Gamma(N)")
}

/// Check that the exponential of the closed-form a_r data reproduces the
/// w-expansion of the Poincare factor with trivial w-shift.
pub fn a_coefficient_from_poincare(
    r: usize,
    deck: &DeckElement,
    z: Complex64,
    tau: &UpperHalfPoint,
    prec: &Precision,
) -> Result<Complex64> {
    let shift = deck.shift();
    let gamma = deck.gamma();
    let t = *tau;
    let lau = cauchy_coefficients_local(
        move |w| poincare_factor(shift, (0, 0), gamma, z, w, &t),
        r,
        prec,
    )?;
    Ok(lau.coefficient(r as i64))
}

fn cauchy_coefficients_local<F>(
    f: F,
    degree: usize,
    prec: &Precision,
) -> Result<crate::numeric::TruncatedLaurent>
where
    F: Fn(Complex64) -> Complex64,
{
    crate::numeric::cauchy_coefficients(f, ZERO, 0.5, 0, degree, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ONE;
    use proptest::prelude::*;

    fn tau(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn deck_identity_acts_trivially() {
        let t = tau(0.2, 1.4);
        let z = Complex64::new(0.3, 0.5);
        let (z2, t2) = DeckElement::identity().act(z, &t);
        assert_eq!(z2, z);
        assert_eq!(t2.get(), t.get());
    }

    #[test]
    fn deck_translation_action() {
        let t = tau(0.2, 1.4);
        let z = Complex64::new(0.3, 0.5);
        let (z2, t2) = DeckElement::translation(1, 0).act(z, &t);
        assert!((z2 - (z + t.get())).norm() < 1e-15);
        assert_eq!(t2.get(), t.get());
    }

    #[test]
    fn deck_action_is_compatible_with_composition() {
        let mut rng = StdRng::seed_from_u64(99);
        let t = tau(0.1, 1.2);
        for _ in 0..100 {
            let d1 = random_deck(4, 4, 2, &mut rng);
            let d2 = random_deck(4, 4, 2, &mut rng);
            let z = Complex64::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8));
            let (za, ta) = d2.act(z, &t);
            let (zb, tb) = d1.act(za, &ta);
            let (zc, tc) = d1.compose(&d2).act(z, &t);
            assert!((zb - zc).norm() < 1e-9, "action compatibility in z");
            assert!((tb.get() - tc.get()).norm() < 1e-9, "action compatibility in tau");
        }
    }

    proptest! {
        #[test]
        fn deck_group_laws_hold_exactly(
            seed in 0u64..5000,
        ) {
            let mut rng = StdRng::seed_from_u64(seed);
            let d1 = random_deck(3, 5, 3, &mut rng);
            let d2 = random_deck(3, 5, 3, &mut rng);
            let d3 = random_deck(3, 5, 3, &mut rng);
            let assoc_l = d1.compose(&d2).compose(&d3);
            let assoc_r = d1.compose(&d2.compose(&d3));
            prop_assert_eq!(assoc_l, assoc_r);
            let e = DeckElement::identity();
            prop_assert_eq!(d1.compose(&d1.inverse()), e);
            prop_assert_eq!(d1.inverse().compose(&d1), e);
        }

        #[test]
        fn basis_position_is_a_bijection(n in 0usize..8) {
            let idx = basis_indices(n);
            prop_assert_eq!(idx.len(), rank(n));
            for (pos, &(i, j)) in idx.iter().enumerate() {
                prop_assert_eq!(basis_position(n, i, j), pos);
            }
        }
    }

    #[test]
    fn deck_rejects_bad_matrices() {
        assert!(DeckElement::new((0, 0), [[2, 0], [0, 1]], 1).is_err());
        assert!(DeckElement::new((0, 0), [[1, 1], [0, 1]], 4).is_err());
        assert!(DeckElement::new((0, 0), [[1, 4], [0, 1]], 4).is_ok());
    }

    #[test]
    fn level_context_hypotheses() {
        assert!(LevelContext::new(2, 2, 1).is_err(), "free action needs N >= 3");
        assert!(LevelContext::new(4, 1, 1).is_err(), "D must exceed 1");
        assert!(LevelContext::new(4, 3, 2).is_err(), "j0 must be coprime to N");
        let ctx = LevelContext::new(4, 3, 3).unwrap();
        assert!(ctx.require_d_coprime().is_ok());
        let bad = LevelContext::new(4, 2, 1).unwrap();
        assert!(bad.require_d_coprime().is_err());
    }

    #[test]
    fn torsion_index_nonzero_hypothesis() {
        assert!(TorsionIndex::new(1, 0, 4).require_nonzero().is_ok());
        assert!(TorsionIndex::new(0, -3, 4).require_nonzero().is_ok());
        assert!(TorsionIndex::new(0, 0, 4).require_nonzero().is_err());
        assert!(TorsionIndex::new(8, -4, 4).require_nonzero().is_err());
    }

    #[test]
    fn a_coefficients_closed_form() {
        let t = tau(0.15, 1.1);
        let z = Complex64::new(0.2, 0.4);
        let deck = DeckElement::translation(1, 0);
        assert_eq!(a_coefficient(0, &deck, z, &t), ONE);
        let a1 = a_coefficient(1, &deck, z, &t);
        assert!((a1 - two_pi_i()).norm() < 1e-14, "a_1 for ((1,0), I) is 2 pi i");
        assert_eq!(a_coefficient(-2, &deck, z, &t), ZERO);
    }

    #[test]
    fn a_coefficients_match_poincare_expansion() {
        let prec = Precision::default();
        let t = tau(0.15, 1.1);
        let z = Complex64::new(0.2, 0.4);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let deck = random_deck(3, 3, 2, &mut rng);
            for r in 0..=4usize {
                let closed = a_coefficient(r as i64, &deck, z, &t);
                let extracted = a_coefficient_from_poincare(r, &deck, z, &t, &prec).unwrap();
                assert!(
                    (closed - extracted).norm() < 1e-10 * closed.norm().max(1.0),
                    "a_{r} mismatch"
                );
            }
        }
    }

    #[test]
    fn poincare_factor_trivial_cases() {
        let t = tau(0.0, 1.3);
        let z = Complex64::new(0.2, 0.1);
        let w = Complex64::new(-0.1, 0.3);
        let id = [[1, 0], [0, 1]];
        let f = poincare_factor((0, 0), (0, 0), id, z, w, &t);
        assert!((f - ONE).norm() < 1e-15);
    }

    #[test]
    fn poincare_factor_is_reciprocal_to_jacobi_factor() {
        // the two factors of automorphy carry sign-flipped exponents, so
        // their product is the bare (c tau + d)
        let mut rng = StdRng::seed_from_u64(57);
        let t = tau(0.21, 1.12);
        for _ in 0..10 {
            let deck = random_deck(3, 3, 2, &mut rng);
            let sw = (rng.random_range(-2..=2), rng.random_range(-2..=2));
            let z = Complex64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
            let w = Complex64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
            let pf = poincare_factor(deck.shift(), sw, deck.gamma(), z, w, &t);
            let jf = crate::jacobi::jacobi_transform_factor(z, w, &t, deck.shift(), sw, deck.gamma())
                .unwrap();
            let cd = deck.cz_denominator(&t);
            assert!(
                (pf * jf - cd).norm() < 1e-10 * cd.norm(),
                "product should collapse to c tau + d"
            );
        }
    }

    #[test]
    fn automorphy_a1_entries() {
        let t = tau(0.1, 1.2);
        let z = Complex64::new(0.3, 0.2);
        let id = automorphy_a1(&DeckElement::identity(), z, &t);
        assert!(id.max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let shift = automorphy_a1(&DeckElement::translation(1, 0), z, &t);
        assert!((shift.get(1, 0) - two_pi_i()).norm() < 1e-14);
        assert!((shift.get(0, 0) - ONE).norm() < 1e-15);
        assert!((shift.get(2, 2) - ONE).norm() < 1e-15);
    }

    #[test]
    fn automorphy_an_reduces_to_a1() {
        let t = tau(0.07, 1.05);
        let z = Complex64::new(0.25, 0.45);
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..5 {
            let deck = random_deck(3, 4, 2, &mut rng);
            let a1 = automorphy_a1(&deck, z, &t);
            let an = automorphy_an(1, &deck, z, &t);
            assert!(a1.max_abs_diff(&an) < 1e-12);
        }
    }

    #[test]
    fn automorphy_identity_element() {
        let t = tau(0.0, 1.0);
        let z = Complex64::new(0.4, 0.3);
        for n in 0..=5usize {
            let m = automorphy_an(n, &DeckElement::identity(), z, &t);
            assert!(m.max_abs_diff(&CMatrix::identity(rank(n))) < 1e-15);
        }
    }

    #[test]
    fn cocycle_law_for_an() {
        let mut rng = StdRng::seed_from_u64(12);
        let t = tau(0.12, 1.15);
        for n in [1usize, 2, 3] {
            for _ in 0..20 {
                let d1 = random_deck(3, 3, 2, &mut rng);
                let d2 = random_deck(3, 3, 2, &mut rng);
                let z = Complex64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
                let (z2, t2) = d2.act(z, &t);
                let lhs = automorphy_an(n, &d1.compose(&d2), z, &t);
                let rhs = automorphy_an(n, &d1, z2, &t2).mul(&automorphy_an(n, &d2, z, &t));
                let scale = rhs.inf_norm().max(1.0);
                assert!(
                    lhs.max_abs_diff(&rhs) / scale < 1e-10,
                    "cocycle defect n={n}"
                );
            }
        }
    }

    #[test]
    fn upper_left_block_closed_form() {
        // block entry (r, s) is (c tau + d)^(r-1) a_(r-s); other j-blocks zero
        let t = tau(0.21, 0.95);
        let z = Complex64::new(0.35, 0.15);
        let mut rng = StdRng::seed_from_u64(77);
        let n = 3usize;
        for _ in 0..5 {
            let deck = random_deck(4, 3, 2, &mut rng);
            let cd = deck.cz_denominator(&t);
            let an = automorphy_an(n, &deck, z, &t);
            for r in 0..=n {
                for s in 0..=n {
                    let expected = if r >= s {
                        a_coefficient((r - s) as i64, &deck, z, &t) * cd.powi(r as i32)
                    } else {
                        ZERO
                    };
                    assert!(
                        (an.get(r, s) - expected).norm() < 1e-10 * expected.norm().max(1.0),
                        "block entry ({r},{s})"
                    );
                }
            }
            // off-diagonal-in-j entries are exactly zero
            let idx = basis_indices(n);
            for (row, &(_, jr)) in idx.iter().enumerate() {
                for (col, &(_, jc)) in idx.iter().enumerate() {
                    if jr != jc {
                        assert_eq!(an.get(row, col), ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_variants() {
        let t = tau(0.05, 1.33);
        let z = Complex64::new(0.27, 0.61);
        let deck = DeckElement::new((1, -1), [[1, 3], [0, 1]], 3).unwrap();
        let cd = deck.cz_denominator(&t);
        // n = 0 relative one-form is the scalar c tau + d
        let rel = automorphy_tensor(0, &deck, z, &t, TensorKind::Relative1Form);
        assert_eq!(rel.rows(), 1);
        assert!((rel.get(0, 0) - cd).norm() < 1e-14);
        // absolute one-form block structure
        let n = 2usize;
        let an = automorphy_an(n, &deck, z, &t);
        let abs = automorphy_tensor(n, &deck, z, &t, TensorKind::Absolute1Form);
        let r = rank(n);
        assert_eq!(abs.rows(), 2 * r);
        let (m, nn) = deck.shift();
        let c = deck.gamma()[1][0] as f64;
        let d = deck.gamma()[1][1] as f64;
        let low = (c * z + c * nn as f64 - d * m as f64) * cd;
        for rr in 0..r {
            for cc in 0..r {
                assert!((abs.get(rr, cc) - cd * an.get(rr, cc)).norm() < 1e-12);
                assert!((abs.get(rr, cc + r)).norm() < 1e-15);
                assert!((abs.get(rr + r, cc) - low * an.get(rr, cc)).norm() < 1e-12);
                assert!((abs.get(rr + r, cc + r) - cd * cd * an.get(rr, cc)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tensor_cocycles() {
        let mut rng = StdRng::seed_from_u64(21);
        let t = tau(0.0, 1.2);
        for kind in [
            TensorKind::Relative1Form,
            TensorKind::Absolute1Form,
            TensorKind::Absolute2Form,
        ] {
            for _ in 0..10 {
                let d1 = random_deck(3, 3, 2, &mut rng);
                let d2 = random_deck(3, 3, 2, &mut rng);
                let z = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                let (z2, t2) = d2.act(z, &t);
                let n = 2usize;
                let lhs = automorphy_tensor(n, &d1.compose(&d2), z, &t, kind);
                let rhs = automorphy_tensor(n, &d1, z2, &t2, kind)
                    .mul(&automorphy_tensor(n, &d2, z, &t, kind));
                let scale = rhs.inf_norm().max(1.0);
                assert!(lhs.max_abs_diff(&rhs) / scale < 1e-9, "{kind:?} cocycle");
            }
        }
    }

    #[test]
    fn constant_section_trivial_defect() {
        let t = tau(0.0, 1.0);
        let z = Complex64::new(0.3, 0.3);
        let deck = DeckElement::identity();
        let defect = section_transform_defect(
            0,
            None,
            |_, _| Ok(vec![ONE]),
            &deck,
            z,
            &t,
        )
        .unwrap();
        assert!(defect < 1e-15);
    }

    #[test]
    fn gamma_words_are_level_congruent() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..50 {
            let g = random_gamma_word(5, 6, &mut rng);
            assert!(DeckElement::new((0, 0), g, 5).is_ok());
        }
    }
}
