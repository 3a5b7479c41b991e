//! Numerical machinery for theta and Eisenstein-Kronecker special functions
//! on the universal elliptic curve with level-N structure.
//!
//! The crate covers, working layer by layer:
//!
//! * [`numeric`] - Cauchy coefficient extraction on circles, holomorphic
//!   differentiation and absolutely convergent lattice sums;
//! * [`theta`] - the elementary theta function, Weierstrass sigma/zeta/p,
//!   quasi-periods, the Dedekind eta function and theta_11;
//! * [`jacobi`] - the fundamental meromorphic Jacobi form J(z, w, tau), its
//!   Laurent coefficients r_k, Zagier's F, the mixed heat equation and the
//!   Eisenstein-Kronecker functions e_k;
//! * [`deck`] - the deck group Z^2 x| Gamma(N) and the automorphy matrices
//!   A_n of the logarithm sheaves, with their tensor variants;
//! * [`eisenstein`] - level-N Eisenstein series E^(k), the modular forms
//!   F^(k) and the D-variant _D F^(k);
//! * [`dvariant`] - the coefficient functions s^D_k, the section vectors
//!   q^D_n and p^D_n, connections, the de Rham operator, torsion translation
//!   and specialization;
//! * [`classes`] - Kodaira-Spencer normalization and de Rham Eisenstein
//!   class coefficients;
//! * [`suites`] - deterministic verification suites for every identity the
//!   library claims.

pub mod classes;
pub mod deck;
pub mod dvariant;
pub mod eisenstein;
mod error;
pub mod jacobi;
pub mod matrix;
pub mod numeric;
pub mod suites;
pub mod theta;

pub use error::{Error, Result};
pub use numeric::{Precision, TruncatedLaurent, UpperHalfPoint};
