//! Minimal dense complex matrix, just enough for automorphy-matrix algebra.

use crate::numeric::ZERO;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = ZERO;
            for c in 0..self.cols {
                acc += self.get(r, c) * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Kronecker product, blocks of `other` scaled by entries of `self`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a == ZERO {
                    continue;
                }
                for rr in 0..other.rows {
                    for cc in 0..other.cols {
                        out.set(r * other.rows + rr, c * other.cols + cc, a * other.get(rr, cc));
                    }
                }
            }
        }
        out
    }

    /// max |a_ij - b_ij| over all entries.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn inf_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_shapes_and_values() {
        let mut a = CMatrix::zeros(2, 2);
        a.set(0, 0, c(1.0));
        a.set(1, 0, c(2.0));
        a.set(1, 1, c(3.0));
        let b = CMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 6);
        assert_eq!(k.get(0, 0), c(1.0));
        assert_eq!(k.get(3, 0), c(2.0));
        assert_eq!(k.get(5, 5), c(3.0));
        assert_eq!(k.get(0, 3), c(0.0));
    }

    #[test]
    fn mul_against_identity() {
        let mut a = CMatrix::zeros(2, 2);
        a.set(0, 1, Complex64::new(0.0, 1.0));
        a.set(1, 0, c(-2.0));
        let i = CMatrix::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(i.mul(&a), a);
    }
}
