//! Dense complex square matrices, row-major.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::MalformedMatrix(format!(
                "re has {} rows but im has {}",
                dim,
                im.len()
            )));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, (r, s)) in re.iter().zip(im).enumerate() {
            if r.len() != dim || s.len() != dim {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has length {}/{} in a {dim}x{dim} matrix",
                    r.len(),
                    s.len()
                )));
            }
            data.extend(r.iter().zip(s).map(|(&x, &y)| Complex64::new(x, y)));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self + s * I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] += s;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `x* A x` for a vector `x`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let ax: Complex64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += x[i].conj() * ax;
        }
        acc
    }

    /// Solves `A X = B` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot vanishes.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let n = self.dim;
        assert_eq!(n, rhs.dim, "dimension mismatch");
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() <= f64::EPSILON * scale * 1e-3 {
                return None;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                    b.swap(col * n + k, pivot * n + k);
                }
            }
            let inv = ONE / a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] * inv;
                if factor == ZERO {
                    continue;
                }
                for k in col..n {
                    let t = a[col * n + k];
                    a[r * n + k] -= factor * t;
                }
                for k in 0..n {
                    let t = b[col * n + k];
                    b[r * n + k] -= factor * t;
                }
            }
        }
        for col in (0..n).rev() {
            let inv = ONE / a[col * n + col];
            for k in 0..n {
                let mut s = b[col * n + k];
                for j in (col + 1)..n {
                    s -= a[col * n + j] * b[j * n + k];
                }
                b[col * n + k] = s * inv;
            }
        }
        Some(Self { dim: n, data: b })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_by_hand() {
        let a = CMatrix::from_fn(2, |i, j| c((i + j) as f64, i as f64));
        let b = CMatrix::from_fn(2, |i, j| c(1.0, (j as f64) - (i as f64)));
        let p = &a * &b;
        // row 0 of a = [0, 1], row 1 = [1+i, 2+i]; b = [[1, 1+i], [1-i, 1]]
        assert_eq!(p[(0, 0)], c(1.0, -1.0));
        assert_eq!(p[(0, 1)], c(1.0, 0.0));
        assert_eq!(p[(1, 0)], c(1.0, 1.0) + c(2.0, 1.0) * c(1.0, -1.0));
        assert_eq!(p[(1, 1)], c(1.0, 1.0) * c(1.0, 1.0) + c(2.0, 1.0));
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = CMatrix::from_fn(3, |i, j| {
            if i == j {
                c(4.0, 1.0)
            } else {
                c(0.5 * (i as f64), -0.25 * (j as f64))
            }
        });
        let x = CMatrix::from_fn(3, |i, j| c(i as f64 - 1.0, j as f64));
        let b = &a * &x;
        let solved = a.solve(&b).unwrap();
        assert!(solved.max_abs_diff(&x) < 1e-13);
    }

    #[test]
    fn solve_detects_singular() {
        let a = CMatrix::from_fn(2, |_, _| c(1.0, 0.0));
        assert!(a.solve(&CMatrix::identity(2)).is_none());
    }

    #[test]
    fn hermitian_part_is_hermitian() {
        let a = CMatrix::from_fn(3, |i, j| c((i * 3 + j) as f64, (j as f64) - 2.0 * i as f64));
        let h = a.hermitian_part();
        assert_eq!(h.hermitian_deviation(), 0.0);
        assert!(a.hermitian_deviation() > 1.0);
    }

    #[test]
    fn from_parts_rejects_ragged() {
        let re = vec![vec![1.0, 0.0], vec![0.0]];
        let im = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(CMatrix::from_parts(&re, &im).is_err());
    }
}
