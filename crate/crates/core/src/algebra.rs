//! The matrix algebra: Hermitian elements, spectral decomposition, functional
//! calculus and the spectral order.
//!
//! `f(c)` is computed as `U diag(f(λ)) U*` from a cyclic Jacobi
//! eigendecomposition. [`apply_function_contour`] computes the same element
//! from the Cauchy integral of `f(z) (z - c)^{-1}` with resolvents obtained by
//! Gaussian elimination, so it shares no code path with the eigensolver and
//! serves as an oracle for it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tol;

const MAX_SWEEPS: usize = 100;
const JACOBI_STOP: f64 = 1e-12;
const CONTOUR_NODE_CAP: usize = 4096;

/// Self-adjoint complex square matrix.
///
/// Construction validates self-adjointness to [`tol::HERM`] and stores the
/// exact Hermitian part, so the stored entries satisfy `a_ij = conj(a_ji)`
/// bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianElement {
    matrix: CMatrix,
}

/// JSON exchange form `{"dim": n, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for HermitianElement {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.re.len() != j.dim {
            return Err(Error::MalformedMatrix(format!(
                "dim is {} but re has {} rows",
                j.dim,
                j.re.len()
            )));
        }
        HermitianElement::new(CMatrix::from_parts(&j.re, &j.im)?)
    }
}

impl From<HermitianElement> for MatrixJson {
    fn from(h: HermitianElement) -> Self {
        MatrixJson {
            dim: h.dim(),
            re: h.matrix.real_parts(),
            im: h.matrix.imag_parts(),
        }
    }
}

impl HermitianElement {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.dim() == 0 {
            return Err(Error::MalformedMatrix("dimension must be at least 1".into()));
        }
        let deviation = matrix.hermitian_deviation();
        if !(deviation <= tol::HERM) {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "dimension must be at least 1");
        Self {
            matrix: CMatrix::from_real_diagonal(diag),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let im = vec![vec![0.0; rows.len()]; rows.len()];
        Self::new(CMatrix::from_parts(rows, &im)?)
    }

    /// `λ 1`.
    pub fn scalar(dim: usize, lambda: f64) -> Self {
        Self::from_real_diagonal(&vec![lambda; dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// `x* x`, nonnegative for every square `x`.
    pub fn gram(x: &CMatrix) -> Self {
        Self {
            matrix: (&x.adjoint() * x).hermitian_part(),
        }
    }

    /// `U diag(values) U*` for a unitary `U`.
    pub fn from_spectrum(unitary: &CMatrix, values: &[f64]) -> Self {
        Self {
            matrix: spectral_sum(unitary, values),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    /// `self + s 1`.
    pub fn shift(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.shift(s),
        }
    }

    /// Product of two elements. Only Hermitian when they commute, so the
    /// result is a plain matrix.
    pub fn product(&self, other: &Self) -> CMatrix {
        &self.matrix * &other.matrix
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// `U diag(values) U*`, made exactly Hermitian.
fn spectral_sum(u: &CMatrix, values: &[f64]) -> CMatrix {
    let n = u.dim();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                acc += u[(i, k)] * u[(j, k)].conj() * v;
            }
            if i == j {
                out[(i, i)] = Complex64::new(acc.re, 0.0);
            } else {
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
    }
    out
}

/// Closed real interval `[m, M]` with `m < M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalJson", into = "IntervalJson")]
pub struct SpectralInterval {
    m: f64,
    big_m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalJson {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl TryFrom<IntervalJson> for SpectralInterval {
    type Error = Error;

    fn try_from(j: IntervalJson) -> Result<Self> {
        SpectralInterval::new(j.m, j.big_m)
    }
}

impl From<SpectralInterval> for IntervalJson {
    fn from(w: SpectralInterval) -> Self {
        IntervalJson {
            m: w.m,
            big_m: w.big_m,
        }
    }
}

impl SpectralInterval {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if m.is_finite() && big_m.is_finite() && m < big_m {
            Ok(Self { m, big_m })
        } else {
            Err(Error::InvalidInterval { m, big_m })
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    #[allow(non_snake_case)]
    pub fn M(&self) -> f64 {
        self.big_m
    }

    pub fn width(&self) -> f64 {
        self.big_m - self.m
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.m + self.big_m)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.m <= t && t <= self.big_m
    }

    /// Strictly inside, at least `tol::END * (M - m)` from both ends.
    pub fn contains_interior(&self, t: f64) -> bool {
        let guard = tol::END * self.width();
        t - self.m > guard && self.big_m - t > guard
    }
}

/// Circle `|z - center| = radius` in the open right half-plane, with the
/// starting node count of the trapezoidal rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    center: f64,
    radius: f64,
    nodes: usize,
}

impl ContourSpec {
    pub fn new(center: f64, radius: f64, nodes: usize) -> Result<Self> {
        if !(center > 0.0 && radius > 0.0) {
            return Err(Error::InvalidContour(format!(
                "center {center} and radius {radius} must be positive"
            )));
        }
        if !(center - radius > 0.0) {
            return Err(Error::InvalidContour(format!(
                "circle of radius {radius} around {center} leaves the right half-plane"
            )));
        }
        if nodes < 16 {
            return Err(Error::InvalidContour(format!("{nodes} nodes, need at least 16")));
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    /// A circle around `[m, M]` whose leftmost point sits at `m / 2`.
    pub fn enclosing(window: &SpectralInterval, nodes: usize) -> Result<Self> {
        let center = window.midpoint();
        let radius = center - 0.5 * window.m();
        Self::new(center, radius, nodes)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

/// Real ascending eigenvalues and unitary eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `[min σ, max σ]`, or `None` for a multiple of the identity.
    pub fn hull(&self) -> Option<SpectralInterval> {
        SpectralInterval::new(self.min(), self.max()).ok()
    }

    /// Eigenvector `k` as a vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    pub fn reconstruct(&self) -> HermitianElement {
        HermitianElement::from_spectrum(&self.eigenvectors, &self.eigenvalues)
    }

    /// `U diag(f(λ)) U*` without a window check.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<HermitianElement> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| {
                let v = f(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteFunctionValue { at: l })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HermitianElement::from_spectrum(&self.eigenvectors, &values))
    }

    /// Checks `σ ⊆ window` up to [`tol::spec_scaled`].
    pub fn check_window(&self, window: &SpectralInterval) -> Result<()> {
        let slack = tol::spec_scaled(self.spectral_radius().max(window.m().abs()).max(window.M().abs()));
        for &l in &self.eigenvalues {
            if l < window.m() - slack || l > window.M() + slack {
                return Err(Error::SpectrumOutOfWindow {
                    eigenvalue: l,
                    m: window.m(),
                    big_m: window.M(),
                });
            }
        }
        Ok(())
    }

    /// [`Self::map`] after checking the spectrum lies in `window`.
    pub fn apply(&self, f: impl Fn(f64) -> f64, window: &SpectralInterval) -> Result<HermitianElement> {
        self.check_window(window)?;
        self.map(f)
    }
}

/// Cyclic Jacobi eigendecomposition.
///
/// Each rotation first removes the phase of `a_pq` and then applies the real
/// symmetric Jacobi rotation to the `(p, q)` plane. Sweeps stop when the
/// off-diagonal Frobenius norm drops below `1e-12 * ||c||_F`.
pub fn eigendecompose(c: &HermitianElement) -> SpectralDecomposition {
    let n = c.dim();
    let mut a = c.matrix().clone();
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_STOP * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for k in 0..n {
        normalize_phase(&mut v, k);
    }
    let leading: Vec<usize> = (0..n).map(|k| first_nonzero(&v, k)).collect();
    order.sort_by(|&x, &y| raw[x].total_cmp(&raw[y]).then(leading[x].cmp(&leading[y])));

    let eigenvalues = order.iter().map(|&k| raw[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Checks self-adjointness of a raw matrix, then decomposes it.
pub fn eigendecompose_matrix(m: &CMatrix) -> Result<SpectralDecomposition> {
    Ok(eigendecompose(&HermitianElement::new(m.clone())?))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let beta = apq.norm();
    if beta == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    // e^{iφ} = a_pq / |a_pq|
    let phase = apq / beta;
    let tau = (gamma - alpha) / (2.0 * beta);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let n = a.dim();
    let back = phase.conj();

    // A <- A V with V = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs - back * akq * sn;
        a[(k, q)] = akp * sn + back * akq * cs;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - back * vkq * sn;
        v[(k, q)] = vkp * sn + back * vkq * cs;
    }
    // A <- V* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs - phase * aqk * sn;
        a[(q, k)] = apk * sn + phase * aqk * cs;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

fn first_nonzero(v: &CMatrix, col: usize) -> usize {
    (0..v.dim()).find(|&i| v[(i, col)].norm() > 1e-8).unwrap_or(0)
}

/// Rotates column `col` so its first non-negligible entry is real positive.
fn normalize_phase(v: &mut CMatrix, col: usize) {
    let i = first_nonzero(v, col);
    let z = v[(i, col)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let rot = z.conj() / r;
    for k in 0..v.dim() {
        v[(k, col)] *= rot;
    }
    v[(i, col)] = Complex64::new(v[(i, col)].norm(), 0.0);
}

/// `f(c)` through the eigendecomposition of `c`.
pub fn apply_function(
    c: &HermitianElement,
    f: impl Fn(f64) -> f64,
    window: &SpectralInterval,
) -> Result<HermitianElement> {
    eigendecompose(c).apply(f, window)
}

/// `a^α` for `a > 0`.
pub fn real_power(a: &HermitianElement, alpha: f64) -> Result<HermitianElement> {
    let d = eigendecompose(a);
    if !(d.min() > tol::POS) {
        return Err(Error::NotPositive {
            min_eigenvalue: d.min(),
        });
    }
    d.map(|t| t.powf(alpha))
}

/// `f(c) = (1/2πi) ∮ f(z) (z - c)^{-1} dz` on the circle `contour`, by the
/// trapezoidal rule.
///
/// Starts at `contour.nodes()` nodes and doubles (reusing the previous nodes)
/// until two successive results differ by less than `tol::CONTOUR / 10`, or
/// the node count reaches `max(4096, contour.nodes())`.
pub fn apply_function_contour(
    c: &HermitianElement,
    f: impl Fn(Complex64) -> Complex64,
    contour: &ContourSpec,
) -> Result<HermitianElement> {
    let d = eigendecompose(c);
    if !(d.min() > tol::POS) {
        return Err(Error::NotPositive {
            min_eigenvalue: d.min(),
        });
    }
    for &l in d.eigenvalues() {
        if !((l - contour.center).abs() < contour.radius) {
            return Err(Error::ContourDoesNotEncloseSpectrum { eigenvalue: l });
        }
    }

    let cap = CONTOUR_NODE_CAP.max(contour.nodes);
    let mut nodes = contour.nodes;
    // Sum over nodes k = 0..nodes of f(z_k) (z_k - c)^{-1} (z_k - center).
    let mut sum = contour_partial_sum(c, &d, &f, contour, nodes, 0, 1)?;
    let mut current = sum.scale_real(1.0 / nodes as f64);
    while nodes < cap {
        // Doubling keeps the old nodes at even indices; add the odd ones.
        let odd = contour_partial_sum(c, &d, &f, contour, 2 * nodes, 1, 2)?;
        sum = &sum + &odd;
        nodes *= 2;
        let next = sum.scale_real(1.0 / nodes as f64);
        let change = next.max_abs_diff(&current);
        current = next;
        if change < tol::CONTOUR / 10.0 {
            break;
        }
    }
    HermitianElement::new(current).map_err(|e| match e {
        Error::NonHermitianInput { deviation } => Error::InvariantViolation(format!(
            "contour result deviates from Hermitian by {deviation:e}"
        )),
        other => other,
    })
}

fn contour_partial_sum(
    c: &HermitianElement,
    d: &SpectralDecomposition,
    f: &impl Fn(Complex64) -> Complex64,
    contour: &ContourSpec,
    total: usize,
    start: usize,
    step: usize,
) -> Result<CMatrix> {
    let n = c.dim();
    let identity = CMatrix::identity(n);
    let neg_c = c.matrix().scale_real(-1.0);
    let mut acc = CMatrix::zeros(n);
    for k in (start..total).step_by(step) {
        let theta = 2.0 * PI * (k as f64) / (total as f64);
        let offset = Complex64::from_polar(contour.radius, theta);
        let z = Complex64::new(contour.center, 0.0) + offset;
        if d.eigenvalues().iter().any(|&l| (z - l).norm() < tol::POS) {
            return Err(Error::SingularResolvent);
        }
        let mut shifted = neg_c.clone();
        for i in 0..n {
            shifted[(i, i)] += z;
        }
        let resolvent = shifted.solve(&identity).ok_or(Error::SingularResolvent)?;
        acc = &acc + &resolvent.scale(f(z) * offset);
    }
    Ok(acc)
}

/// `a >= 0` with the default tolerance [`tol::POS`].
pub fn is_nonneg(a: &HermitianElement) -> bool {
    is_nonneg_within(a, tol::POS)
}

pub fn is_nonneg_within(a: &HermitianElement, tolerance: f64) -> bool {
    eigendecompose(a).min() >= -tolerance
}

/// `a <= b`, i.e. `b - a >= 0`.
pub fn order_leq(a: &HermitianElement, b: &HermitianElement) -> bool {
    order_leq_within(a, b, tol::POS)
}

pub fn order_leq_within(a: &HermitianElement, b: &HermitianElement, tolerance: f64) -> bool {
    is_nonneg_within(&b.sub(a), tolerance)
}
