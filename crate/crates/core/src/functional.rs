//! Positive normalized linear functionals (states) on the matrix algebra.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{HermitianElement, SpectralDecomposition};
use crate::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::tol;

/// A state `ψ`: linear, `ψ(a) >= 0` for `a >= 0`, and `ψ(1) = 1`.
///
/// Constructors enforce normalization to [`tol::ORDER`]; positivity follows
/// from the form of each family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionalJson", into = "FunctionalJson")]
pub enum StateFunctional {
    /// `tr(a) / n`.
    NormalizedTrace,
    /// `x* a x` for a unit vector `x`.
    VectorState(Vec<Complex64>),
    /// `Σ w_i a_ii` for a probability vector `w`.
    WeightedDiagonal(Vec<f64>),
    /// Convex combination of states.
    Mixture(Vec<(f64, StateFunctional)>),
}

impl StateFunctional {
    pub fn vector(x: Vec<Complex64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidFunctional("empty vector".into()));
        }
        let norm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if !((norm_sq.sqrt() - 1.0).abs() <= tol::ORDER) {
            return Err(Error::InvalidFunctional(format!(
                "vector state needs a unit vector, norm is {}",
                norm_sq.sqrt()
            )));
        }
        Ok(Self::VectorState(x))
    }

    /// Vector state from an arbitrary nonzero vector, normalized.
    pub fn vector_normalized(x: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidFunctional("cannot normalize a zero vector".into()));
        }
        Self::vector(x.into_iter().map(|z| z / norm).collect())
    }

    pub fn weights(w: Vec<f64>) -> Result<Self> {
        check_probability(&w, "diagonal weights")?;
        Ok(Self::WeightedDiagonal(w))
    }

    pub fn mixture(components: Vec<(f64, StateFunctional)>) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|(w, _)| *w).collect();
        check_probability(&weights, "mixture weights")?;
        let mut dim = None;
        for (_, c) in &components {
            match (dim, c.dim()) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::InvalidFunctional(format!(
                        "mixture components act on dimensions {a} and {b}"
                    )))
                }
                (None, Some(b)) => dim = Some(b),
                _ => {}
            }
        }
        Ok(Self::Mixture(components))
    }

    /// Dimension this state requires, `None` if it acts on every dimension.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::NormalizedTrace => None,
            Self::VectorState(x) => Some(x.len()),
            Self::WeightedDiagonal(w) => Some(w.len()),
            Self::Mixture(cs) => cs.iter().find_map(|(_, c)| c.dim()),
        }
    }

    pub fn family(&self) -> FamilyTag {
        match self {
            Self::NormalizedTrace => FamilyTag::Trace,
            Self::VectorState(_) => FamilyTag::Vector,
            Self::WeightedDiagonal(_) => FamilyTag::Weights,
            Self::Mixture(_) => FamilyTag::Mixture,
        }
    }

    /// `ψ(a)`, real for Hermitian `a`.
    pub fn evaluate(&self, a: &HermitianElement) -> Result<f64> {
        let n = a.dim();
        if let Some(d) = self.dim() {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: n,
                });
            }
        }
        Ok(self.evaluate_unchecked(a))
    }

    /// `ψ(u_k u_k*)` for each eigenvector `u_k` of `d`. These are the masses
    /// of the state's spectral measure, so `ψ(g(c)) = Σ_k g(λ_k) ψ(u_k u_k*)`.
    pub fn spectral_weights(&self, d: &SpectralDecomposition) -> Result<Vec<f64>> {
        let n = d.dim();
        if let Some(k) = self.dim() {
            if k != n {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: n,
                });
            }
        }
        let u = d.eigenvectors();
        let mut out = vec![0.0; n];
        self.add_spectral_weights(u, 1.0, &mut out);
        Ok(out)
    }

    fn add_spectral_weights(&self, u: &CMatrix, scale: f64, out: &mut [f64]) {
        let n = out.len();
        match self {
            Self::NormalizedTrace => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += scale * (0..n).map(|j| u[(j, k)].norm_sqr()).sum::<f64>() / n as f64;
                }
            }
            Self::VectorState(x) => {
                for (k, o) in out.iter_mut().enumerate() {
                    let inner: Complex64 = (0..n).map(|j| x[j].conj() * u[(j, k)]).sum();
                    *o += scale * inner.norm_sqr();
                }
            }
            Self::WeightedDiagonal(w) => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += scale * (0..n).map(|j| w[j] * u[(j, k)].norm_sqr()).sum::<f64>();
                }
            }
            Self::Mixture(cs) => {
                for (w, c) in cs {
                    c.add_spectral_weights(u, scale * w, out);
                }
            }
        }
    }

    fn evaluate_unchecked(&self, a: &HermitianElement) -> f64 {
        let m = a.matrix();
        match self {
            Self::NormalizedTrace => a.trace() / a.dim() as f64,
            Self::VectorState(x) => m.quadratic_form(x).re,
            Self::WeightedDiagonal(w) => w.iter().enumerate().map(|(i, wi)| wi * m[(i, i)].re).sum(),
            Self::Mixture(cs) => cs
                .iter()
                .fold(0.0, |acc, (w, c)| acc + w * c.evaluate_unchecked(a)),
        }
    }
}

fn check_probability(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidFunctional(format!("{what} are empty")));
    }
    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidFunctional(format!("{what} must be nonnegative")));
    }
    let total: f64 = w.iter().sum();
    if !((total - 1.0).abs() <= tol::ORDER) {
        return Err(Error::InvalidFunctional(format!("{what} sum to {total}, not 1")));
    }
    Ok(())
}

/// Family selector for sampling and configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Trace,
    Vector,
    Weights,
    Mixture,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [Self::Trace, Self::Vector, Self::Weights, Self::Mixture];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Trace => "trace",
            Self::Vector => "vector",
            Self::Weights => "weights",
            Self::Mixture => "mixture",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "trace" => Ok(Self::Trace),
            "vector" => Ok(Self::Vector),
            "weights" => Ok(Self::Weights),
            "mixture" => Ok(Self::Mixture),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Deterministic sample of a state of the given family.
pub fn sample_functional(dim: usize, family: FamilyTag, seed: u64) -> Result<StateFunctional> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_functional_with(dim, family, &mut rng)
}

/// Unit vectors come from normalized complex Gaussian draws, weights from
/// normalized uniform draws.
pub fn sample_functional_with<R: Rng + ?Sized>(
    dim: usize,
    family: FamilyTag,
    rng: &mut R,
) -> Result<StateFunctional> {
    if dim == 0 {
        return Err(Error::InvalidFunctional("dimension must be at least 1".into()));
    }
    match family {
        FamilyTag::Trace => Ok(StateFunctional::NormalizedTrace),
        FamilyTag::Vector => StateFunctional::vector_normalized(gaussian_vector(dim, rng)),
        FamilyTag::Weights => StateFunctional::weights(uniform_simplex(dim, rng)),
        FamilyTag::Mixture => {
            let parts = [FamilyTag::Trace, FamilyTag::Vector, FamilyTag::Weights];
            let weights = uniform_simplex(parts.len(), rng);
            let components = parts
                .iter()
                .zip(weights)
                .map(|(&p, w)| Ok((w, sample_functional_with(dim, p, rng)?)))
                .collect::<Result<Vec<_>>>()?;
            StateFunctional::mixture(components)
        }
    }
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let x: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if x.iter().any(|z| z.norm_sqr() > 1e-300) {
            return x;
        }
    }
}

fn uniform_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        if total > 1e-12 {
            return raw.into_iter().map(|x| x / total).collect();
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionalJson {
    Trace,
    Vector { re: Vec<f64>, im: Vec<f64> },
    Weights { w: Vec<f64> },
    Mixture { components: Vec<MixtureComponentJson> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponentJson {
    pub weight: f64,
    pub functional: FunctionalJson,
}

impl TryFrom<FunctionalJson> for StateFunctional {
    type Error = Error;

    fn try_from(j: FunctionalJson) -> Result<Self> {
        match j {
            FunctionalJson::Trace => Ok(Self::NormalizedTrace),
            FunctionalJson::Vector { re, im } => {
                if re.len() != im.len() {
                    return Err(Error::InvalidFunctional("re and im lengths differ".into()));
                }
                Self::vector(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
            }
            FunctionalJson::Weights { w } => Self::weights(w),
            FunctionalJson::Mixture { components } => Self::mixture(
                components
                    .into_iter()
                    .map(|c| Ok((c.weight, Self::try_from(c.functional)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl From<StateFunctional> for FunctionalJson {
    fn from(s: StateFunctional) -> Self {
        match s {
            StateFunctional::NormalizedTrace => Self::Trace,
            StateFunctional::VectorState(x) => Self::Vector {
                re: x.iter().map(|z| z.re).collect(),
                im: x.iter().map(|z| z.im).collect(),
            },
            StateFunctional::WeightedDiagonal(w) => Self::Weights { w },
            StateFunctional::Mixture(cs) => Self::Mixture {
                components: cs
                    .into_iter()
                    .map(|(weight, c)| MixtureComponentJson {
                        weight,
                        functional: c.into(),
                    })
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_weights_match_projector_values() {
        use crate::algebra::eigendecompose;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = CMatrix::from_fn(4, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let d = eigendecompose(&HermitianElement::gram(&x));
        for family in FamilyTag::ALL {
            let psi = sample_functional(4, family, 17).unwrap();
            let w = psi.spectral_weights(&d).unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            for (k, wk) in w.iter().enumerate() {
                let mut values = vec![0.0; 4];
                values[k] = 1.0;
                let projector = HermitianElement::from_spectrum(d.eigenvectors(), &values);
                assert!((psi.evaluate(&projector).unwrap() - wk).abs() < 1e-13, "{family}");
            }
        }
        assert!(StateFunctional::weights(vec![1.0]).unwrap().spectral_weights(&d).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let d13 = HermitianElement::from_real_diagonal(&[1.0, 3.0]);
        assert_eq!(StateFunctional::NormalizedTrace.evaluate(&d13).unwrap(), 2.0);

        let two_one = HermitianElement::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e1 = StateFunctional::vector(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert_eq!(e1.evaluate(&two_one).unwrap(), 2.0);

        let w = StateFunctional::weights(vec![0.25, 0.75]).unwrap();
        assert_eq!(w.evaluate(&d13).unwrap(), 2.5);
    }

    #[test]
    fn dimension_mismatch() {
        let w = StateFunctional::weights(vec![0.5, 0.5]).unwrap();
        let c = HermitianElement::identity(3);
        assert!(matches!(
            w.evaluate(&c),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn validation() {
        assert!(StateFunctional::weights(vec![0.5, 0.6]).is_err());
        assert!(StateFunctional::weights(vec![1.5, -0.5]).is_err());
        assert!(StateFunctional::vector(vec![Complex64::new(2.0, 0.0)]).is_err());
        assert!(StateFunctional::mixture(vec![
            (0.5, StateFunctional::weights(vec![1.0]).unwrap()),
            (0.5, StateFunctional::weights(vec![0.5, 0.5]).unwrap()),
        ])
        .is_err());
        assert!(matches!(
            "diamond".parse::<FamilyTag>(),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn samples_are_normalized_and_deterministic() {
        let one = sample_functional(1, FamilyTag::Trace, 7).unwrap();
        assert_eq!(one.evaluate(&HermitianElement::scalar(1, 4.0)).unwrap(), 4.0);

        match sample_functional(3, FamilyTag::Weights, 11).unwrap() {
            StateFunctional::WeightedDiagonal(w) => {
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
        match sample_functional(4, FamilyTag::Vector, 13).unwrap() {
            StateFunctional::VectorState(x) => {
                let n: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < tol::ORDER);
            }
            other => panic!("unexpected {other:?}"),
        }
        for fam in FamilyTag::ALL {
            assert_eq!(
                sample_functional(5, fam, 99).unwrap(),
                sample_functional(5, fam, 99).unwrap()
            );
        }
    }

    #[test]
    fn mixture_is_weighted_sum() {
        let psi = sample_functional(3, FamilyTag::Mixture, 5).unwrap();
        let a = HermitianElement::from_real_rows(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, -2.0, 0.25],
            vec![0.0, 0.25, 3.0],
        ])
        .unwrap();
        let StateFunctional::Mixture(cs) = &psi else { panic!() };
        let direct = cs
            .iter()
            .fold(0.0, |acc, (w, c)| acc + w * c.evaluate(&a).unwrap());
        assert_eq!(psi.evaluate(&a).unwrap(), direct);
    }

    #[test]
    fn json_forms() {
        let t: StateFunctional = serde_json::from_str(r#"{"kind": "trace"}"#).unwrap();
        assert_eq!(t, StateFunctional::NormalizedTrace);
        let psi = sample_functional(2, FamilyTag::Mixture, 3).unwrap();
        let s = serde_json::to_string(&psi).unwrap();
        assert_eq!(serde_json::from_str::<StateFunctional>(&s).unwrap(), psi);
        assert!(serde_json::from_str::<StateFunctional>(r#"{"kind": "weights", "w": [0.2, 0.2]}"#).is_err());
    }
}
