//! Inequality chains over a concrete instance `(c, ψ, f, [m, M])`.
//!
//! Every evaluator returns a [`BoundChain`]: labelled values that must be
//! ordered in the declared direction. Operator quantities such as `ψ(f(c))`
//! or `ψ(c f'(c))` are `Σ_k g(λ_k) ψ(P_k)` over the eigenprojectors `P_k`
//! of `c`. This equals evaluating the state on `U diag(g(λ)) U*`, but its
//! rounding scales with the terms the state actually sees rather than with
//! the largest `|g(λ_k)|`.
//!
//! Differences of such quantities are formed inside the state where
//! linearity allows it. The Jensen gap, for instance, is evaluated as
//! `ψ(f(c) - f(p) - f'(p)(c - p))` with `p = ψ(c)`, so its rounding error is
//! relative to the gap and not to `|f|`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::{eigendecompose, HermitianElement, SpectralDecomposition, SpectralInterval};
use crate::error::{Error, Result};
use crate::functional::StateFunctional;
use crate::registry::{theta, theta_sup, ConvexFunctionSpec};
use crate::tol;

/// The hypotheses of a chain: `σ(c) ⊆ [m, M]` and `[m, M]` inside the
/// domain of `f`.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    c: HermitianElement,
    functional: StateFunctional,
    function: ConvexFunctionSpec,
    window: SpectralInterval,
    spectrum: SpectralDecomposition,
    weights: Vec<f64>,
    moments: OnceLock<Moments>,
}

/// State values shared by most chains.
#[derive(Debug, Clone, Copy)]
struct Moments {
    /// ψ(c)
    c: f64,
    /// ψ(f(c))
    f: f64,
    /// ψ(f'(c))
    df: f64,
    /// ψ(c f'(c))
    c_df: f64,
    /// ψ((c - ψ(c))²)
    variance: f64,
    /// ψ(f(c)) - f(ψ(c))
    gap: f64,
    /// ψ((c - ψ(c)) f'(c))
    covariance: f64,
}

impl InstanceSpec {
    pub fn new(
        c: HermitianElement,
        functional: StateFunctional,
        function: ConvexFunctionSpec,
        window: SpectralInterval,
    ) -> Result<Self> {
        function.check_window(&window)?;
        if let Some(d) = functional.dim() {
            if d != c.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.dim(),
                });
            }
        }
        let spectrum = eigendecompose(&c);
        spectrum.check_window(&window)?;
        let weights = functional.spectral_weights(&spectrum)?;
        Ok(Self {
            c,
            functional,
            function,
            window,
            spectrum,
            weights,
            moments: OnceLock::new(),
        })
    }

    pub fn c(&self) -> &HermitianElement {
        &self.c
    }

    pub fn functional(&self) -> &StateFunctional {
        &self.functional
    }

    pub fn function(&self) -> &ConvexFunctionSpec {
        &self.function
    }

    pub fn window(&self) -> &SpectralInterval {
        &self.window
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `ψ(g(c))` through the spectral measure of the state.
    pub fn psi_of(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let mut sum = 0.0;
        for (&l, &w) in self.spectrum.eigenvalues().iter().zip(&self.weights) {
            let v = g(l);
            if !v.is_finite() {
                return Err(Error::NonFiniteFunctionValue { at: l });
            }
            sum += w * v;
        }
        Ok(sum)
    }

    /// `ψ(g(c))` by evaluating the state on the matrix `g(c)`.
    pub fn psi_of_matrix(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let element = self.spectrum.apply(g, &self.window)?;
        self.functional.evaluate(&element)
    }

    /// `ψ(c)`.
    pub fn psi_c(&self) -> Result<f64> {
        Ok(self.moments()?.c)
    }

    /// `ψ((c - t)²)`.
    pub fn psi_square_deviation(&self, t: f64) -> Result<f64> {
        self.psi_of(|x| (x - t) * (x - t))
    }

    /// `ψ(f(c)) - f(ψ(c))`.
    pub fn jensen_gap(&self) -> Result<f64> {
        Ok(self.moments()?.gap)
    }

    /// `ψ(c²) - ψ(c)²`.
    pub fn variance(&self) -> Result<f64> {
        Ok(self.moments()?.variance)
    }

    /// `ψ(f(c)) - f(t) - f'(t)(ψ(c) - t)`.
    pub fn tangent_remainder(&self, t: f64) -> Result<f64> {
        let f = self.function;
        self.psi_of(|x| f.tangent_remainder(x, t))
    }

    /// `ψ(c f'(c)) - t ψ(f'(c)) - ψ(f(c)) + f(t)`.
    pub fn reverse_tangent_remainder(&self, t: f64) -> Result<f64> {
        let f = self.function;
        self.psi_of(|x| f.reverse_tangent_remainder(x, t))
    }

    fn moments(&self) -> Result<Moments> {
        if let Some(m) = self.moments.get() {
            return Ok(*m);
        }
        let f = self.function;
        let p = self.psi_of(|x| x)?;
        let m = Moments {
            c: p,
            f: self.psi_of(|x| f.f(x))?,
            df: self.psi_of(|x| f.df(x))?,
            c_df: self.psi_of(|x| x * f.df(x))?,
            variance: self.psi_of(|x| (x - p) * (x - p))?,
            gap: self.psi_of(|x| f.tangent_remainder(x, p))?,
            covariance: self.psi_of(|x| (x - p) * (f.df(x) - f.df(p)))?,
        };
        Ok(*self.moments.get_or_init(|| m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainStatus {
    Verified,
    ViolatedAt(usize),
    ConditionNotMet(String),
}

impl ChainStatus {
    pub fn is_violated(&self) -> bool {
        matches!(self, Self::ViolatedAt(_))
    }
}

impl fmt::Display for ChainStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Verified => f.write_str("verified"),
            Self::ViolatedAt(i) => write!(f, "violated_at:{i}"),
            Self::ConditionNotMet(why) => write!(f, "condition_not_met:{why}"),
        }
    }
}

impl Serialize for ChainStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An extra comparison `lower <= upper` charged to chain position `index`.
/// Used where a chain displays the smaller of two branch bounds and the
/// larger one must still sit below the next term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideCheck {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Named ordered values with a declared direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundChain {
    #[serde(rename = "theorem")]
    pub theorem_id: String,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub direction: Direction,
    pub status: ChainStatus,
    #[serde(skip)]
    pub side_checks: Vec<SideCheck>,
}

/// Outcome of [`BoundChain::sharpness`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sharpness {
    Ratio(f64),
    /// Bound and bounded quantity coincide with the lower reference.
    ExactEquality,
    Undefined,
}

impl BoundChain {
    pub fn new(
        theorem_id: &str,
        labels: Vec<String>,
        values: Vec<f64>,
        direction: Direction,
        side_checks: Vec<SideCheck>,
    ) -> Self {
        debug_assert_eq!(labels.len(), values.len());
        let mut chain = Self {
            theorem_id: theorem_id.to_string(),
            labels,
            values,
            direction,
            status: ChainStatus::Verified,
            side_checks,
        };
        chain.recheck(tol::CHAIN);
        chain
    }

    fn from_parts(theorem_id: &str, parts: &[(&str, f64)], direction: Direction) -> Self {
        let (labels, values) = parts.iter().map(|(l, v)| (l.to_string(), *v)).unzip();
        Self::new(theorem_id, labels, values, direction, Vec::new())
    }

    pub fn condition_not_met(theorem_id: &str, reason: impl Into<String>) -> Self {
        Self {
            theorem_id: theorem_id.to_string(),
            labels: Vec::new(),
            values: Vec::new(),
            direction: Direction::NonDecreasing,
            status: ChainStatus::ConditionNotMet(reason.into()),
            side_checks: Vec::new(),
        }
    }

    /// `factor * max(1, max |value|)`.
    pub fn tolerance(&self, factor: f64) -> f64 {
        factor * self.values.iter().fold(1.0f64, |a, v| a.max(v.abs()))
    }

    /// Recomputes the status with tolerance factor `factor`. Chains whose
    /// hypotheses failed keep their status.
    pub fn recheck(&mut self, factor: f64) {
        if matches!(self.status, ChainStatus::ConditionNotMet(_)) {
            return;
        }
        let tol = self.tolerance(factor);
        let mut status = ChainStatus::Verified;
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            status = ChainStatus::ViolatedAt(i);
        } else {
            for (i, w) in self.values.windows(2).enumerate() {
                let ok = match self.direction {
                    Direction::NonDecreasing => w[0] <= w[1] + tol,
                    Direction::NonIncreasing => w[0] + tol >= w[1],
                };
                if !ok {
                    status = ChainStatus::ViolatedAt(i + 1);
                    break;
                }
            }
            if status == ChainStatus::Verified {
                if let Some(s) = self.side_checks.iter().find(|s| !(s.lower <= s.upper + tol)) {
                    status = ChainStatus::ViolatedAt(s.index);
                }
            }
        }
        self.status = status;
    }

    pub fn is_verified(&self) -> bool {
        self.status == ChainStatus::Verified
    }

    /// Values in ascending order of the declared direction.
    fn ascending(&self) -> Vec<f64> {
        match self.direction {
            Direction::NonDecreasing => self.values.clone(),
            Direction::NonIncreasing => self.values.iter().rev().copied().collect(),
        }
    }

    /// Where the bounded quantity sits between its neighbours:
    /// `(middle - lower) / (upper - lower)` on the first three ascending
    /// terms, or `lower / upper` for a two-term chain of positive values.
    pub fn sharpness(&self) -> Sharpness {
        if !self.is_verified() {
            return Sharpness::Undefined;
        }
        let a = self.ascending();
        let tol = self.tolerance(tol::CHAIN);
        match a.len() {
            0 | 1 => Sharpness::Undefined,
            2 => {
                if a[1].abs() <= tol && a[0].abs() <= tol {
                    Sharpness::ExactEquality
                } else if a[0] >= 0.0 && a[1] > 0.0 {
                    Sharpness::Ratio(a[0] / a[1])
                } else {
                    Sharpness::Undefined
                }
            }
            _ => {
                let num = a[1] - a[0];
                let den = a[2] - a[0];
                if den.abs() <= tol {
                    Sharpness::ExactEquality
                } else {
                    Sharpness::Ratio(num / den)
                }
            }
        }
    }
}

/// Identifier and one-line description of each chain evaluator.
pub const CHAIN_CATALOG: [(&str, &str); 13] = [
    ("mccarthy", "power-mean comparison psi(c)^p against psi(c^p)"),
    ("gradient_reverse", "Jensen gap <= gradient covariance <= Gruss-type branches"),
    ("theta_reverse", "Jensen gap <= secant-slope supremum bound"),
    ("theta_pointwise", "Jensen gap <= slope defect at psi(c)"),
    ("lah_ribaric", "psi(f(c)) <= secant through (m, f(m)) and (M, f(M))"),
    ("midpoint_reverse", "Jensen gap <= midpoint defect bound"),
    ("taylor_twosided", "two-sided curvature bound around a point t"),
    ("taylor_gradient", "two-sided curvature bound with f'(c) around t"),
    ("jensen_curvature", "Jensen gap between k/2 and K/2 times the variance"),
    ("midpoint_curvature", "curvature bounds at t = (m+M)/2, both forms"),
    ("slater", "curvature bounds at t = psi(c f'(c)) / psi(f'(c)), both forms"),
    ("integral_mean", "curvature bounds against the integral mean of f, both forms"),
    ("variance", "0 <= variance <= (M - psi(c))(psi(c) - m) <= (M-m)^2/4"),
];

/// Chain ids of every chain produced by [`all_chains`], in order.
pub const CHAIN_IDS: [&str; 16] = [
    "mccarthy",
    "gradient_reverse",
    "theta_reverse",
    "theta_pointwise",
    "lah_ribaric",
    "midpoint_reverse",
    "taylor_twosided",
    "taylor_gradient",
    "jensen_curvature",
    "midpoint_curvature",
    "midpoint_curvature_gradient",
    "slater",
    "slater_tangent",
    "integral_mean_secant",
    "integral_mean_tangent",
    "variance",
];

/// Default power-mean exponent for a registry function.
pub fn default_mccarthy_exponent(f: &ConvexFunctionSpec) -> f64 {
    match *f {
        ConvexFunctionSpec::Pow(p) => p,
        ConvexFunctionSpec::NegPow(r) => r,
        ConvexFunctionSpec::NegRoot(q) => q,
        ConvexFunctionSpec::Inv => -1.0,
        ConvexFunctionSpec::NegLog => 0.5,
        ConvexFunctionSpec::TLogT | ConvexFunctionSpec::Exp(_) => 2.0,
    }
}

fn derivative_span(inst: &InstanceSpec) -> f64 {
    let w = inst.window();
    inst.function().df(w.M()) - inst.function().df(w.m())
}

/// Power means: `ψ(c)^p >= ψ(c^p)` for `p in (0,1)`, `ψ(c^q) >= ψ(c)^q` for
/// `q >= 1`, and `ψ(c^r) >= ψ(c)^r` for `r < 0`.
pub fn chain_mccarthy(inst: &InstanceSpec, exponent: f64) -> Result<BoundChain> {
    const ID: &str = "mccarthy";
    let d = inst.spectrum();
    let psi_c = inst.psi_c()?;
    if exponent > 0.0 && exponent < 1.0 {
        if d.min() < -tol::POS {
            return Err(Error::PreconditionViolated(format!(
                "exponent {exponent} in (0,1) needs c >= 0, min eigenvalue is {}",
                d.min()
            )));
        }
        let pc = psi_c.max(0.0);
        let psi_pow = inst.functional().evaluate(&d.map(|x| x.max(0.0).powf(exponent))?)?;
        Ok(BoundChain::from_parts(
            ID,
            &[("psi(c)^p", pc.powf(exponent)), ("psi(c^p)", psi_pow)],
            Direction::NonIncreasing,
        ))
    } else if exponent >= 1.0 {
        if d.min() < -tol::POS {
            return Err(Error::PreconditionViolated(format!(
                "exponent {exponent} >= 1 needs c >= 0, min eigenvalue is {}",
                d.min()
            )));
        }
        let pc = psi_c.max(0.0);
        let psi_pow = inst.functional().evaluate(&d.map(|x| x.max(0.0).powf(exponent))?)?;
        Ok(BoundChain::from_parts(
            ID,
            &[("psi(c^q)", psi_pow), ("psi(c)^q", pc.powf(exponent))],
            Direction::NonIncreasing,
        ))
    } else if exponent < 0.0 {
        if !(d.min() > tol::POS) {
            return Err(Error::PreconditionViolated(format!(
                "exponent {exponent} < 0 needs c > 0, min eigenvalue is {}",
                d.min()
            )));
        }
        if !(psi_c > 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "exponent {exponent} < 0 needs psi(c) > 0, got {psi_c}"
            )));
        }
        let psi_pow = inst.functional().evaluate(&d.map(|x| x.powf(exponent))?)?;
        Ok(BoundChain::from_parts(
            ID,
            &[("psi(c^r)", psi_pow), ("psi(c)^r", psi_c.powf(exponent))],
            Direction::NonIncreasing,
        ))
    } else {
        Err(Error::PreconditionViolated(format!(
            "exponent {exponent} is not in (0,1), [1,inf) or (-inf,0)"
        )))
    }
}

/// `0 <= gap <= ψ(c f'(c)) - ψ(c)ψ(f'(c)) <= min(B1, B2) <= ¼(M-m)(f'(M)-f'(m))`
/// with `B1 = ½(M-m) sqrt(ψ(f'(c)²) - ψ(f'(c))²)` and
/// `B2 = ½(f'(M)-f'(m)) sqrt(ψ(c²) - ψ(c)²)`.
pub fn chain_gradient_reverse(inst: &InstanceSpec) -> Result<BoundChain> {
    let f = *inst.function();
    let w = inst.window();
    let mo = inst.moments()?;
    let derivative_variance = inst.psi_of(|x| {
        let d = f.df(x) - mo.df;
        d * d
    })?;
    let span = derivative_span(inst);
    let derivative_branch = 0.5 * w.width() * derivative_variance.max(0.0).sqrt();
    let variance_branch = 0.5 * span * mo.variance.max(0.0).sqrt();
    let terminal = 0.25 * w.width() * span;
    let (lo, hi) = min_max(derivative_branch, variance_branch);
    Ok(BoundChain::new(
        "gradient_reverse",
        vec![
            "zero".into(),
            "jensen_gap".into(),
            "gradient_covariance".into(),
            format!("min(derivative_branch={derivative_branch}, variance_branch={variance_branch})"),
            "quarter_width_times_derivative_span".into(),
        ],
        vec![0.0, mo.gap, mo.covariance, lo, terminal],
        Direction::NonDecreasing,
        vec![SideCheck {
            index: 4,
            lower: hi,
            upper: terminal,
        }],
    ))
}

fn min_max(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn require_interior_state(inst: &InstanceSpec) -> std::result::Result<f64, String> {
    let pc = inst.psi_c().map_err(|e| e.to_string())?;
    if inst.window().contains_interior(pc) {
        Ok(pc)
    } else {
        let w = inst.window();
        Err(format!("psi(c) = {pc} is not inside ({}, {})", w.m(), w.M()))
    }
}

/// `0 <= gap <= (M-ψ)(ψ-m)/(M-m) sup Θ <= min(¼(M-m) sup Θ,
/// (M-ψ)(ψ-m)(f'(M)-f'(m))/(M-m)) <= ¼(M-m)(f'(M)-f'(m))`, for
/// `ψ(c) in (m, M)`.
pub fn chain_theta_reverse(inst: &InstanceSpec) -> Result<BoundChain> {
    const ID: &str = "theta_reverse";
    let pc = match require_interior_state(inst) {
        Ok(pc) => pc,
        Err(why) => return Ok(BoundChain::condition_not_met(ID, why)),
    };
    let w = inst.window();
    let (m, big_m) = (w.m(), w.M());
    let sup = theta_sup(inst.function(), w);
    let span = derivative_span(inst);
    let weight = (big_m - pc) * (pc - m) / (big_m - m);
    let gap = inst.jensen_gap()?;
    let sup_branch = 0.25 * w.width() * sup;
    let span_branch = weight * span;
    let (lo, hi) = min_max(sup_branch, span_branch);
    let terminal = 0.25 * w.width() * span;
    Ok(BoundChain::new(
        ID,
        vec![
            "zero".into(),
            "jensen_gap".into(),
            "state_weight_times_theta_sup".into(),
            format!("min(quarter_width_theta_sup={sup_branch}, state_weight_derivative_span={span_branch})"),
            "quarter_width_times_derivative_span".into(),
        ],
        vec![0.0, gap, weight * sup, lo, terminal],
        Direction::NonDecreasing,
        vec![SideCheck {
            index: 4,
            lower: hi,
            upper: terminal,
        }],
    ))
}

/// `0 <= gap <= ¼(M-m) Θ(ψ(c)) <= ¼(M-m) sup Θ <= ¼(M-m)(f'(M)-f'(m))`.
pub fn chain_theta_pointwise(inst: &InstanceSpec) -> Result<BoundChain> {
    const ID: &str = "theta_pointwise";
    let pc = match require_interior_state(inst) {
        Ok(pc) => pc,
        Err(why) => return Ok(BoundChain::condition_not_met(ID, why)),
    };
    let w = inst.window();
    let quarter = 0.25 * w.width();
    let at_state = theta(inst.function(), pc, w)?;
    let sup = theta_sup(inst.function(), w);
    Ok(BoundChain::from_parts(
        ID,
        &[
            ("zero", 0.0),
            ("jensen_gap", inst.jensen_gap()?),
            ("quarter_width_theta_at_state", quarter * at_state),
            ("quarter_width_theta_sup", quarter * sup),
            ("quarter_width_times_derivative_span", quarter * derivative_span(inst)),
        ],
        Direction::NonDecreasing,
    ))
}

/// `ψ(f(c)) <= (f(M)(ψ(c) - m) + f(m)(M - ψ(c))) / (M - m)`.
pub fn chain_lah_ribaric(inst: &InstanceSpec) -> Result<BoundChain> {
    let f = inst.function();
    let w = inst.window();
    let (m, big_m) = (w.m(), w.M());
    let mo = inst.moments()?;
    let secant = (f.f(big_m) * (mo.c - m) + f.f(m) * (big_m - mo.c)) / (big_m - m);
    Ok(BoundChain::from_parts(
        "lah_ribaric",
        &[("psi(f(c))", mo.f), ("secant_at_state", secant)],
        Direction::NonDecreasing,
    ))
}

/// `0 <= gap <= (1 + 2|ψ(c) - (m+M)/2| / (M-m)) ((f(m)+f(M))/2 - f((m+M)/2))
/// <= f(m) + f(M) - 2 f((m+M)/2)`.
pub fn chain_midpoint_reverse(inst: &InstanceSpec) -> Result<BoundChain> {
    let f = inst.function();
    let w = inst.window();
    let (m, big_m, mid) = (w.m(), w.M(), w.midpoint());
    let pc = inst.psi_c()?;
    // (f(m) + f(M))/2 - f(mid), free of cancellation on narrow windows
    let half_defect = 0.25 * (big_m - m) * (f.slope(mid, big_m) - f.slope(m, mid)).max(0.0);
    let multiplier = 1.0 + 2.0 * (pc - mid).abs() / (big_m - m);
    Ok(BoundChain::from_parts(
        "midpoint_reverse",
        &[
            ("zero", 0.0),
            ("jensen_gap", inst.jensen_gap()?),
            ("scaled_midpoint_defect", multiplier * half_defect),
            ("full_midpoint_defect", 2.0 * half_defect),
        ],
        Direction::NonDecreasing,
    ))
}

fn check_point(inst: &InstanceSpec, t: f64) -> Result<()> {
    let w = inst.window();
    if w.contains(t) {
        Ok(())
    } else {
        Err(Error::TOutOfWindow {
            t,
            m: w.m(),
            big_m: w.M(),
        })
    }
}

fn curvature_chain(id: &str, inst: &InstanceSpec, scale: f64, weight: f64, middle_label: &str, middle: f64) -> BoundChain {
    let (k, big_k) = inst.function().curvature_bounds(inst.window());
    BoundChain::from_parts(
        id,
        &[
            ("upper_curvature_bound", scale * big_k * weight),
            (middle_label, middle),
            ("lower_curvature_bound", scale * k * weight),
        ],
        Direction::NonIncreasing,
    )
}

/// `½K ψ((c-t)²) >= ψ(f(c)) - f'(t)(ψ(c) - t) - f(t) >= ½k ψ((c-t)²)`.
pub fn chain_taylor_twosided(inst: &InstanceSpec, t: f64) -> Result<BoundChain> {
    taylor_twosided_as("taylor_twosided", inst, t)
}

fn taylor_twosided_as(id: &str, inst: &InstanceSpec, t: f64) -> Result<BoundChain> {
    check_point(inst, t)?;
    let q = inst.psi_square_deviation(t)?;
    let middle = inst.tangent_remainder(t)?;
    Ok(curvature_chain(id, inst, 0.5, q, "tangent_remainder", middle))
}

/// `½K ψ((c-t)²) >= ψ(c f'(c)) - t ψ(f'(c)) + f(t) - ψ(f(c)) >= ½k ψ((c-t)²)`.
pub fn chain_taylor_gradient(inst: &InstanceSpec, t: f64) -> Result<BoundChain> {
    taylor_gradient_as("taylor_gradient", inst, t)
}

fn taylor_gradient_as(id: &str, inst: &InstanceSpec, t: f64) -> Result<BoundChain> {
    check_point(inst, t)?;
    let q = inst.psi_square_deviation(t)?;
    let middle = inst.reverse_tangent_remainder(t)?;
    Ok(curvature_chain(id, inst, 0.5, q, "gradient_remainder", middle))
}

/// `½K (ψ(c²) - ψ(c)²) >= gap >= ½k (ψ(c²) - ψ(c)²)`.
pub fn chain_jensen_curvature(inst: &InstanceSpec) -> Result<BoundChain> {
    let mo = inst.moments()?;
    Ok(curvature_chain("jensen_curvature", inst, 0.5, mo.variance, "jensen_gap", mo.gap))
}

/// Both curvature chains at `t = (m + M)/2`.
pub fn chain_midpoint_curvature(inst: &InstanceSpec) -> Result<Vec<BoundChain>> {
    let mid = inst.window().midpoint();
    Ok(vec![
        taylor_twosided_as("midpoint_curvature", inst, mid)?,
        taylor_gradient_as("midpoint_curvature_gradient", inst, mid)?,
    ])
}

/// Both curvature chains at `t* = ψ(c f'(c)) / ψ(f'(c))`, when
/// `ψ(f'(c)) != 0` and `t* in [m, M]`:
///
/// `½K ψ((c-t*)²) >= f(t*) - ψ(f(c)) >= ½k ψ((c-t*)²)` and
/// `½K ψ((c-t*)²) >= f'(t*)(t* - ψ(c)) - f(t*) + ψ(f(c)) >= ½k ψ((c-t*)²)`.
pub fn chain_slater(inst: &InstanceSpec) -> Result<Vec<BoundChain>> {
    const IDS: [&str; 2] = ["slater", "slater_tangent"];
    let w = inst.window();
    let mo = inst.moments()?;
    let not_met = |why: String| IDS.iter().map(|id| BoundChain::condition_not_met(id, why.clone())).collect();
    if !(mo.df.abs() > tol::POS) {
        return Ok(not_met(format!("psi(f'(c)) = {} is too close to zero", mo.df)));
    }
    let t_star = mo.c_df / mo.df;
    if !w.contains(t_star) {
        return Ok(not_met(format!(
            "slater point {t_star} is outside [{}, {}]",
            w.m(),
            w.M()
        )));
    }
    let q = inst.psi_square_deviation(t_star)?;
    // At the exact t*, ψ((c - t*) f'(c)) = 0 and so f(t*) - ψ(f(c)) equals
    // ψ(R_t*(c)) with R_t(x) = (x - t) f'(x) - f(x) + f(t). The literal
    // difference moves by f'(t*) per unit of rounding in t*; this form only
    // by f'(t*) - ψ(f'(c)).
    let value_gap = inst.reverse_tangent_remainder(t_star)?;
    Ok(vec![
        curvature_chain(IDS[0], inst, 0.5, q, "value_at_slater_point_minus_psi(f(c))", value_gap),
        curvature_chain(
            IDS[1],
            inst,
            0.5,
            q,
            "tangent_remainder_at_slater_point",
            inst.tangent_remainder(t_star)?,
        ),
    ])
}

/// `(M-m)²/12 + ψ((c - (m+M)/2)²)`.
fn integral_weight(inst: &InstanceSpec) -> Result<f64> {
    let w = inst.window();
    Ok(w.width() * w.width() / 12.0 + inst.psi_square_deviation(w.midpoint())?)
}

/// Curvature chains against the integral mean `μ = (1/(M-m)) ∫ f`, with
/// `W = (M-m)²/12 + ψ((c - (m+M)/2)²)`:
///
/// `¼K W >= ½[ψ(f(c)) + ((M-ψ(c))f(M) + (ψ(c)-m)f(m))/(M-m)] - μ >= ¼k W` and
/// `½K W >= μ - ψ(f(c)) - ((m+M)/2) ψ(f'(c)) + ψ(c f'(c)) >= ½k W`.
pub fn chain_integral_mean(inst: &InstanceSpec) -> Result<Vec<BoundChain>> {
    let f = inst.function();
    let w = inst.window();
    let (m, big_m, mid) = (w.m(), w.M(), w.midpoint());
    let weight = integral_weight(inst)?;
    // everything below is measured from f((m+M)/2)
    let excess = f.integral_mean_excess(w);
    let (right, left) = (f.slope(mid, big_m), f.slope(m, mid));
    // ½[f(x) + ((M-x)f(M) + (x-m)f(m))/(M-m)] - f((m+M)/2), pointwise
    let half_sum = inst.psi_of(|x| 0.5 * ((x - mid) * f.slope(mid, x) + 0.5 * ((big_m - x) * right - (x - m) * left)))?;
    Ok(vec![
        curvature_chain(
            "integral_mean_secant",
            inst,
            0.25,
            weight,
            "half_sum_minus_integral_mean",
            half_sum - excess,
        ),
        curvature_chain(
            "integral_mean_tangent",
            inst,
            0.5,
            weight,
            "integral_mean_tangent_remainder",
            excess + inst.reverse_tangent_remainder(mid)?,
        ),
    ])
}

/// The tangent integral-mean chain with the sign of `ψ(c f'(c))` flipped.
/// This variant does not follow from the curvature bound; it is evaluated
/// for reporting only and never counts as a violation.
pub fn integral_mean_tangent_flipped(inst: &InstanceSpec) -> Result<BoundChain> {
    let w = inst.window();
    let mo = inst.moments()?;
    let mean = inst.function().integral_mean(w);
    let weight = integral_weight(inst)?;
    Ok(curvature_chain(
        "integral_mean_tangent_flipped",
        inst,
        0.5,
        weight,
        "flipped_tangent_remainder",
        mean - mo.f - w.midpoint() * mo.df - mo.c_df,
    ))
}

/// `0 <= ψ(c²) - ψ(c)² <= (M - ψ(c))(ψ(c) - m) <= ¼(M-m)²`, independent of
/// the instance's function.
pub fn chain_variance(inst: &InstanceSpec) -> Result<BoundChain> {
    let w = inst.window();
    let (m, big_m) = (w.m(), w.M());
    let mo = inst.moments()?;
    Ok(BoundChain::from_parts(
        "variance",
        &[
            ("zero", 0.0),
            ("variance", mo.variance),
            ("state_position_product", (big_m - mo.c) * (mo.c - m)),
            ("quarter_width_squared", 0.25 * w.width() * w.width()),
        ],
        Direction::NonDecreasing,
    ))
}

/// Parameters of the chains that take a point or an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub taylor_point: f64,
    pub mccarthy_exponent: f64,
}

impl ChainParams {
    /// Expansion point at the window midpoint and the function's default
    /// power-mean exponent.
    pub fn defaults_for(inst: &InstanceSpec) -> Self {
        Self {
            taylor_point: inst.window().midpoint(),
            mccarthy_exponent: default_mccarthy_exponent(inst.function()),
        }
    }
}

/// Evaluates every chain in [`CHAIN_IDS`] order. Evaluator errors become
/// `ConditionNotMet` chains carrying the error message.
pub fn all_chains(inst: &InstanceSpec, params: &ChainParams) -> Vec<BoundChain> {
    fn one(id: &str, r: Result<BoundChain>) -> Vec<BoundChain> {
        vec![r.unwrap_or_else(|e| BoundChain::condition_not_met(id, e.to_string()))]
    }
    fn many(ids: &[&str], r: Result<Vec<BoundChain>>) -> Vec<BoundChain> {
        r.unwrap_or_else(|e| {
            ids.iter()
                .map(|id| BoundChain::condition_not_met(id, e.to_string()))
                .collect()
        })
    }
    let mut out = Vec::with_capacity(CHAIN_IDS.len());
    out.extend(one("mccarthy", chain_mccarthy(inst, params.mccarthy_exponent)));
    out.extend(one("gradient_reverse", chain_gradient_reverse(inst)));
    out.extend(one("theta_reverse", chain_theta_reverse(inst)));
    out.extend(one("theta_pointwise", chain_theta_pointwise(inst)));
    out.extend(one("lah_ribaric", chain_lah_ribaric(inst)));
    out.extend(one("midpoint_reverse", chain_midpoint_reverse(inst)));
    out.extend(one("taylor_twosided", chain_taylor_twosided(inst, params.taylor_point)));
    out.extend(one("taylor_gradient", chain_taylor_gradient(inst, params.taylor_point)));
    out.extend(one("jensen_curvature", chain_jensen_curvature(inst)));
    out.extend(many(
        &["midpoint_curvature", "midpoint_curvature_gradient"],
        chain_midpoint_curvature(inst),
    ));
    out.extend(many(&["slater", "slater_tangent"], chain_slater(inst)));
    out.extend(many(
        &["integral_mean_secant", "integral_mean_tangent"],
        chain_integral_mean(inst),
    ));
    out.extend(one("variance", chain_variance(inst)));
    out
}
