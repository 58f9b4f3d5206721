//! Catalog of analytic convex functions with derivatives, curvature bounds and
//! the secant-slope quantities built on them.
//!
//! For a window `[m, M]` the slope defect is
//!
//! ```text
//! Θ(t) = (f(M) - f(t)) / (M - t) - (f(t) - f(m)) / (t - m),   t in (m, M)
//! ```
//!
//! and the secant defect is
//!
//! ```text
//! Δ(t) = ((t - m) f(M) + (M - t) f(m)) / (M - m) - f(t),      t in [m, M]
//! ```
//!
//! with `Δ(t) = (M - t)(t - m) / (M - m) * Θ(t)` on the open interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::SpectralInterval;
use crate::error::{Error, Result};
use crate::tol;

/// Grid resolution of the numeric supremum of `Θ`.
pub const THETA_SUP_GRID: usize = 513;
const GOLDEN_WIDTH: f64 = 1e-10;
const SIMPSON_TOL: f64 = 1e-13;

/// A convex function from the registry, addressed by its selector string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ConvexFunctionSpec {
    /// `t^p`, `p > 1`, on `(0, ∞)`.
    Pow(f64),
    /// `t^r`, `r < 0`, on `(0, ∞)`.
    NegPow(f64),
    /// `-t^q`, `0 < q < 1`, on `(0, ∞)`.
    NegRoot(f64),
    /// `1/t` on `(0, ∞)`.
    Inv,
    /// `-ln t` on `(0, ∞)`.
    NegLog,
    /// `t ln t` on `(0, ∞)`.
    TLogT,
    /// `exp(αt)`, `α != 0`, on the real line.
    Exp(f64),
}

/// Functions exercised by the default campaign.
pub const DEFAULT_SELECTORS: [&str; 8] = [
    "pow:2",
    "pow:3",
    "pow:1.5",
    "inv",
    "neglog",
    "negroot:0.5",
    "tlogt",
    "exp:1",
];

/// Selector syntax for each family, for `list-functions`.
pub const SELECTOR_SYNTAX: [(&str, &str); 7] = [
    ("pow:p", "t^p with p > 1"),
    ("negpow:r", "t^r with r < 0"),
    ("negroot:q", "-t^q with 0 < q < 1"),
    ("inv", "1/t"),
    ("neglog", "-ln t"),
    ("tlogt", "t ln t"),
    ("exp:alpha", "exp(alpha t) with alpha != 0"),
];

impl ConvexFunctionSpec {
    pub fn defaults() -> Vec<Self> {
        DEFAULT_SELECTORS.iter().map(|s| s.parse().unwrap()).collect()
    }

    pub fn selector(&self) -> String {
        self.to_string()
    }

    pub fn f(&self, t: f64) -> f64 {
        match *self {
            Self::Pow(p) => t.powf(p),
            Self::NegPow(r) => t.powf(r),
            Self::NegRoot(q) => -t.powf(q),
            Self::Inv => 1.0 / t,
            Self::NegLog => -t.ln(),
            Self::TLogT => t * t.ln(),
            Self::Exp(a) => (a * t).exp(),
        }
    }

    pub fn df(&self, t: f64) -> f64 {
        match *self {
            Self::Pow(p) => p * t.powf(p - 1.0),
            Self::NegPow(r) => r * t.powf(r - 1.0),
            Self::NegRoot(q) => -q * t.powf(q - 1.0),
            Self::Inv => -1.0 / (t * t),
            Self::NegLog => -1.0 / t,
            Self::TLogT => t.ln() + 1.0,
            Self::Exp(a) => a * (a * t).exp(),
        }
    }

    pub fn d2f(&self, t: f64) -> f64 {
        match *self {
            Self::Pow(p) => p * (p - 1.0) * t.powf(p - 2.0),
            Self::NegPow(r) => r * (r - 1.0) * t.powf(r - 2.0),
            Self::NegRoot(q) => q * (1.0 - q) * t.powf(q - 2.0),
            Self::Inv => 2.0 / (t * t * t),
            Self::NegLog => 1.0 / (t * t),
            Self::TLogT => 1.0 / t,
            Self::Exp(a) => a * a * (a * t).exp(),
        }
    }

    /// Open domain `(lo, hi)`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Exp(_) => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn in_domain(&self, t: f64) -> bool {
        let (lo, hi) = self.domain();
        lo < t && t < hi
    }

    /// Fails unless `[m, M]` lies inside the open domain.
    pub fn check_window(&self, w: &SpectralInterval) -> Result<()> {
        if self.in_domain(w.m()) && self.in_domain(w.M()) {
            Ok(())
        } else {
            Err(Error::WindowOutsideDomain {
                m: w.m(),
                big_m: w.M(),
                function: self.selector(),
            })
        }
    }

    /// Whether `f''` is decreasing on the domain, which puts `K` at `m`.
    fn curvature_decreasing(&self) -> bool {
        match *self {
            Self::Pow(p) => p < 2.0,
            Self::NegPow(_) | Self::NegRoot(_) | Self::Inv | Self::NegLog | Self::TLogT => true,
            Self::Exp(a) => a < 0.0,
        }
    }

    /// `(k, K)` with `K >= f'' >= k >= 0` on `[m, M]`. Every registry `f''`
    /// is monotone, so the bounds sit at the endpoints.
    pub fn curvature_bounds(&self, w: &SpectralInterval) -> (f64, f64) {
        let at_m = self.d2f(w.m());
        let at_big_m = self.d2f(w.M());
        if self.curvature_decreasing() {
            (at_big_m, at_m)
        } else {
            (at_m, at_big_m)
        }
    }

    /// Closed form of `sup Θ` where one is known.
    pub fn theta_sup_closed_form(&self, w: &SpectralInterval) -> Option<f64> {
        let (m, big_m) = (w.m(), w.M());
        match *self {
            Self::Pow(2.0) => Some(big_m - m),
            Self::Inv => Some((big_m - m) / (m * m * big_m)),
            _ => None,
        }
    }

    /// `(1 / (M - m)) ∫_m^M f`, in closed form. Positive-domain functions
    /// are written in terms of `h = (M - m)/m` so that narrow windows do not
    /// cancel.
    pub fn integral_mean(&self, w: &SpectralInterval) -> f64 {
        let (m, big_m) = (w.m(), w.M());
        let h = (big_m - m) / m;
        match *self {
            Self::Pow(p) => power_mean(m, h, p),
            Self::NegPow(r) => power_mean(m, h, r),
            Self::NegRoot(q) => -power_mean(m, h, q),
            Self::Inv => power_mean(m, h, -1.0),
            Self::NegLog => -(m.ln() + log_mean_excess(h)),
            Self::TLogT => m * (m.ln() * (1.0 + 0.5 * h) + tlogt_mean_excess(h)),
            Self::Exp(a) => {
                let x = a * (big_m - m);
                (a * m).exp() * x.exp_m1() / x
            }
        }
    }

    /// Divided difference `(f(b) - f(a)) / (b - a)`, or `f'(a)` when
    /// `a == b`, written without subtracting nearby values of `f`.
    pub fn slope(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return self.df(a);
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let h = (hi - lo) / lo;
        match *self {
            Self::Pow(2.0) => lo + hi,
            Self::Pow(3.0) => lo * lo + lo * hi + hi * hi,
            Self::Pow(e) | Self::NegPow(e) if lo > 0.0 => lo.powf(e - 1.0) * (e * h.ln_1p()).exp_m1() / h,
            Self::NegRoot(q) if lo > 0.0 => -lo.powf(q - 1.0) * (q * h.ln_1p()).exp_m1() / h,
            Self::Inv => -1.0 / (lo * hi),
            Self::NegLog if lo > 0.0 => -h.ln_1p() / (lo * h),
            Self::TLogT if lo > 0.0 => hi.ln() + h.ln_1p() / h,
            Self::Exp(al) => {
                let x = al * (hi - lo);
                al * (al * lo).exp() * x.exp_m1() / x
            }
            _ => (self.f(hi) - self.f(lo)) / (hi - lo),
        }
    }

    /// Bregman remainder `f(x) - f(t) - f'(t)(x - t) >= 0`.
    pub fn tangent_remainder(&self, x: f64, t: f64) -> f64 {
        (x - t) * (self.slope(t, x) - self.df(t))
    }

    /// `(x - t) f'(x) - f(x) + f(t) >= 0`, the remainder of the tangent at
    /// `x` evaluated at `t`.
    pub fn reverse_tangent_remainder(&self, x: f64, t: f64) -> f64 {
        (x - t) * (self.df(x) - self.slope(t, x))
    }

    /// `(1 / (M - m)) ∫_m^M f - f((m + M)/2)`. Narrow windows integrate the
    /// tangent remainder at the midpoint by Gauss-Legendre quadrature, which
    /// keeps the small result accurate; wide windows use the closed form.
    pub fn integral_mean_excess(&self, w: &SpectralInterval) -> f64 {
        let (m, mid) = (w.m(), w.midpoint());
        let narrow = match *self {
            Self::Exp(a) => (a * w.width()).abs() <= 8.0,
            _ => w.width() <= m,
        };
        if narrow {
            let half = 0.5 * w.width();
            // the odd part of the tangent integrates to zero
            gauss_legendre_16()
                .iter()
                .map(|&(x, wt)| wt * self.tangent_remainder(mid + half * x, mid))
                .sum::<f64>()
                * 0.5
        } else {
            self.integral_mean(w) - self.f(mid)
        }
    }

    /// Integral mean by adaptive Simpson quadrature.
    pub fn integral_mean_numeric(&self, w: &SpectralInterval) -> Result<f64> {
        let rough = (self.f(w.m()).abs() + self.f(w.M()).abs()) * w.width();
        let tol = SIMPSON_TOL * rough.max(1.0);
        Ok(adaptive_simpson(|t| self.f(t), w.m(), w.M(), tol)? / w.width())
    }
}

/// Nodes and weights of the 16-point Gauss-Legendre rule on `[-1, 1]`, by
/// Newton iteration on the Legendre polynomial.
fn gauss_legendre_16() -> &'static [(f64, f64); 16] {
    static RULE: std::sync::OnceLock<[(f64, f64); 16]> = std::sync::OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = [(0.0, 0.0); N];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// Mean of `t^e` over `[m, m(1 + h)]`.
fn power_mean(m: f64, h: f64, e: f64) -> f64 {
    let l = h.ln_1p();
    if e == -1.0 {
        l / (m * h)
    } else {
        m.powf(e) * ((e + 1.0) * l).exp_m1() / ((e + 1.0) * h)
    }
}

/// `(1/h) ∫_0^h ln(1 + u) du`.
fn log_mean_excess(h: f64) -> f64 {
    if h < 1e-2 {
        // Σ (-1)^(k+1) h^k / (k (k+1))
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 1..=12 {
            pow *= h;
            let term = pow / (k * (k + 1)) as f64;
            sum += if k % 2 == 1 { term } else { -term };
        }
        sum
    } else {
        ((1.0 + h) * h.ln_1p() - h) / h
    }
}

/// `(1/h) ∫_0^h (1 + u) ln(1 + u) du`.
fn tlogt_mean_excess(h: f64) -> f64 {
    if h < 1e-2 {
        // h/2 + Σ_{k>=2} (-1)^k h^k / ((k+1) k (k-1))
        let mut sum = 0.5 * h;
        let mut pow = h;
        for k in 2..=12 {
            pow *= h;
            let term = pow / ((k + 1) * k * (k - 1)) as f64;
            sum += if k % 2 == 0 { term } else { -term };
        }
        sum
    } else {
        let s = 1.0 + h;
        (0.5 * s * s * h.ln_1p() - 0.25 * (2.0 * h + h * h)) / h
    }
}

impl fmt::Display for ConvexFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pow(p) => write!(f, "pow:{p}"),
            Self::NegPow(r) => write!(f, "negpow:{r}"),
            Self::NegRoot(q) => write!(f, "negroot:{q}"),
            Self::Inv => f.write_str("inv"),
            Self::NegLog => f.write_str("neglog"),
            Self::TLogT => f.write_str("tlogt"),
            Self::Exp(a) => write!(f, "exp:{a}"),
        }
    }
}

impl FromStr for ConvexFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidSelector(format!("{s}: {why}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let param = || -> Result<f64> {
            let a = arg.ok_or_else(|| bad("missing parameter"))?;
            let v: f64 = a.trim().parse().map_err(|_| bad("parameter is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("parameter is not finite"))
            }
        };
        let no_param = |spec: Self| {
            if arg.is_some() {
                Err(bad("takes no parameter"))
            } else {
                Ok(spec)
            }
        };
        match head {
            "pow" => {
                let p = param()?;
                if p > 1.0 {
                    Ok(Self::Pow(p))
                } else {
                    Err(bad("need p > 1"))
                }
            }
            "negpow" => {
                let r = param()?;
                if r < 0.0 {
                    Ok(Self::NegPow(r))
                } else {
                    Err(bad("need r < 0"))
                }
            }
            "negroot" => {
                let q = param()?;
                if q > 0.0 && q < 1.0 {
                    Ok(Self::NegRoot(q))
                } else {
                    Err(bad("need 0 < q < 1"))
                }
            }
            "exp" => {
                let a = param()?;
                if a != 0.0 {
                    Ok(Self::Exp(a))
                } else {
                    Err(bad("need alpha != 0"))
                }
            }
            "inv" => no_param(Self::Inv),
            "neglog" => no_param(Self::NegLog),
            "tlogt" => no_param(Self::TLogT),
            _ => Err(bad("unknown function")),
        }
    }
}

impl TryFrom<String> for ConvexFunctionSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ConvexFunctionSpec> for String {
    fn from(f: ConvexFunctionSpec) -> String {
        f.to_string()
    }
}

/// Slope defect `Θ(t; m, M)` by the secant formula.
pub fn theta(spec: &ConvexFunctionSpec, t: f64, w: &SpectralInterval) -> Result<f64> {
    if !w.contains_interior(t) {
        return Err(Error::EndpointDegenerate {
            t,
            m: w.m(),
            big_m: w.M(),
        });
    }
    Ok(theta_unchecked(spec, t, w.m(), w.M()))
}

fn theta_unchecked(spec: &ConvexFunctionSpec, t: f64, m: f64, big_m: f64) -> f64 {
    spec.slope(t, big_m) - spec.slope(m, t)
}

/// Secant defect `Δ(t; m, M)`.
pub fn delta(spec: &ConvexFunctionSpec, t: f64, w: &SpectralInterval) -> Result<f64> {
    if !w.contains(t) {
        return Err(Error::TOutOfWindow {
            t,
            m: w.m(),
            big_m: w.M(),
        });
    }
    let (m, big_m) = (w.m(), w.M());
    if t == m {
        return Ok(0.0);
    }
    Ok((t - m) * (spec.slope(m, big_m) - spec.slope(m, t)))
}

/// `sup_{t in (m, M)} Θ(t)`: the closed form when known, else
/// [`theta_sup_numeric`].
pub fn theta_sup(spec: &ConvexFunctionSpec, w: &SpectralInterval) -> f64 {
    spec.theta_sup_closed_form(w)
        .unwrap_or_else(|| theta_sup_numeric(spec, w, THETA_SUP_GRID))
}

/// Numeric supremum of `Θ`: a uniform grid over the guarded open interval,
/// golden-section refinement around the best grid point, and the one-sided
/// limits `(f(M) - f(m))/(M - m) - f'(m)` and `f'(M) - (f(M) - f(m))/(M - m)`.
pub fn theta_sup_numeric(spec: &ConvexFunctionSpec, w: &SpectralInterval, grid: usize) -> f64 {
    let grid = grid.max(3);
    let (m, big_m) = (w.m(), w.M());
    let guard = tol::END * w.width();
    let lo = m + guard;
    let hi = big_m - guard;
    let step = (hi - lo) / (grid - 1) as f64;
    let eval = |t: f64| theta_unchecked(spec, t, m, big_m);

    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..grid {
        let v = eval(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }

    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let refined = golden_section_max(eval, a, b, GOLDEN_WIDTH);

    let secant = spec.slope(m, big_m);
    let left_limit = secant - spec.df(m);
    let right_limit = spec.df(big_m) - secant;
    best.max(refined).max(left_limit).max(right_limit)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.max(f2);
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// `(k, K)` for `spec` on `w`.
pub fn curvature_bounds(spec: &ConvexFunctionSpec, w: &SpectralInterval) -> (f64, f64) {
    spec.curvature_bounds(w)
}

/// Checks `½K(z-t)² >= f(z) - f(t) - (z-t)f'(t) >= ½k(z-t)²` with slack
/// `tol::ORDER` relative to the magnitudes involved.
pub fn scalar_taylor_bound_check(
    spec: &ConvexFunctionSpec,
    z: f64,
    t: f64,
    w: &SpectralInterval,
) -> Result<bool> {
    for x in [z, t] {
        if !w.contains(x) {
            return Err(Error::TOutOfWindow {
                t: x,
                m: w.m(),
                big_m: w.M(),
            });
        }
    }
    let (k, big_k) = spec.curvature_bounds(w);
    let (fz, ft, lin) = (spec.f(z), spec.f(t), (z - t) * spec.df(t));
    let middle = fz - ft - lin;
    let sq = (z - t) * (z - t);
    let slack = tol::ORDER * 1f64.max(fz.abs()).max(ft.abs()).max(lin.abs());
    Ok(0.5 * big_k * sq + slack >= middle && middle + slack >= 0.5 * k * sq)
}

/// Refinement and reverse of the weighted discrete Jensen inequality:
/// `n min p_i J_u <= J_p <= n max p_i J_u`, where `J_u` is the Jensen gap
/// with uniform weights and `J_p` the gap with the normalized weights `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteJensenBounds {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// Largest `|Φ(x_i)|`, the scale of the cancellation in the gaps.
    pub scale: f64,
}

impl DiscreteJensenBounds {
    pub fn is_ordered(&self) -> bool {
        let slack = tol::ORDER * self.scale.max(1.0);
        self.lower <= self.middle + slack && self.middle <= self.upper + slack
    }
}

pub fn discrete_jensen_bounds(
    spec: &ConvexFunctionSpec,
    points: &[f64],
    weights: &[f64],
) -> Result<DiscreteJensenBounds> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() != weights.len() {
        return Err(Error::PreconditionViolated(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::PreconditionViolated("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptyInput);
    }
    // finite endpoints such as 0 for t^p are admissible when f is finite there
    let (lo, hi) = spec.domain();
    if let Some(&x) = points
        .iter()
        .find(|&&x| !(lo <= x && x <= hi && spec.f(x).is_finite()))
    {
        return Err(Error::PreconditionViolated(format!(
            "point {x} is outside the domain of {spec}"
        )));
    }
    let n = points.len() as f64;
    let values: Vec<f64> = points.iter().map(|&x| spec.f(x)).collect();

    let uniform_gap =
        values.iter().sum::<f64>() / n - spec.f(points.iter().sum::<f64>() / n);
    let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let weighted_mean: f64 = p.iter().zip(points).map(|(pi, x)| pi * x).sum();
    let weighted_gap = p.iter().zip(&values).map(|(pi, v)| pi * v).sum::<f64>() - spec.f(weighted_mean);
    let p_min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let p_max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(DiscreteJensenBounds {
        lower: n * p_min * uniform_gap,
        middle: weighted_gap,
        upper: n * p_max * uniform_gap,
        scale: values.iter().fold(0.0f64, |s, v| s.max(v.abs())),
    })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if !diff.is_finite() {
            return None;
        }
        if depth == 0 {
            return if diff.abs() <= 15.0 * tol { Some(left + right + diff / 15.0) } else { None };
        }
        if diff.abs() <= 15.0 * tol {
            return Some(left + right + diff / 15.0);
        }
        Some(
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
        )
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48).ok_or(Error::NonIntegrable { m: a, big_m: b })
}
