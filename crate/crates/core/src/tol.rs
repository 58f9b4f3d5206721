//! Floating point tolerances. The inequalities are exact statements; these
//! constants decide when a computed "<=" counts as holding.

/// Absolute tolerance on `|a_ij - conj(a_ji)|` for self-adjointness.
pub const HERM: f64 = 1e-10;
/// Spectral reconstruction tolerance, relative to the spectral radius.
pub const SPEC: f64 = 1e-9;
/// Floor for [`SPEC`] when the spectral radius is tiny.
pub const SPEC_FLOOR: f64 = 1e-12;
/// Positivity threshold on the minimum eigenvalue.
pub const POS: f64 = 1e-10;
/// Order and state-evaluation tolerance.
pub const ORDER: f64 = 1e-9;
/// Agreement between contour and eigendecomposition calculus.
pub const CONTOUR: f64 = 1e-6;
/// Relative factor of the chain comparison tolerance.
pub const CHAIN: f64 = 1e-9;
/// Relative endpoint guard for secant slopes, in units of `M - m`.
pub const END: f64 = 1e-12;

/// `SPEC` scaled by a spectral radius.
pub fn spec_scaled(radius: f64) -> f64 {
    (SPEC * radius).max(SPEC_FLOOR)
}
