//! The Schwarzian derivative on the circle and the boundary-side action integrals.
//!
//! All evaluation goes through the real lift formula: for a lift `F` of the circle
//! map, the real number `e^{2 i theta} S[phi](e^{i theta})` equals
//! `-S[F](theta) - F'(theta)^2 / 2 + 1/2`, where `S[F]` is the real-variable
//! Schwarzian `F'''/F' - (3/2)(F''/F')^2`. The complex-division route exists only
//! as a test oracle; the lift formula has no imaginary-part noise to discard.

use crate::diffeo::CircleDiffeo;
use crate::grid::QuadratureGrid;
use crate::metric::BoundaryMetric;
use crate::{Error, Result};
use std::f64::consts::TAU;

/// `e^{2 i theta} S[phi](e^{i theta})` (a real number) at one angle.
pub fn schwarzian_on_circle(phi: &CircleDiffeo, theta: f64) -> Result<f64> {
    let j = phi.jet(theta);
    if !(j.d1 > 0.0) {
        return Err(Error::NotADiffeo { theta, d1: j.d1 });
    }
    let ratio = j.d2 / j.d1;
    let s_lift = j.d3 / j.d1 - 1.5 * ratio * ratio;
    Ok(-s_lift - 0.5 * j.d1 * j.d1 + 0.5)
}

/// The action as the direct boundary integral of [`schwarzian_on_circle`].
///
/// Defined for degree-1 diffeomorphisms and for degree-`n` covers (the `n`-fold
/// pipeline feeds covers straight through this integral).
pub fn action_direct(phi: &CircleDiffeo, grid: &QuadratureGrid) -> Result<f64> {
    let mut sum = 0.0;
    for t in grid.nodes() {
        sum += schwarzian_on_circle(phi, t)?;
    }
    Ok(sum * grid.weight())
}

/// The action written in terms of the inverse map:
/// `I(phi) = -int |psi'|^{-1} e^{2 i theta} S[psi] d theta` with `psi = phi^{-1}`.
pub fn action_inverse_form(phi: &CircleDiffeo, grid: &QuadratureGrid) -> Result<f64> {
    let psi = phi.inverse()?;
    let mut sum = 0.0;
    for t in grid.nodes() {
        let j = psi.jet(t);
        if !(j.d1 > 0.0) {
            return Err(Error::NotADiffeo { theta: t, d1: j.d1 });
        }
        sum += schwarzian_on_circle(&psi, t)? / j.d1;
    }
    Ok(-sum * grid.weight())
}

/// The action from the total curvature at infinity of the pushforward metric:
/// `I = (int e^{-sigma} (sigma_theta^2 - 1) d theta + 2 pi) / 2`.
///
/// Only `sigma` and its first derivative enter, so this route accepts `C^1`
/// metrics; the length must be `2 pi`.
pub fn action_kstar_form(h: &BoundaryMetric, grid: &QuadratureGrid) -> Result<f64> {
    if !h.is_normalized(1e-8) {
        return Err(Error::NotNormalized {
            length: h.total_length(),
            expected: TAU,
        });
    }
    let integral = grid.integrate_fn(|t| {
        let j = h.jet(t);
        (-j.sigma).exp() * (j.d1 * j.d1 - 1.0)
    });
    Ok((integral + TAU) / 2.0)
}

/// Action of the `n`-fold cover through the orbit formula
/// `I^n(phi) = I(phi) + (1 - n^2)/2 int |phi'|^2 d theta`.
pub fn action_nfold(phi: &CircleDiffeo, n: u32, grid: &QuadratureGrid) -> Result<f64> {
    if phi.degree() != 1 {
        return Err(Error::Precondition(
            "the n-fold action formula applies to degree-1 maps".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Precondition("n-fold action needs n >= 1".into()));
    }
    let base = action_direct(phi, grid)?;
    if n == 1 {
        return Ok(base);
    }
    let speed_sq = grid.integrate_fn(|t| {
        let d = phi.jet(t).d1;
        d * d
    });
    let nf = n as f64;
    Ok(base + 0.5 * (1.0 - nf * nf) * speed_sq)
}

/// The alternate normalization of the action (an affine conversion of
/// [`action_direct`]): `-int (2 pi S[F] + pi F'^2) d theta`, which equals
/// `2 pi I(phi) - 2 pi^2`.
pub fn action_alt_normalization(phi: &CircleDiffeo, grid: &QuadratureGrid) -> Result<f64> {
    let mut sum = 0.0;
    for t in grid.nodes() {
        let j = phi.jet(t);
        if !(j.d1 > 0.0) {
            return Err(Error::NotADiffeo { theta: t, d1: j.d1 });
        }
        let ratio = j.d2 / j.d1;
        let s_lift = j.d3 / j.d1 - 1.5 * ratio * ratio;
        sum += TAU / 2.0 * (2.0 * s_lift + j.d1 * j.d1);
    }
    Ok(-sum * grid.weight())
}
