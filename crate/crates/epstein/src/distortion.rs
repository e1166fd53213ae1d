//! Conformal distortion of near-boundary circles.
//!
//! For an analytic circle-preserving `phi`, the pulled-back hyperbolic metric is
//! `e^{2 sigma} rho_D` near the circle with
//! `sigma = log(|phi'| (1 - |z|^2)/(1 - |phi|^2))`, and the total-curvature
//! distortion of `S_r` reduces to `D(r) = (2r/(1-r^2)) int d_r sigma(r e^{i theta})
//! d theta` using the closed radial derivative
//! `d_r sigma = Re(phi''/phi' z) - 2r/(1-r^2) + 2 Re(z phi' conj(phi))/(1-|phi|^2)`
//! (no numerical differencing). The `r -> 1` limit is `-(2/3)` times the action of
//! the boundary restriction; the area version replaces curvature integrals by
//! enclosed hyperbolic areas.

use crate::analytic::AnalyticCircleMap;
use crate::disk::circulation_sampled;
use crate::extrapolate::{richardson, tail_is_cauchy, ExtrapolatedLimit};
use crate::grid::QuadratureGrid;
use crate::{Error, Result};
use num_complex::Complex64;

/// Closed-form radial derivative of the conformal factor at `z_r = r e^{i theta}`.
pub fn radial_log_density_derivative(map: &AnalyticCircleMap, r: f64, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let zr = r * z;
    let phi = map.eval(zr);
    let d1 = map.deriv1(zr);
    let d2 = map.deriv2(zr);
    (d2 / d1 * z).re - 2.0 * r / (1.0 - r * r)
        + 2.0 * (z * d1 * phi.conj()).re / (1.0 - phi.norm_sqr())
}

/// The conformal factor itself, `sigma(z_r)`; used by the finite-difference guard
/// against transcription errors in the closed-form derivative.
pub fn log_density(map: &AnalyticCircleMap, r: f64, theta: f64) -> f64 {
    let zr = Complex64::from_polar(r, theta);
    let phi = map.eval(zr);
    (map.deriv1(zr).norm() * (1.0 - r * r) / (1.0 - phi.norm_sqr())).ln()
}

/// Total-curvature distortion `D(r)` of the circle `S_r`.
pub fn distortion_integral(map: &AnalyticCircleMap, r: f64, grid: &QuadratureGrid) -> Result<f64> {
    if !(r > map.inner_radius() && r < 1.0) {
        return Err(Error::Precondition(format!(
            "radius {r} outside the map's annulus ({}, 1)",
            map.inner_radius()
        )));
    }
    for t in grid.nodes() {
        let d = map.deriv1(Complex64::from_polar(r, t));
        if d.norm() < 1e-12 {
            return Err(Error::SingularMap {
                z: Complex64::from_polar(r, t),
            });
        }
    }
    let integral = grid.integrate_fn(|t| radial_log_density_derivative(map, r, t));
    Ok(2.0 * r / (1.0 - r * r) * integral)
}

/// Extrapolated `r -> 1^-` limit of `D(r)` along the schedule `r_k = 1 - 2^{-k}`,
/// `k = 3..=k_max`; equals `-(2/3)` times the action of the boundary restriction.
pub fn distortion_limit(
    map: &AnalyticCircleMap,
    k_max: u32,
    grid: &QuadratureGrid,
) -> Result<ExtrapolatedLimit> {
    if !(3..=12).contains(&k_max) {
        return Err(Error::Precondition(
            "distortion schedule needs 3 <= k_max <= 12".into(),
        ));
    }
    let values: Vec<f64> = (3..=k_max)
        .map(|k| distortion_integral(map, 1.0 - 0.5f64.powi(k as i32), grid))
        .collect::<Result<_>>()?;
    if !tail_is_cauchy(&values) {
        return Err(Error::ConvergenceFailure(format!(
            "distortion sequence tail is not contracting: {values:?}"
        )));
    }
    richardson(&values, 0.5)
}

/// Hyperbolic area enclosed by the image curve `phi(S_r)` (eta-circulation along
/// the parametrized image; spectrally accurate for these analytic curves).
pub fn image_area(map: &AnalyticCircleMap, r: f64, grid: &QuadratureGrid) -> Result<f64> {
    let pts: Vec<Complex64> = grid
        .nodes()
        .map(|t| map.eval(Complex64::from_polar(r, t)))
        .collect();
    let vel: Vec<Complex64> = grid
        .nodes()
        .map(|t| {
            let zr = Complex64::from_polar(r, t);
            map.deriv1(zr) * zr * Complex64::new(0.0, 1.0)
        })
        .collect();
    circulation_sampled(&pts, &vel)
}

/// Extrapolated limit of `A(phi(S_r)) - A(S_r)`; for an injective boundary map it
/// converges to `-(2/3)` times the action.
pub fn area_distortion(
    map: &AnalyticCircleMap,
    k_max: u32,
    grid: &QuadratureGrid,
) -> Result<ExtrapolatedLimit> {
    if map.degree() != 1 {
        return Err(Error::Precondition(format!(
            "area distortion needs an injective boundary map; degree {}",
            map.degree()
        )));
    }
    if !(3..=12).contains(&k_max) {
        return Err(Error::Precondition(
            "area-distortion schedule needs 3 <= k_max <= 12".into(),
        ));
    }
    let values: Vec<f64> = (3..=k_max)
        .map(|k| {
            let r = 1.0 - 0.5f64.powi(k as i32);
            let a_img = image_area(map, r, grid)?;
            let a_circle = std::f64::consts::TAU * 2.0 * r * r / (1.0 - r * r);
            Ok(a_img - a_circle)
        })
        .collect::<Result<_>>()?;
    if !tail_is_cauchy(&values) {
        return Err(Error::ConvergenceFailure(format!(
            "area-distortion tail is not contracting: {values:?}"
        )));
    }
    richardson(&values, 0.5)
}
