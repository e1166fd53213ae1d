//! Metric primitives of the hyperbolic disk: distance, horocycles, the area
//! primitive 1-form, and half-plane helpers for horocyclic computations.
//!
//! The disk carries `rho_D = 4 (1 - |z|^2)^{-2} |dz|^2`. Horocycles are stored by
//! base point and the metric density `e^sigma` decorating them: the horocycle of
//! density `d` based at `z` is the Euclidean circle with center `d/(d+1) z` and
//! radius `1/(d+1)`, internally tangent to the unit circle at `z`. Multiplying the
//! density by `e^t` moves the horocycle distance `t` toward its base point.

use crate::moebius::MoebiusDisk;
use crate::{Error, Result};
use num_complex::Complex64;

/// Horocycle decorated by the boundary-metric density at its base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horocycle {
    /// Tangency point on the unit circle.
    pub base: Complex64,
    /// Metric density `e^sigma` at the base; positive.
    pub decoration: f64,
}

impl Horocycle {
    pub fn new(base: Complex64, decoration: f64) -> Result<Self> {
        if (base.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "horocycle base |z| = {} is not on the unit circle",
                base.norm()
            )));
        }
        if !(decoration > 0.0) {
            return Err(Error::Precondition(format!(
                "horocycle decoration {decoration} must be positive"
            )));
        }
        Ok(Self {
            base: base / base.norm(),
            decoration,
        })
    }

    pub fn euclidean_center(&self) -> Complex64 {
        self.base * (self.decoration / (self.decoration + 1.0))
    }

    pub fn euclidean_radius(&self) -> f64 {
        1.0 / (self.decoration + 1.0)
    }

    /// Signed Euclidean distance of `p` to the horocycle circle.
    pub fn circle_distance(&self, p: Complex64) -> f64 {
        (p - self.euclidean_center()).norm() - self.euclidean_radius()
    }

    /// Point of the horocycle on the radius toward the base point.
    pub fn inner_point(&self) -> Complex64 {
        self.base * ((self.decoration - 1.0) / (self.decoration + 1.0))
    }

    /// Horocycle moved distance `t` toward the base (decoration times `e^t`).
    pub fn flowed(&self, t: f64) -> Self {
        Self {
            base: self.base,
            decoration: self.decoration * t.exp(),
        }
    }

    /// Image under a Möbius map: base moves, density transforms as a metric.
    pub fn mapped(&self, m: &MoebiusDisk) -> Result<Self> {
        let base = m.apply(self.base)?;
        let deriv = m.derivative(self.base)?.norm();
        Horocycle::new(base, self.decoration / deriv)
    }
}

/// Hyperbolic distance between interior points of the disk.
pub fn hyperbolic_distance(p: Complex64, q: Complex64) -> Result<f64> {
    for z in [p, q] {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: z.norm() });
        }
    }
    let t = ((p - q) / (Complex64::new(1.0, 0.0) - p.conj() * q)).norm();
    Ok((t.atanh()) * 2.0)
}

/// Coefficients of the 1-form `eta = 2 (x dy - y dx)/(1 - x^2 - y^2)` at `p`.
///
/// `d eta` is the hyperbolic area form, so the circulation of `eta` around a closed
/// curve is the signed enclosed hyperbolic area. This is the area oracle: it never
/// references curvature, unlike the Gauss-Bonnet route.
pub fn area_primitive(p: Complex64) -> Result<(f64, f64)> {
    let r2 = p.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::OutsideDisk { modulus: p.norm() });
    }
    let d = 1.0 - r2;
    Ok((-2.0 * p.im / d, 2.0 * p.re / d))
}

/// Circulation of the area primitive along the straight-segment polyline through
/// `points` (closed: the last point connects back to the first).
///
/// Each segment is integrated with 3-point Gauss-Legendre, so the error is the
/// O(h^2) chord error of replacing the true curve by segments.
pub fn circulation_polyline(points: &[Complex64]) -> Result<f64> {
    const GL_NODES: [f64; 3] = [0.112701665379258, 0.5, 0.887298334620742];
    const GL_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let n = points.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let dz = q - p;
        for (s, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let z = p + dz * *s;
            let (ex, ey) = area_primitive(z)?;
            total += w * (ex * dz.re + ey * dz.im);
        }
    }
    Ok(total)
}

/// Circulation of the area primitive along a smooth closed curve given by position
/// and velocity samples on a uniform parameter grid (periodic trapezoid sum, so
/// spectrally accurate for smooth curves).
pub fn circulation_sampled(points: &[Complex64], velocities: &[Complex64]) -> Result<f64> {
    assert_eq!(points.len(), velocities.len());
    let n = points.len();
    let w = std::f64::consts::TAU / n as f64;
    let mut total = 0.0;
    for (z, v) in points.iter().zip(velocities) {
        let (ex, ey) = area_primitive(*z)?;
        total += ex * v.re + ey * v.im;
    }
    Ok(total * w)
}

/// Möbius map of the disk onto the upper half-plane sending the boundary point `p`
/// to infinity and `0` to `i`: `w -> i (1 + w conj(p)) / (1 - w conj(p))`.
///
/// It sends the horocycle family at `p` to horizontal lines; the decoration-`d`
/// horocycle lands on the line at height `d` (verified in tests), which reduces
/// horocyclic arc lengths and renormalized lengths to half-plane arithmetic.
/// Internal chart only: the half-plane model is not part of the public surface.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HalfPlaneAt {
    pbar: Complex64,
}

impl HalfPlaneAt {
    pub(crate) fn new(p: Complex64) -> Result<Self> {
        if (p.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(
                "half-plane chart base must lie on the unit circle".into(),
            ));
        }
        Ok(Self {
            pbar: p.conj() / p.norm(),
        })
    }

    pub(crate) fn map(&self, w: Complex64) -> Complex64 {
        Complex64::new(0.0, 1.0) * (1.0 + w * self.pbar) / (1.0 - w * self.pbar)
    }

    pub(crate) fn unmap(&self, upper: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        ((upper - i) / (upper + i)) / self.pbar
    }

    /// Height of the image line of the horocycle based at this chart's point.
    pub(crate) fn horocycle_height(&self, h: &Horocycle) -> f64 {
        self.map(h.inner_point()).im
    }
}

/// Flow `p` along the geodesic asymptotic to the boundary point `base`, moving
/// distance `t` toward `base` (the normal flow of the horocycle family at `base`).
pub fn flow_toward_boundary(p: Complex64, base: Complex64, t: f64) -> Result<Complex64> {
    let chart = HalfPlaneAt::new(base)?;
    let w = chart.map(p);
    Ok(chart.unmap(Complex64::new(w.re, w.im * t.exp())))
}

/// Geodesic exponential: starting point of the unit-speed geodesic from `p` with
/// initial velocity `v` (a Euclidean vector of hyperbolic norm one), evaluated at
/// time `t`. Computed by transporting to the origin, flowing radially to
/// `tanh(t/2)`, and transporting back.
pub fn geodesic_exp(p: Complex64, v: Complex64, t: f64) -> Result<Complex64> {
    if p.norm() >= 1.0 {
        return Err(Error::OutsideDisk { modulus: p.norm() });
    }
    let to_origin = MoebiusDisk::new(Complex64::new(1.0, 0.0), -p)?;
    // derivative of z -> (z - p)/(1 - conj(p) z) at p is 1/(1 - |p|^2) times a
    // normalization; direction is what matters, the length is re-imposed at 0
    let dir = to_origin.derivative(p)? * v;
    let dir = dir / dir.norm();
    let moved = dir * (t / 2.0).tanh();
    to_origin.inverse().apply(moved)
}
