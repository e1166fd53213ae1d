//! The Epstein curve of a boundary metric: envelope of the decorated horocycle
//! family, with signed length, curvature, area, equidistant scaling, the
//! isoperimetric excess, and non-immersion detection.
//!
//! For `h = e^sigma d theta` the envelope point and outward unit normal are
//!
//! ```text
//! Ep(theta)  = [ (s1^2 + e^{2s} - 1) + 2 i s1 ] e^{i theta} / Q,
//! Ep~(theta) = [ 2 e^s (s1^2 - (e^s+1)^2) + 4 i s1 e^s (e^s+1) ] e^{i theta} / Q^2,
//! Q = s1^2 + (e^s + 1)^2,
//! ```
//!
//! with densities `dl = (e^{-s}(s2 - s1^2/2) + sinh s) d theta`,
//! `k dl = (-e^{-s}(s2 - s1^2/2) + cosh s) d theta` and curvature at infinity
//! `k* = e^{-2s}(2 s2 - s1^2 - 1)`. The pointwise partition `dl + k dl = h` holds
//! algebraically and non-immersed points (`k* = -1`) cost no regularity: only the
//! quotient `k = (1-k*)/(1+k*)` blows up there, never the densities.

use crate::diffeo::CircleDiffeo;
use crate::disk::circulation_polyline;
use crate::grid::QuadratureGrid;
use crate::metric::{BoundaryMetric, SigmaJet};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Envelope data of one boundary angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsteinFrame {
    /// Curve parameter. For metric-built curves this is the boundary angle the
    /// frame's horocycle is based at; for covers it is the source angle and the
    /// horocycle sits at the covered angle.
    pub theta: f64,
    /// Envelope point in the open disk.
    pub point: Complex64,
    /// Outward unit normal (hyperbolic norm 1, stored as a Euclidean vector).
    pub normal: Complex64,
    /// `d ell / d theta` in the curve parameter.
    pub dl_density: f64,
    /// `(k d ell) / d theta` in the curve parameter.
    pub kdl_density: f64,
    /// Curvature at infinity of the metric at this frame's base angle.
    pub kstar: f64,
}

impl EpsteinFrame {
    /// Geodesic curvature `k = (1 - k*)/(1 + k*)`; `None` within `1e-8` of a
    /// non-immersed point, where the quotient is meaningless.
    pub fn curvature(&self) -> Option<f64> {
        let denom = 1.0 + self.kstar;
        if denom.abs() <= 1e-8 {
            None
        } else {
            Some((1.0 - self.kstar) / denom)
        }
    }
}

fn frame_from_jet(theta: f64, base_angle: f64, jet: &SigmaJet, jacobian: f64) -> EpsteinFrame {
    let es = jet.sigma.exp();
    let s1 = jet.d1;
    let q = s1 * s1 + (es + 1.0) * (es + 1.0);
    let dir = Complex64::from_polar(1.0, base_angle);
    let point = Complex64::new(s1 * s1 + es * es - 1.0, 2.0 * s1) / q * dir;
    let normal = Complex64::new(
        2.0 * es * (s1 * s1 - (es + 1.0) * (es + 1.0)),
        4.0 * s1 * es * (es + 1.0),
    ) / (q * q)
        * dir;
    let core = (-jet.sigma).exp() * (jet.d2 - 0.5 * s1 * s1);
    EpsteinFrame {
        theta,
        point,
        normal,
        dl_density: (core + jet.sigma.sinh()) * jacobian,
        kdl_density: (-core + jet.sigma.cosh()) * jacobian,
        kstar: (-2.0 * jet.sigma).exp() * (2.0 * jet.d2 - s1 * s1 - 1.0),
    }
}

/// Envelope frame of `h` at one boundary angle.
pub fn epstein_frame(h: &BoundaryMetric, theta: f64) -> EpsteinFrame {
    frame_from_jet(theta, theta, &h.jet(theta), 1.0)
}

/// A closed Epstein curve sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct EpsteinCurve {
    frames: Vec<EpsteinFrame>,
    degree: u32,
    grid: QuadratureGrid,
}

impl EpsteinCurve {
    /// Degree-1 curve of a metric, parametrized by the boundary angle.
    pub fn from_metric(h: &BoundaryMetric, grid: &QuadratureGrid) -> Self {
        let frames = grid.nodes().map(|t| epstein_frame(h, t)).collect();
        Self {
            frames,
            degree: 1,
            grid: *grid,
        }
    }

    /// Curve of the multi-valued pushforward metric of a degree-`n` cover,
    /// parametrized by the source angle (densities carry the lift Jacobian, so
    /// totals integrate in the source parameter).
    ///
    /// The metric jet along the branch through source angle `theta` is, with `F`
    /// the cover's lift: `sigma = -log F'`, `sigma_tau = -F''/F'^2`,
    /// `sigma_tautau = -F'''/F'^3 + 2 F''^2/F'^4`, evaluated at `tau = F(theta)`.
    pub fn from_cover(cover: &CircleDiffeo, grid: &QuadratureGrid) -> Result<Self> {
        let frames = grid
            .nodes()
            .map(|t| {
                let j = cover.jet(t);
                if !(j.d1 > 0.0) {
                    return Err(Error::NotADiffeo { theta: t, d1: j.d1 });
                }
                let jet = SigmaJet {
                    sigma: -j.d1.ln(),
                    d1: -j.d2 / (j.d1 * j.d1),
                    d2: -j.d3 / (j.d1 * j.d1 * j.d1)
                        + 2.0 * j.d2 * j.d2 / (j.d1 * j.d1 * j.d1 * j.d1),
                };
                Ok(frame_from_jet(t, j.value, &jet, j.d1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            frames,
            degree: cover.degree(),
            grid: *grid,
        })
    }

    pub fn frames(&self) -> &[EpsteinFrame] {
        &self.frames
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// Total signed length `int d ell`.
    pub fn total_length(&self) -> f64 {
        self.frames.iter().map(|f| f.dl_density).sum::<f64>() * self.grid.weight()
    }

    /// Total signed curvature `int k d ell`.
    pub fn total_curvature(&self) -> f64 {
        self.frames.iter().map(|f| f.kdl_density).sum::<f64>() * self.grid.weight()
    }

    /// Signed enclosed area by Gauss-Bonnet: `int k d ell - 2 pi n`.
    pub fn signed_area_gauss_bonnet(&self) -> f64 {
        self.total_curvature() - TAU * self.degree as f64
    }

    /// Signed enclosed area by circulation of the area primitive along the
    /// polyline of frame points (curvature-free oracle, second order in the grid).
    pub fn signed_area_eta(&self) -> Result<f64> {
        let points: Vec<Complex64> = self.frames.iter().map(|f| f.point).collect();
        circulation_polyline(&points)
    }
}

/// The scaled metric `e^t h`: the equidistant flow of the Epstein curve.
pub fn scale_metric(h: &BoundaryMetric, t: f64) -> BoundaryMetric {
    h.scaled(t)
}

/// Residuals of the closed scaling laws at scale `t` for a length-`2 pi` metric:
/// `L_t = 2 pi sinh t - e^{-t} A` and `A_t = 2 pi (cosh t - 1) + e^{-t} A`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingCheck {
    pub l_t: f64,
    pub a_t: f64,
    pub l_residual: f64,
    pub a_residual: f64,
}

pub fn scaling_laws_check(h: &BoundaryMetric, t: f64, grid: &QuadratureGrid) -> Result<ScalingCheck> {
    if !h.is_normalized(1e-8) {
        return Err(Error::NotNormalized {
            length: h.total_length(),
            expected: TAU,
        });
    }
    let base = EpsteinCurve::from_metric(h, grid);
    let a0 = base.signed_area_gauss_bonnet();
    let scaled = EpsteinCurve::from_metric(&h.scaled(t), grid);
    let l_t = scaled.total_length();
    let a_t = scaled.signed_area_gauss_bonnet();
    Ok(ScalingCheck {
        l_t,
        a_t,
        l_residual: l_t - (TAU * t.sinh() - (-t).exp() * a0),
        a_residual: a_t - (TAU * (t.cosh() - 1.0) + (-t).exp() * a0),
    })
}

/// Boundary length of the area-`a` solution of the isoperimetric problem:
/// `J(a) = 2 pi sinh(arccosh(a/(2 pi) + 1))`.
pub fn isoperimetric_profile(a: f64) -> f64 {
    let x = a / TAU + 1.0;
    TAU * (x * x - 1.0).max(0.0).sqrt()
}

/// Isoperimetric excess `e^t (L_t - J(A_t))` of the equidistant leaf at scale `t`.
///
/// Requires the leaf to bound positive area (the embedded regime); callers chase
/// the `t -> infinity` limit, which converges to twice the action.
pub fn isoperimetric_excess(h: &BoundaryMetric, t: f64, grid: &QuadratureGrid) -> Result<f64> {
    if !h.is_normalized(1e-8) {
        return Err(Error::NotNormalized {
            length: h.total_length(),
            expected: TAU,
        });
    }
    let leaf = EpsteinCurve::from_metric(&h.scaled(t), grid);
    let a_t = leaf.signed_area_gauss_bonnet();
    if a_t <= 0.0 {
        return Err(Error::ExcludedRange { t, area: a_t });
    }
    Ok(t.exp() * (leaf.total_length() - isoperimetric_profile(a_t)))
}

/// Smallest `t` on a coarse ladder where every node has `d ell_t > 0`, a
/// sufficient condition for the leaf to be locally embedded. The flow embeds all
/// leaves beyond some finite scale, but no constructive bound is available, so
/// the ladder is probed empirically.
pub fn embedding_scale(h: &BoundaryMetric, grid: &QuadratureGrid) -> f64 {
    let base = EpsteinCurve::from_metric(h, grid);
    let mut t = 0.0f64;
    loop {
        let ok = base
            .frames()
            .iter()
            .all(|f| (t.exp() + (-t).exp() * f.kstar) > 0.0);
        if ok || t > 50.0 {
            return t;
        }
        t += 0.25;
    }
}

/// How many scales `t` make a given boundary angle non-immersed along the
/// equidistant family: `d ell_t = 0` means `e^{2t} = -k*`, so exactly one scale
/// for `k* < 0` and none otherwise (a per-point diagnostic; the general
/// two-scale bound is not asserted separately).
pub fn non_immersion_scale_count(kstar: f64) -> u8 {
    if kstar < 0.0 {
        1
    } else {
        0
    }
}

/// The unique non-immersion scale for `k* < 0`: `t = log(-k*)/2`.
pub fn non_immersion_scale(kstar: f64) -> Option<f64> {
    if kstar < 0.0 {
        Some(0.5 * (-kstar).ln())
    } else {
        None
    }
}

/// Where the envelope fails to be an immersion (`1 + k* = 0`).
#[derive(Debug, Clone, PartialEq)]
pub enum NonImmersedLocus {
    /// `k* = -1` identically: the curve degenerates (round and Möbius metrics).
    Everywhere,
    /// Bisection-refined roots of `1 + k*`, in `[0, 2 pi)`.
    Points(Vec<f64>),
}

/// Locates non-immersed points of the Epstein curve of a diffeomorphism metric.
///
/// Accepts only length-`2 pi` metrics (the statement is about pushforwards of
/// diffeomorphisms); for genuinely curved metrics the returned list is nonempty.
pub fn find_non_immersed(h: &BoundaryMetric, grid: &QuadratureGrid) -> Result<NonImmersedLocus> {
    if !h.is_normalized(1e-8) {
        return Err(Error::NotNormalized {
            length: h.total_length(),
            expected: TAU,
        });
    }
    let s = |t: f64| {
        let j = h.jet(t);
        1.0 + (-2.0 * j.sigma).exp() * (2.0 * j.d2 - j.d1 * j.d1 - 1.0)
    };
    let n = grid.len();
    let values: Vec<f64> = grid.nodes().map(s).collect();
    if values.iter().all(|v| v.abs() < 1e-10) {
        return Ok(NonImmersedLocus::Everywhere);
    }
    let mut roots = Vec::new();
    for j in 0..n {
        let a = values[j];
        let b = values[(j + 1) % n];
        if a == 0.0 {
            roots.push(grid.node(j));
            continue;
        }
        if a * b < 0.0 {
            let mut lo = grid.node(j);
            let mut hi = lo + grid.weight();
            let mut f_lo = a;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let f_mid = s(mid);
                if f_mid.abs() < 1e-13 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_lo * f_mid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = f_mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    Ok(NonImmersedLocus::Points(roots))
}
