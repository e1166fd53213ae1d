//! The action-route registry.
//!
//! Every way of computing the Schwarzian action lives behind [`ActionRoute`] and
//! is registered by name, so callers select routes at runtime and cross-check them
//! pairwise. The routes are genuinely independent computations: a boundary
//! integral of the Schwarzian, the same integral through the inverse map, a
//! first-derivative curvature integral of the pushforward metric, the signed
//! length of the Epstein curve, and two enclosed-area computations (Gauss-Bonnet
//! and the curvature-free circulation oracle).

use crate::curve::EpsteinCurve;
use crate::diffeo::CircleDiffeo;
use crate::grid::QuadratureGrid;
use crate::metric::{diffeo_from_metric, BoundaryMetric};
use crate::schwarzian::{action_direct, action_inverse_form, action_kstar_form};
use crate::Result;

/// A diffeomorphism together with its pushforward metric: the two faces every
/// route needs.
#[derive(Debug, Clone)]
pub struct ActionSubject {
    diffeo: CircleDiffeo,
    metric: BoundaryMetric,
}

impl ActionSubject {
    pub fn from_diffeo(diffeo: &CircleDiffeo) -> Result<Self> {
        let metric = BoundaryMetric::pushforward(diffeo)?;
        Ok(Self {
            diffeo: diffeo.clone(),
            metric,
        })
    }

    /// From a length-`2 pi` metric; the diffeomorphism is reconstructed with the
    /// base-point normalization `phi(1) = 1`.
    pub fn from_metric(metric: &BoundaryMetric) -> Result<Self> {
        let diffeo = diffeo_from_metric(metric, 0.0)?;
        Ok(Self {
            diffeo,
            metric: metric.clone(),
        })
    }

    pub fn diffeo(&self) -> &CircleDiffeo {
        &self.diffeo
    }

    pub fn metric(&self) -> &BoundaryMetric {
        &self.metric
    }
}

/// One interchangeable way of computing the action.
pub trait ActionRoute: Send + Sync {
    /// Registry key (also the CLI spelling).
    fn name(&self) -> &'static str;
    /// One-line description for listings.
    fn describe(&self) -> &'static str;
    fn compute(&self, subject: &ActionSubject, grid: &QuadratureGrid) -> Result<f64>;
}

struct DirectRoute;

impl ActionRoute for DirectRoute {
    fn name(&self) -> &'static str {
        "direct"
    }
    fn describe(&self) -> &'static str {
        "boundary integral of e^{2i theta} S[phi]"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        action_direct(s.diffeo(), grid)
    }
}

struct InverseFormRoute;

impl ActionRoute for InverseFormRoute {
    fn name(&self) -> &'static str {
        "inverse"
    }
    fn describe(&self) -> &'static str {
        "the same integral written through the inverse map"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        action_inverse_form(s.diffeo(), grid)
    }
}

struct KstarRoute;

impl ActionRoute for KstarRoute {
    fn name(&self) -> &'static str {
        "kstar"
    }
    fn describe(&self) -> &'static str {
        "total curvature at infinity of the pushforward metric (C^1 route)"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        action_kstar_form(s.metric(), grid)
    }
}

struct EpsteinLengthRoute;

impl ActionRoute for EpsteinLengthRoute {
    fn name(&self) -> &'static str {
        "epstein-length"
    }
    fn describe(&self) -> &'static str {
        "signed length of the Epstein curve"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        Ok(EpsteinCurve::from_metric(s.metric(), grid).total_length())
    }
}

struct GaussBonnetAreaRoute;

impl ActionRoute for GaussBonnetAreaRoute {
    fn name(&self) -> &'static str {
        "area-gauss-bonnet"
    }
    fn describe(&self) -> &'static str {
        "minus the enclosed area via Gauss-Bonnet"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        Ok(-EpsteinCurve::from_metric(s.metric(), grid).signed_area_gauss_bonnet())
    }
}

struct EtaAreaRoute;

impl ActionRoute for EtaAreaRoute {
    fn name(&self) -> &'static str {
        "area-eta"
    }
    fn describe(&self) -> &'static str {
        "minus the enclosed area via the circulation oracle (second order)"
    }
    fn compute(&self, s: &ActionSubject, grid: &QuadratureGrid) -> Result<f64> {
        Ok(-EpsteinCurve::from_metric(s.metric(), grid).signed_area_eta()?)
    }
}

/// All registered routes. The first four agree at the tight tolerance; the
/// eta-area oracle is listed last and carries its own looser tolerance.
pub fn registry() -> Vec<Box<dyn ActionRoute>> {
    vec![
        Box::new(DirectRoute),
        Box::new(InverseFormRoute),
        Box::new(KstarRoute),
        Box::new(EpsteinLengthRoute),
        Box::new(GaussBonnetAreaRoute),
        Box::new(EtaAreaRoute),
    ]
}

/// Looks a route up by its registry key.
pub fn route(name: &str) -> Option<Box<dyn ActionRoute>> {
    registry().into_iter().find(|r| r.name() == name)
}

/// Names of the routes held to the tight cross-route tolerance (everything except
/// the second-order circulation oracle).
pub const TIGHT_ROUTES: [&str; 5] = [
    "direct",
    "inverse",
    "kstar",
    "epstein-length",
    "area-gauss-bonnet",
];
