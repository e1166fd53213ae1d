//! Geometry of the Schwarzian action on the hyperbolic disk.
//!
//! The library computes the Schwarzian action of circle diffeomorphisms through
//! several independent routes and implements the Epstein-curve constructions the
//! routes are built on:
//!
//! * boundary integral of the Schwarzian derivative ([`schwarzian`]),
//! * the same integral written in terms of the inverse map,
//! * the total curvature at infinity of the pushforward metric,
//! * signed length and signed enclosed area of the Epstein curve ([`curve`]),
//! * the de Sitter dual curve ([`dsdual`]), isoperimetric excess, `n`-fold covers,
//! * bi-local observables with triangulation reconstruction ([`bilocal`], [`farey`],
//!   [`reconstruct`]),
//! * piecewise-Möbius completions ([`piecewise`]) and conformal-distortion limits
//!   ([`distortion`]).
//!
//! Every action route implements the [`routes::ActionRoute`] trait and is registered
//! by name in [`routes::registry`], so callers (notably the CLI) can select routes at
//! runtime and cross-check them against each other.

// `!(x > 0.0)` is used throughout as a NaN-rejecting positivity guard
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bilocal;
pub mod curve;
pub mod descriptor;
pub mod diffeo;
pub mod disk;
pub mod distortion;
pub mod dsdual;
pub mod error;
pub mod extrapolate;
pub mod farey;
pub mod grid;
pub mod metric;
pub mod minkowski;
pub mod moebius;
pub mod piecewise;
pub mod reconstruct;
pub mod routes;
pub mod schwarzian;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tolerances used across the crate, graded by input representation.
///
/// Analytic closures carry exact derivatives, so quadrature error dominates and the
/// tight tolerance applies at grid 1024 and above. Fourier-sampled inputs go through
/// spectral differentiation of sampled data and get one looser rung. The area oracle
/// integrates along a polyline and is only second order in the grid spacing.
pub mod tol {
    /// Cross-route agreement for analytic-closure inputs (grid >= 1024).
    pub const ANALYTIC: f64 = 1e-8;
    /// Cross-route agreement for fourier-sampled inputs.
    pub const SAMPLED: f64 = 1e-6;
    /// Agreement of the eta-circulation area oracle with the Gauss-Bonnet area.
    pub const ETA_AREA: f64 = 1e-5;
    /// Newton tolerance for monotone lift inversion.
    pub const LIFT_NEWTON: f64 = 1e-13;
}
