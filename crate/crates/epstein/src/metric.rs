//! Boundary metrics `h = e^{sigma(theta)} d theta` on the circle.
//!
//! A metric stores a jet closure returning `sigma` and its first two angular
//! derivatives. Two representations exist behind the same interface: analytic
//! closures (exact derivatives; fixtures and oracles) and trigonometric
//! interpolants of uniform samples (spectral derivatives; arbitrary inputs).
//! Pushforwards of `d theta` under diffeomorphisms keep exact jets by running the
//! chain rule through a Newton lift inversion.

use crate::diffeo::{newton_monotone, CircleDiffeo, DiffeoRepr, LiftJet};
use crate::grid::QuadratureGrid;
use crate::spectral::FourierInterpolant;
use crate::{Error, Result};
use std::f64::consts::TAU;
use std::sync::Arc;

/// `sigma`, `sigma_theta`, `sigma_theta_theta` at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaJet {
    pub sigma: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricRepr {
    AnalyticClosure,
    FourierSampled,
    FromDiffeo,
}

type SigmaFn = Arc<dyn Fn(f64) -> SigmaJet + Send + Sync>;

#[derive(Clone)]
pub struct BoundaryMetric {
    jet: SigmaFn,
    repr: MetricRepr,
    total_length: f64,
}

impl std::fmt::Debug for BoundaryMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryMetric")
            .field("repr", &self.repr)
            .field("total_length", &self.total_length)
            .finish()
    }
}

const LENGTH_GRID: usize = 2048;

impl BoundaryMetric {
    pub fn from_sigma_fn(
        jet: impl Fn(f64) -> SigmaJet + Send + Sync + 'static,
        repr: MetricRepr,
    ) -> Self {
        let jet: SigmaFn = Arc::new(jet);
        let grid = QuadratureGrid::new(LENGTH_GRID).unwrap();
        let total_length = grid.integrate_fn(|t| jet(t).sigma.exp());
        Self {
            jet,
            repr,
            total_length,
        }
    }

    /// The round metric `d theta`.
    pub fn round() -> Self {
        Self::from_sigma_fn(
            |_| SigmaJet {
                sigma: 0.0,
                d1: 0.0,
                d2: 0.0,
            },
            MetricRepr::AnalyticClosure,
        )
    }

    /// `sigma = sum_k a_k cos(k theta) + b_k sin(k theta)` (a `k = 0` term is a
    /// constant shift `a_0`).
    pub fn from_fourier_coeffs(terms: &[(u32, f64, f64)]) -> Self {
        let terms = terms.to_vec();
        Self::from_sigma_fn(
            move |t| {
                let mut j = SigmaJet {
                    sigma: 0.0,
                    d1: 0.0,
                    d2: 0.0,
                };
                for &(k, a, b) in &terms {
                    let kf = k as f64;
                    let (s, c) = (kf * t).sin_cos();
                    j.sigma += a * c + b * s;
                    j.d1 += kf * (-a * s + b * c);
                    j.d2 += kf * kf * (-a * c - b * s);
                }
                j
            },
            MetricRepr::AnalyticClosure,
        )
    }

    /// Trigonometric interpolant of `sigma` sampled at uniform nodes; derivatives
    /// are the spectral derivatives of the interpolant.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let interp = FourierInterpolant::from_samples(samples)?;
        Ok(Self::from_sigma_fn(
            move |t| {
                let j = interp.eval_jet::<3>(t);
                SigmaJet {
                    sigma: j[0],
                    d1: j[1],
                    d2: j[2],
                }
            },
            MetricRepr::FourierSampled,
        ))
    }

    /// Pushforward `phi_* d theta` of the round metric (density `|(phi^{-1})'|`).
    ///
    /// The jet at target angle `theta` is evaluated at `g = F^{-1}(theta)` through
    /// the chain rule, where `F` is the lift of `phi`. When `phi` was built as an
    /// inverse, the pushforward is `|phi_inner'| d theta` and needs no inversion.
    pub fn pushforward(phi: &CircleDiffeo) -> Result<Self> {
        if phi.degree() != 1 {
            return Err(Error::Precondition(format!(
                "pushforward needs a degree-1 diffeomorphism, got degree {}",
                phi.degree()
            )));
        }
        if phi.repr() == DiffeoRepr::InverseOf {
            if let Ok(inner) = phi.inverse() {
                // density of (phi_inner^{-1})_* d theta at theta is just the
                // forward lift derivative F'(theta): no inversion at all
                let m = Self::from_sigma_fn(
                    move |theta| {
                        let j = inner.jet(theta);
                        sigma_jet_of_log_derivative(&j)
                    },
                    MetricRepr::FromDiffeo,
                );
                return Ok(m);
            }
        }
        let phi = phi.clone();
        Ok(Self::from_sigma_fn(
            move |theta| {
                let g = phi.invert_lift(theta);
                let j = phi.jet(g);
                sigma_jet_of_pushforward(&j)
            },
            MetricRepr::FromDiffeo,
        ))
    }

    /// Pushforward of an arbitrary metric by a diffeomorphism:
    /// `sigma'(theta) = sigma(g) - log F'(g)` with `g = F^{-1}(theta)`.
    pub fn pushforward_of(h: &BoundaryMetric, phi: &CircleDiffeo) -> Result<Self> {
        if phi.degree() != 1 {
            return Err(Error::Precondition(
                "pushforward_of needs a degree-1 diffeomorphism".into(),
            ));
        }
        let phi = phi.clone();
        let h = h.clone();
        Ok(Self::from_sigma_fn(
            move |theta| {
                let g = phi.invert_lift(theta);
                let f = phi.jet(g);
                let s = h.jet(g);
                let g1 = 1.0 / f.d1;
                let lf = f.d2 / f.d1;
                let lf2 = f.d3 / f.d1 - (f.d2 / f.d1) * (f.d2 / f.d1);
                SigmaJet {
                    sigma: s.sigma - f.d1.ln(),
                    d1: (s.d1 - lf) * g1,
                    d2: (s.d2 - lf2) * g1 * g1 + (s.d1 - lf) * (-f.d2 * g1 * g1 * g1),
                }
            },
            MetricRepr::FromDiffeo,
        ))
    }

    pub fn jet(&self, theta: f64) -> SigmaJet {
        (self.jet)(theta)
    }

    pub fn sigma(&self, theta: f64) -> f64 {
        self.jet(theta).sigma
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.jet(theta).sigma.exp()
    }

    pub fn repr(&self) -> MetricRepr {
        self.repr
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total_length - TAU).abs() <= tol
    }

    /// The scaled metric `e^t h` (conformal factor `sigma + t`).
    pub fn scaled(&self, t: f64) -> Self {
        let jet = Arc::clone(&self.jet);
        Self {
            jet: Arc::new(move |theta| {
                let mut j = jet(theta);
                j.sigma += t;
                j
            }),
            repr: self.repr,
            total_length: self.total_length * t.exp(),
        }
    }

    /// Constant rescaling to total length `2 pi`.
    pub fn rescaled_to_round_length(&self) -> Self {
        self.scaled((TAU / self.total_length).ln())
    }
}

fn sigma_jet_of_pushforward(j: &LiftJet) -> SigmaJet {
    // sigma = -log F'(g), with g'(theta) = 1/F'(g)
    let d1 = j.d1;
    SigmaJet {
        sigma: -d1.ln(),
        d1: -j.d2 / (d1 * d1),
        d2: -j.d3 / (d1 * d1 * d1) + 2.0 * j.d2 * j.d2 / (d1 * d1 * d1 * d1),
    }
}

fn sigma_jet_of_log_derivative(j: &LiftJet) -> SigmaJet {
    // sigma = log F'(theta) with its own angular derivatives
    let d1 = j.d1;
    SigmaJet {
        sigma: d1.ln(),
        d1: j.d2 / d1,
        d2: (j.d3 * d1 - j.d2 * j.d2) / (d1 * d1),
    }
}

const NORMALIZATION_TOL: f64 = 1e-8;

/// The diffeomorphism `phi` with `phi_* d theta = h`, pinned by `phi(1) = e^{i theta0}`.
///
/// Built by inverting the arc-length integral `F(theta) = int_{theta0}^theta e^sigma`:
/// `F` is the lift of `phi^{-1}` and is integrated spectrally once at construction.
/// Requires `h` to have total length `2 pi` (rescale first otherwise).
pub fn diffeo_from_metric(h: &BoundaryMetric, theta0: f64) -> Result<CircleDiffeo> {
    if (h.total_length() - TAU).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            length: h.total_length(),
            expected: TAU,
        });
    }
    let n = 4096;
    let samples: Vec<f64> = (0..n)
        .map(|j| h.density(TAU * j as f64 / n as f64))
        .collect();
    let interp = FourierInterpolant::from_samples(&samples)?;
    let mean = interp.mean();
    let periodic = interp.periodic_antiderivative();
    let at_theta0 = mean * theta0 + periodic.eval_jet::<1>(theta0)[0];
    let h = h.clone();
    // F(x) = mean x + P(x) - F(theta0); bracket from the periodic part's range
    let mut p_lo = f64::INFINITY;
    let mut p_hi = f64::NEG_INFINITY;
    for j in 0..512 {
        let t = TAU * j as f64 / 512.0;
        let p = periodic.eval_jet::<1>(t)[0] - at_theta0 + (mean - 1.0) * t;
        p_lo = p_lo.min(p);
        p_hi = p_hi.max(p);
    }
    CircleDiffeo::from_jet_fn(
        move |y| {
            let lo = y - p_hi - 0.5;
            let hi = y - p_lo + 0.5;
            let x = newton_monotone(
                |t| {
                    (
                        mean * t + periodic.eval_jet::<1>(t)[0] - at_theta0,
                        h.density(t),
                    )
                },
                y,
                lo,
                hi,
            );
            let s = h.jet(x);
            let e = (-s.sigma).exp();
            LiftJet {
                value: x,
                d1: e,
                d2: -s.d1 * e * e,
                d3: (2.0 * s.d1 * s.d1 - s.d2) * e * e * e,
            }
        },
        DiffeoRepr::FromMetric,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sine_half() -> CircleDiffeo {
        CircleDiffeo::lift_sine(0.5).unwrap()
    }

    #[test]
    fn pushforward_of_identity_is_round() {
        let h = BoundaryMetric::pushforward(&CircleDiffeo::identity()).unwrap();
        for j in 0..32 {
            let t = TAU * j as f64 / 32.0;
            assert_abs_diff_eq!(h.sigma(t), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(h.total_length(), TAU, epsilon = 1e-10);
    }

    #[test]
    fn pushforward_of_rotation_is_round() {
        let h = BoundaryMetric::pushforward(&CircleDiffeo::rotation(1.1)).unwrap();
        for j in 0..32 {
            let t = TAU * j as f64 / 32.0;
            assert_abs_diff_eq!(h.sigma(t), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pushforward_jet_matches_numeric_inversion_oracle() {
        // independent oracle: invert the lift numerically on a fine grid and take
        // centered finite differences of -log F'(g)
        let phi = sine_half();
        let h = BoundaryMetric::pushforward(&phi).unwrap();
        assert_abs_diff_eq!(h.total_length(), TAU, epsilon = 1e-10);
        let n = 1024;
        let fd = 1e-5;
        let mut max_err: f64 = 0.0;
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let sig = |tt: f64| -> f64 { -phi.jet(phi.invert_lift(tt)).d1.ln() };
            let jet = h.jet(t);
            max_err = max_err.max((jet.sigma - sig(t)).abs());
            let d1_fd = (sig(t + fd) - sig(t - fd)) / (2.0 * fd);
            max_err = max_err.max((jet.d1 - d1_fd).abs());
        }
        assert!(max_err < 1e-8, "max error {max_err}");
    }

    #[test]
    fn pushforward_of_inverse_avoids_nesting() {
        let phi = sine_half();
        let inv = phi.inverse().unwrap();
        let h = BoundaryMetric::pushforward(&inv).unwrap();
        // density of (phi^{-1})_* d theta at theta is F'(F^{-1}... checked against
        // the generic path on the raw closure
        let h_generic = BoundaryMetric::pushforward_of(&BoundaryMetric::round(), &inv).unwrap();
        for j in 0..64 {
            let t = TAU * j as f64 / 64.0;
            let a = h.jet(t);
            let b = h_generic.jet(t);
            assert_abs_diff_eq!(a.sigma, b.sigma, epsilon = 1e-9);
            assert_abs_diff_eq!(a.d1, b.d1, epsilon = 1e-8);
            assert_abs_diff_eq!(a.d2, b.d2, epsilon = 1e-7);
        }
    }

    #[test]
    fn diffeo_from_metric_round_trip() {
        let phi = sine_half();
        let h = BoundaryMetric::pushforward(&phi).unwrap();
        let rec = diffeo_from_metric(&h, 0.0).unwrap();
        // pushing the recovered map forward reproduces sigma in sup norm, and the
        // recovered lift matches phi up to a source rotation
        let back = BoundaryMetric::pushforward(&rec).unwrap();
        let shift = rec.invert_lift(phi.lift(0.0));
        let mut max_err: f64 = 0.0;
        let mut max_lift_err: f64 = 0.0;
        for j in 0..256 {
            let t = TAU * j as f64 / 256.0;
            max_err = max_err.max((back.sigma(t) - h.sigma(t)).abs());
            max_lift_err = max_lift_err.max((rec.lift(t + shift) - phi.lift(t)).abs());
        }
        assert!(max_err < 1e-8, "pushforward round trip error {max_err}");
        assert!(max_lift_err < 1e-8, "lift alignment error {max_lift_err}");
    }

    #[test]
    fn diffeo_from_round_metric_is_rotation() {
        let rec = diffeo_from_metric(&BoundaryMetric::round(), 0.0).unwrap();
        for j in 0..16 {
            let t = TAU * j as f64 / 16.0;
            assert_abs_diff_eq!(rec.lift(t) - rec.lift(0.0), t, epsilon = 1e-10);
            assert_abs_diff_eq!(rec.jet(t).d1, 1.0, epsilon = 1e-10);
        }
        // theta0 = 0: phi(1) = 1
        assert_abs_diff_eq!(rec.lift(0.0), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn diffeo_from_metric_requires_normalization() {
        let h = BoundaryMetric::from_fourier_coeffs(&[(0, 0.3, 0.0)]);
        assert!(matches!(
            diffeo_from_metric(&h, 0.0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn appendix_cosine_squared_metric_rescales_to_diffeo() {
        // sigma = cos^2(theta/2): rescaled to length 2 pi it generates a monotone
        // degree-1 lift
        let h = BoundaryMetric::from_sigma_fn(
            |t| {
                let c = (t / 2.0).cos();
                let s = (t / 2.0).sin();
                SigmaJet {
                    sigma: c * c,
                    d1: -c * s,
                    d2: 0.5 * (s * s - c * c),
                }
            },
            MetricRepr::AnalyticClosure,
        );
        // independent oracle: integral of exp((1 + cos)/2) is 2 pi e^{1/2} I_0(1/2)
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..30 {
            if k > 0 {
                term *= (0.25 * 0.25) / ((k * k) as f64);
            }
            i0 += term;
        }
        assert_abs_diff_eq!(h.total_length(), TAU * 0.5f64.exp() * i0, epsilon = 1e-10);
        assert!(h.total_length() > TAU);
        let hn = h.rescaled_to_round_length();
        assert_abs_diff_eq!(hn.total_length(), TAU, epsilon = 1e-10);
        let phi = diffeo_from_metric(&hn, 0.0).unwrap();
        assert_eq!(phi.degree(), 1);
        assert_abs_diff_eq!(phi.lift(TAU) - phi.lift(0.0), TAU, epsilon = 1e-9);
    }

    #[test]
    fn fourier_sampled_metric_matches_closure() {
        let closure = BoundaryMetric::from_fourier_coeffs(&[(3, 0.4, 0.0)]);
        let n = 64;
        let samples: Vec<f64> = (0..n).map(|j| closure.sigma(TAU * j as f64 / n as f64)).collect();
        let sampled = BoundaryMetric::from_samples(&samples).unwrap();
        assert_eq!(sampled.repr(), MetricRepr::FourierSampled);
        for j in 0..101 {
            let t = TAU * j as f64 / 101.0;
            let a = closure.jet(t);
            let b = sampled.jet(t);
            assert_abs_diff_eq!(a.sigma, b.sigma, epsilon = 1e-10);
            assert_abs_diff_eq!(a.d1, b.d1, epsilon = 1e-10);
            assert_abs_diff_eq!(a.d2, b.d2, epsilon = 1e-10);
        }
    }
}
