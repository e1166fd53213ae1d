//! Circle maps as lifted angle functions.
//!
//! A degree-`n` cover of the circle is stored through its lift `theta -> F(theta)`
//! with `F(theta + 2pi) = F(theta) + 2pi n` and `F' > 0`, together with the first
//! three derivatives of the lift. Working with lifts avoids branch cuts entirely:
//! the degree is the increment over one period divided by `2pi`, and inversion is
//! bracketed Newton on a monotone function.

use crate::moebius::MoebiusDisk;
use crate::{tol, Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Value and first three derivatives of a lift at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffeoRepr {
    /// Exact derivatives from a closed-form lift.
    AnalyticClosure,
    /// Built by inverting an integrated metric.
    FromMetric,
    /// Numeric inverse of another stored map.
    InverseOf,
}

type JetFn = Arc<dyn Fn(f64) -> LiftJet + Send + Sync>;

#[derive(Clone)]
pub struct CircleDiffeo {
    jet: JetFn,
    degree: u32,
    repr: DiffeoRepr,
    /// Present when this map was produced by [`CircleDiffeo::inverse`]; lets a
    /// double inverse unwrap and gives pushforwards an exact fast path.
    inverse_of: Option<Arc<CircleDiffeo>>,
    /// Sampled range of `F(theta) - n theta`, padded; brackets lift inversion.
    periodic_lo: f64,
    periodic_hi: f64,
}

impl std::fmt::Debug for CircleDiffeo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleDiffeo")
            .field("degree", &self.degree)
            .field("repr", &self.repr)
            .finish()
    }
}

impl CircleDiffeo {
    /// Wraps a lift jet, checking degree and orientation on a dense sample.
    pub fn from_jet_fn(
        jet: impl Fn(f64) -> LiftJet + Send + Sync + 'static,
        repr: DiffeoRepr,
    ) -> Result<Self> {
        let jet: JetFn = Arc::new(jet);
        let increment = jet(TAU).value - jet(0.0).value;
        let degree_f = increment / TAU;
        let degree = degree_f.round();
        if (degree_f - degree).abs() > 1e-6 || degree < 1.0 {
            return Err(Error::NotADiffeo {
                theta: TAU,
                d1: degree_f,
            });
        }
        let degree = degree as u32;
        let samples = 512;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..samples {
            let t = TAU * j as f64 / samples as f64;
            let g = jet(t);
            if !(g.d1 > 0.0) {
                return Err(Error::NotADiffeo { theta: t, d1: g.d1 });
            }
            let p = g.value - degree as f64 * t;
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Ok(Self {
            jet,
            degree,
            repr,
            inverse_of: None,
            periodic_lo: lo - 0.5,
            periodic_hi: hi + 0.5,
        })
    }

    pub fn identity() -> Self {
        Self::rotation(0.0)
    }

    /// `z -> e^{i beta} z`.
    pub fn rotation(beta: f64) -> Self {
        Self::from_jet_fn(
            move |t| LiftJet {
                value: t + beta,
                d1: 1.0,
                d2: 0.0,
                d3: 0.0,
            },
            DiffeoRepr::AnalyticClosure,
        )
        .expect("rotations are diffeomorphisms")
    }

    /// Lift `theta + amp sin(theta)`; requires `|amp| < 1`.
    pub fn lift_sine(amp: f64) -> Result<Self> {
        Self::from_jet_fn(
            move |t| LiftJet {
                value: t + amp * t.sin(),
                d1: 1.0 + amp * t.cos(),
                d2: -amp * t.sin(),
                d3: -amp * t.cos(),
            },
            DiffeoRepr::AnalyticClosure,
        )
    }

    /// Lift `theta + sum_k a_k cos(k theta) + b_k sin(k theta)`.
    pub fn from_lift_fourier(terms: &[(u32, f64, f64)]) -> Result<Self> {
        let terms = terms.to_vec();
        Self::from_jet_fn(
            move |t| {
                let mut jet = LiftJet {
                    value: t,
                    d1: 1.0,
                    d2: 0.0,
                    d3: 0.0,
                };
                for &(k, a, b) in &terms {
                    let kf = k as f64;
                    let (s, c) = (kf * t).sin_cos();
                    jet.value += a * c + b * s;
                    jet.d1 += kf * (-a * s + b * c);
                    jet.d2 += kf * kf * (-a * c - b * s);
                    jet.d3 += kf * kf * kf * (a * s - b * c);
                }
                jet
            },
            DiffeoRepr::AnalyticClosure,
        )
    }

    /// Boundary restriction of a Möbius map of the disk, with exact lift jet.
    pub fn from_moebius(m: &MoebiusDisk) -> Self {
        let m = *m;
        let (a, b) = m.coefficients();
        let base = 2.0 * a.arg();
        let ratio = b / a;
        Self::from_jet_fn(
            move |t| {
                let z = Complex64::from_polar(1.0, t);
                // smooth lift: theta + 2 arg(a) + 2 arg(1 + (b/a) e^{-i theta})
                let value = t + base + 2.0 * (Complex64::new(1.0, 0.0) + ratio * z.conj()).arg();
                let phi = m.apply(z).expect("PSU(1,1) maps are regular on the circle");
                let d1c = m.derivative(z).expect("regular on the circle");
                let d2c = m.second_derivative(z).expect("regular on the circle");
                let d3c = m.third_derivative(z).expect("regular on the circle");
                let (d1, d2, d3) = lift_derivatives_from_complex(z, phi, d1c, d2c, d3c);
                LiftJet { value, d1, d2, d3 }
            },
            DiffeoRepr::AnalyticClosure,
        )
        .expect("Möbius boundary restrictions are diffeomorphisms")
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn repr(&self) -> DiffeoRepr {
        self.repr
    }

    pub fn jet(&self, theta: f64) -> LiftJet {
        (self.jet)(theta)
    }

    pub fn lift(&self, theta: f64) -> f64 {
        self.jet(theta).value
    }

    /// Image point `e^{i F(theta)}` on the circle.
    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.lift(theta))
    }

    /// Solves `F(x) = y` by bracketed Newton with bisection fallback.
    pub fn invert_lift(&self, y: f64) -> f64 {
        let n = self.degree as f64;
        let mut lo = (y - self.periodic_hi) / n;
        let mut hi = (y - self.periodic_lo) / n;
        while self.jet(lo).value > y {
            lo -= 1.0;
        }
        while self.jet(hi).value < y {
            hi += 1.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = self.jet(x);
            let err = g.value - y;
            if err.abs() < tol::LIFT_NEWTON {
                return x;
            }
            if err > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = err / g.d1;
            let next = x - step;
            x = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        x
    }

    /// Inverse diffeomorphism (degree 1 only); derivatives come from the inverse
    /// function theorem at the Newton-inverted angle.
    pub fn inverse(&self) -> Result<Self> {
        if self.degree != 1 {
            return Err(Error::Precondition(format!(
                "cannot invert a degree-{} cover",
                self.degree
            )));
        }
        if let Some(orig) = &self.inverse_of {
            return Ok((**orig).clone());
        }
        let fwd = Arc::new(self.clone());
        let fwd2 = Arc::clone(&fwd);
        let mut out = Self::from_jet_fn(
            move |y| {
                let x = fwd2.invert_lift(y);
                let f = fwd2.jet(x);
                let g1 = 1.0 / f.d1;
                let g2 = -f.d2 * g1 * g1 * g1;
                let g3 = -f.d3 * g1.powi(4) + 3.0 * f.d2 * f.d2 * g1.powi(5);
                LiftJet {
                    value: x,
                    d1: g1,
                    d2: g2,
                    d3: g3,
                }
            },
            DiffeoRepr::InverseOf,
        )?;
        out.inverse_of = Some(fwd);
        Ok(out)
    }

    /// Composition `self ∘ other` via the chain rule on lift jets.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let f = self.clone();
        let g = other.clone();
        Self::from_jet_fn(
            move |t| {
                let gj = g.jet(t);
                let fj = f.jet(gj.value);
                LiftJet {
                    value: fj.value,
                    d1: fj.d1 * gj.d1,
                    d2: fj.d2 * gj.d1 * gj.d1 + fj.d1 * gj.d2,
                    d3: fj.d3 * gj.d1.powi(3) + 3.0 * fj.d2 * gj.d1 * gj.d2 + fj.d1 * gj.d3,
                }
            },
            self.repr,
        )
    }

    /// Post-composition with a Möbius map (the left PSU(1,1) action).
    pub fn compose_moebius_left(&self, m: &MoebiusDisk) -> Result<Self> {
        Self::from_moebius(m).compose(self)
    }

    /// The element of the conjugated Möbius group whose `n`-fold cover is
    /// `z -> m(z^n)`: its lift is `A(n theta)/n` for the lift `A` of `m`. These
    /// maps form the invariance group of the `n`-fold action.
    pub fn moebius_n(m: &MoebiusDisk, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("moebius_n needs n >= 1".into()));
        }
        let base = Self::from_moebius(m);
        let nf = n as f64;
        Self::from_jet_fn(
            move |t| {
                let j = base.jet(nf * t);
                LiftJet {
                    value: j.value / nf,
                    d1: j.d1,
                    d2: nf * j.d2,
                    d3: nf * nf * j.d3,
                }
            },
            DiffeoRepr::AnalyticClosure,
        )
    }

    /// The `n`-fold cover `z -> phi(z)^n`, whose lift is `n F(theta)`.
    pub fn nfold_cover(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("n-fold cover needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let nf = n as f64;
        let inner = self.clone();
        Self::from_jet_fn(
            move |t| {
                let j = inner.jet(t);
                LiftJet {
                    value: nf * j.value,
                    d1: nf * j.d1,
                    d2: nf * j.d2,
                    d3: nf * j.d3,
                }
            },
            self.repr,
        )
    }
}

/// Lift derivatives of a circle-preserving analytic map from its complex jet.
///
/// With `P = phi' z / phi` and `u = phi'' z^2 / phi`, `w = phi''' z^3 / phi`
/// (all evaluated on `|z| = 1`):
/// `F' = Re P`, `F'' = Re(i (u + P - P^2))`, and differentiating once more,
/// `F''' = Re(i (u' + P' - 2 P P'))` with `u' = i (w + 2u - u P)`, `P' = i (u + P - P^2)`.
pub(crate) fn lift_derivatives_from_complex(
    z: Complex64,
    phi: Complex64,
    d1: Complex64,
    d2: Complex64,
    d3: Complex64,
) -> (f64, f64, f64) {
    let i = Complex64::new(0.0, 1.0);
    let p = d1 * z / phi;
    let u = d2 * z * z / phi;
    let w = d3 * z * z * z / phi;
    let dp = i * (u + p - p * p);
    let du = i * (w + 2.0 * u - u * p);
    let ddp = i * (du + dp - 2.0 * p * dp);
    (p.re, dp.re, ddp.re)
}

/// Bracketed Newton for a strictly increasing function with derivative supplied.
pub(crate) fn newton_monotone(
    f: impl Fn(f64) -> (f64, f64),
    y: f64,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = f(x);
        let err = v - y;
        if err.abs() < tol::LIFT_NEWTON {
            return x;
        }
        if err > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let next = x - err / d;
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}
