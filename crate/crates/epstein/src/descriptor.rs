//! JSON descriptors for metrics, diffeomorphisms, piecewise maps, and analytic
//! maps. Field names are fixed so fixtures can be shared across languages.
//!
//! ```json
//! {"kind":"fourier_sigma","coeffs":[[1, 0.3, 0.0], [2, 0.0, -0.1]]}
//! {"kind":"lift_sine","amp":0.5}
//! {"kind":"moebius","a":[1.0, 0.0],"b":[0.2, 0.1]}
//! {"kind":"blaschke","zeros":[[0.3, 0.1]],"rotation":0.0}
//! {"kind":"piecewise_moebius","breakpoints":[0.0, ...],"pieces":[{"a":[..],"b":[..]}, ...]}
//! {"kind":"piecewise_jumps","breakpoints":[0.0, ...],"jumps":[0.8, ...]}
//! {"kind":"power","n":2}
//! {"kind":"exp_sin","eps":0.05}
//! {"kind":"sigma_samples","values":[...]}
//! ```

use crate::analytic::AnalyticCircleMap;
use crate::diffeo::CircleDiffeo;
use crate::metric::{diffeo_from_metric, BoundaryMetric};
use crate::moebius::MoebiusDisk;
use crate::piecewise::{build_piecewise, PiecewiseMoebiusDiffeo};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MoebiusPair {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl MoebiusPair {
    pub fn to_moebius(&self) -> Result<MoebiusDisk> {
        MoebiusDisk::new(
            Complex64::new(self.a[0], self.a[1]),
            Complex64::new(self.b[0], self.b[1]),
        )
    }

    pub fn of(m: &MoebiusDisk) -> Self {
        let (a, b) = m.coefficients();
        Self {
            a: [a.re, a.im],
            b: [b.re, b.im],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum Descriptor {
    #[serde(rename = "fourier_sigma")]
    FourierSigma { coeffs: Vec<(u32, f64, f64)> },
    #[serde(rename = "sigma_samples")]
    SigmaSamples { values: Vec<f64> },
    #[serde(rename = "lift_sine")]
    LiftSine { amp: f64 },
    #[serde(rename = "lift_fourier")]
    LiftFourier { terms: Vec<(u32, f64, f64)> },
    #[serde(rename = "moebius")]
    Moebius {
        a: [f64; 2],
        b: [f64; 2],
    },
    #[serde(rename = "blaschke")]
    Blaschke {
        zeros: Vec<[f64; 2]>,
        #[serde(default)]
        rotation: f64,
    },
    #[serde(rename = "piecewise_moebius")]
    PiecewiseMoebius {
        breakpoints: Vec<f64>,
        pieces: Vec<MoebiusPair>,
    },
    #[serde(rename = "piecewise_jumps")]
    PiecewiseJumps {
        breakpoints: Vec<f64>,
        jumps: Vec<f64>,
    },
    #[serde(rename = "power")]
    Power { n: u32 },
    #[serde(rename = "exp_sin")]
    ExpSin { eps: f64 },
}

/// What a descriptor denotes once built.
#[derive(Debug, Clone)]
pub enum Input {
    Metric(BoundaryMetric),
    Diffeo(CircleDiffeo),
    Piecewise(PiecewiseMoebiusDiffeo),
    Analytic(AnalyticCircleMap),
}

impl Descriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors serialize")
    }

    pub fn build(&self) -> Result<Input> {
        match self {
            Descriptor::FourierSigma { coeffs } => {
                Ok(Input::Metric(BoundaryMetric::from_fourier_coeffs(coeffs)))
            }
            Descriptor::SigmaSamples { values } => {
                Ok(Input::Metric(BoundaryMetric::from_samples(values)?))
            }
            Descriptor::LiftSine { amp } => Ok(Input::Diffeo(CircleDiffeo::lift_sine(*amp)?)),
            Descriptor::LiftFourier { terms } => {
                Ok(Input::Diffeo(CircleDiffeo::from_lift_fourier(terms)?))
            }
            Descriptor::Moebius { a, b } => {
                let m = MoebiusPair { a: *a, b: *b }.to_moebius()?;
                Ok(Input::Diffeo(CircleDiffeo::from_moebius(&m)))
            }
            Descriptor::Blaschke { zeros, rotation } => {
                let zs: Vec<Complex64> =
                    zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                Ok(Input::Analytic(AnalyticCircleMap::blaschke(&zs, *rotation)?))
            }
            Descriptor::PiecewiseMoebius {
                breakpoints,
                pieces,
            } => {
                let ms: Vec<MoebiusDisk> = pieces
                    .iter()
                    .map(|p| p.to_moebius())
                    .collect::<Result<_>>()?;
                Ok(Input::Piecewise(PiecewiseMoebiusDiffeo::from_pieces(
                    breakpoints.clone(),
                    ms,
                )?))
            }
            Descriptor::PiecewiseJumps {
                breakpoints,
                jumps,
            } => {
                let (pm, _) = build_piecewise(breakpoints, jumps, None)?;
                Ok(Input::Piecewise(pm))
            }
            Descriptor::Power { n } => Ok(Input::Analytic(AnalyticCircleMap::power(*n)?)),
            Descriptor::ExpSin { eps } => Ok(Input::Analytic(AnalyticCircleMap::exp_sin(*eps)?)),
        }
    }
}

impl Descriptor {
    /// An analytic-circle-map view for the distortion pipeline (powers, Blaschke
    /// products, exp-of-odd-Laurent, and Möbius boundary maps).
    pub fn build_analytic(&self) -> Result<AnalyticCircleMap> {
        match self {
            Descriptor::Power { n } => AnalyticCircleMap::power(*n),
            Descriptor::ExpSin { eps } => AnalyticCircleMap::exp_sin(*eps),
            Descriptor::Blaschke { zeros, rotation } => {
                let zs: Vec<Complex64> =
                    zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                AnalyticCircleMap::blaschke(&zs, *rotation)
            }
            Descriptor::Moebius { a, b } => {
                AnalyticCircleMap::moebius(&MoebiusPair { a: *a, b: *b }.to_moebius()?)
            }
            _ => Err(Error::Precondition(
                "this descriptor kind has no analytic continuation off the circle".into(),
            )),
        }
    }
}

impl Input {
    /// A degree-1 diffeomorphism view, when one exists. Metrics must have length
    /// `2 pi` (callers rescale first when appropriate).
    pub fn diffeo(&self) -> Result<CircleDiffeo> {
        match self {
            Input::Diffeo(d) => Ok(d.clone()),
            Input::Metric(h) => diffeo_from_metric(h, 0.0),
            Input::Analytic(a) => {
                let d = a.boundary_diffeo()?;
                if d.degree() != 1 {
                    return Err(Error::Precondition(format!(
                        "analytic map has degree {}, not a diffeomorphism",
                        d.degree()
                    )));
                }
                Ok(d)
            }
            Input::Piecewise(_) => Err(Error::Precondition(
                "piecewise maps are handled by the piecewise pipeline".into(),
            )),
        }
    }

    /// A boundary-metric view (the pushforward for diffeomorphism-like inputs).
    pub fn metric(&self) -> Result<BoundaryMetric> {
        match self {
            Input::Metric(h) => Ok(h.clone()),
            _ => BoundaryMetric::pushforward(&self.diffeo()?),
        }
    }

    pub fn analytic(&self) -> Result<&AnalyticCircleMap> {
        match self {
            Input::Analytic(a) => Ok(a),
            _ => Err(Error::Precondition(
                "this operation needs an analytic-map descriptor (power, blaschke, exp_sin)"
                    .into(),
            )),
        }
    }

    pub fn piecewise(&self) -> Result<&PiecewiseMoebiusDiffeo> {
        match self {
            Input::Piecewise(p) => Ok(p),
            _ => Err(Error::Precondition(
                "this operation needs a piecewise-moebius descriptor".into(),
            )),
        }
    }
}
