//! Trigonometric interpolation of uniform periodic samples.
//!
//! Samples at the `n` nodes of a [`QuadratureGrid`](crate::grid::QuadratureGrid) are
//! converted once to Fourier coefficients with an FFT; values and the first two or
//! three derivatives of the interpolant can then be evaluated at arbitrary angles.
//! Reconstruction at the original nodes reproduces the samples to round-off, and
//! derivatives are the exact derivatives of the interpolant.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Fourier interpolant of real periodic samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct FourierInterpolant {
    /// Coefficients for modes `k = 0..=n/2`; `coeff[k]` multiplies `e^{ik theta}`
    /// and negative modes are implied by conjugation. The Nyquist mode is stored
    /// with its full (real) weight.
    coeffs: Vec<Complex64>,
    n: usize,
}

impl FourierInterpolant {
    pub fn from_samples(samples: &[f64]) -> crate::Result<Self> {
        let n = samples.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(crate::Error::Precondition(format!(
                "sample count {n} is not a power of two"
            )));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let scale = 1.0 / n as f64;
        let mut coeffs: Vec<Complex64> = buf[..half].iter().map(|c| c * scale).collect();
        coeffs.push(buf[half] * scale);
        Ok(Self { coeffs, n })
    }

    pub fn sample_count(&self) -> usize {
        self.n
    }

    /// Value and first `DERIVS` derivatives at `theta`.
    ///
    /// Mode `k` contributes `2 Re(c_k e^{ik theta})`, each derivative multiplying by
    /// `ik`. The Nyquist mode enters value and even derivatives only (its odd
    /// spectral derivatives vanish on symmetry grounds).
    pub fn eval_jet<const DERIVS: usize>(&self, theta: f64) -> [f64; DERIVS] {
        let half = self.n / 2;
        let mut out = [0.0; DERIVS];
        out[0] = self.coeffs[0].re;
        let rot = Complex64::from_polar(1.0, theta);
        let mut e = Complex64::new(1.0, 0.0);
        for k in 1..half {
            e *= rot;
            let base = self.coeffs[k] * e;
            let mut factor = Complex64::new(2.0, 0.0);
            for slot in out.iter_mut() {
                *slot += (factor * base).re;
                factor *= Complex64::new(0.0, k as f64);
            }
        }
        // Nyquist: real weight on cos(half * theta); odd derivatives drop out.
        let c = self.coeffs[half].re;
        let kh = half as f64;
        let mut d = 0;
        while d < DERIVS {
            let phase = (kh * theta).cos();
            let sign_pow = match (d / 2) % 2 {
                0 => 1.0,
                _ => -1.0,
            };
            out[d] += c * sign_pow * kh.powi(d as i32) * phase;
            d += 2;
        }
        out
    }

    /// Trapezoid integral of the interpolant over one period (exact: `2pi c_0`).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Damps mode `k` by `exp(-(k eps)^2 / 2)`: Gaussian mollification at width
    /// `eps`, used to smooth piecewise lifts into C^infinity diffeomorphisms.
    pub fn gaussian_mollified(&self, eps: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (-0.5 * (k as f64 * eps).powi(2)).exp())
            .collect();
        Self {
            coeffs,
            n: self.n,
        }
    }

    /// Antiderivative with zero mean-slope handled by the caller: returns the
    /// periodic part `P(theta)` with `P' = f - mean(f)` and `P(0) = 0`.
    pub fn periodic_antiderivative(&self) -> FourierInterpolant {
        let half = self.n / 2;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); half + 1];
        for (k, slot) in coeffs.iter_mut().enumerate().take(half).skip(1) {
            *slot = self.coeffs[k] / Complex64::new(0.0, k as f64);
        }
        // Nyquist mode: cos(h t) integrates to sin(h t)/h, which the symmetric
        // storage cannot hold exactly; its weight is already O(round-off) for the
        // smooth inputs this is used on, so it is dropped.
        let mut p = FourierInterpolant { coeffs, n: self.n };
        let at_zero = p.eval_jet::<1>(0.0)[0];
        p.coeffs[0] -= Complex64::new(at_zero, 0.0);
        p
    }
}

/// Spectral derivative samples on the same grid (a convenience built on the
/// interpolant; used by tests and by sampled metrics).
pub fn derivative_samples(samples: &[f64], order: usize) -> crate::Result<Vec<f64>> {
    let interp = FourierInterpolant::from_samples(samples)?;
    let n = samples.len();
    Ok((0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            match order {
                0 => interp.eval_jet::<1>(t)[0],
                1 => interp.eval_jet::<2>(t)[1],
                2 => interp.eval_jet::<3>(t)[2],
                3 => interp.eval_jet::<4>(t)[3],
                _ => panic!("derivative order {order} not supported"),
            }
        })
        .collect())
}
