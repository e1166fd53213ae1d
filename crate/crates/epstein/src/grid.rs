//! Uniform periodic grids and trapezoid quadrature.
//!
//! On a uniform grid the trapezoid rule is spectrally accurate for smooth periodic
//! integrands, which is what every total (length, curvature, action) in this crate
//! integrates.

use std::f64::consts::TAU;

/// Uniform grid on `[0, 2pi)` with `n` nodes and trapezoid weights `2pi/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    n: usize,
}

impl QuadratureGrid {
    /// `n` must be a power of two (so grids nest and the FFT path applies directly).
    pub fn new(n: usize) -> crate::Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(crate::Error::Precondition(format!(
                "grid size {n} is not a power of two"
            )));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> f64 {
        TAU * (j as f64) / (self.n as f64)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.node(j))
    }

    /// Weight of every node; they sum to `2pi`.
    pub fn weight(&self) -> f64 {
        TAU / (self.n as f64)
    }

    /// Trapezoid sum of samples taken at the grid nodes.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.n, "sample count must match grid size");
        samples.iter().sum::<f64>() * self.weight()
    }

    /// Integrate `f` sampled on the fly.
    pub fn integrate_fn(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        (0..self.n).map(|j| f(self.node(j))).sum::<f64>() * self.weight()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { n: 1024 }
    }
}

/// Trapezoid sum over one period for a sampled periodic function.
pub fn integrate_periodic(samples: &[f64], grid: &QuadratureGrid) -> f64 {
    grid.integrate(samples)
}
