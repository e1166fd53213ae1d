//! The Minkowski model: R^{1,2} with `q(x) = -x0^2 + x1^2 + x2^2`.
//!
//! Hyperbolic points satisfy `q = -1, x0 > 0`; de Sitter points satisfy `q = +1`.
//! The disk embeds by `z -> ((1+|z|^2), 2x, 2y)/(1-|z|^2)` and the embedding is an
//! isometry onto the hyperboloid, so disk tangent vectors of hyperbolic norm one
//! push forward to unit spacelike vectors.

use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiVec {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MinkowskiVec {
    pub fn new(x0: f64, x1: f64, x2: f64) -> Self {
        Self { x0, x1, x2 }
    }

    pub fn q(&self) -> f64 {
        -self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn dot(&self, o: &Self) -> f64 {
        -self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.x0, s * self.x1, s * self.x2)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2)
    }
}

/// Disk point to hyperboloid.
pub fn to_minkowski(p: Complex64) -> Result<MinkowskiVec> {
    let r2 = p.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::OutsideDisk { modulus: p.norm() });
    }
    let d = 1.0 - r2;
    Ok(MinkowskiVec::new((1.0 + r2) / d, 2.0 * p.re / d, 2.0 * p.im / d))
}

/// Hyperboloid point back to the disk.
pub fn from_minkowski(v: &MinkowskiVec) -> Complex64 {
    Complex64::new(v.x1 / (1.0 + v.x0), v.x2 / (1.0 + v.x0))
}

/// Pushforward of a Euclidean tangent vector `v` at the disk point `p`.
///
/// A vector of hyperbolic norm one maps to a `q = +1` vector tangent to the
/// hyperboloid at `to_minkowski(p)`.
pub fn tangent_to_minkowski(p: Complex64, v: Complex64) -> Result<MinkowskiVec> {
    let r2 = p.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::OutsideDisk { modulus: p.norm() });
    }
    let d = 1.0 - r2;
    let s = p.re * v.re + p.im * v.im;
    Ok(MinkowskiVec::new(
        4.0 * s / (d * d),
        2.0 * v.re / d + 4.0 * p.re * s / (d * d),
        2.0 * v.im / d + 4.0 * p.im * s / (d * d),
    ))
}

const FRAME_TOL: f64 = 1e-9;

/// Unit tangent completing `(x, T, N)` to a positively oriented Lorentz frame.
///
/// `x` must be hyperbolic (`q = -1`), `N` de Sitter (`q = +1`) and `<x, N> = 0`.
/// The returned `T` satisfies `<T, x> = <T, N> = 0`, `q(T) = 1`, and the matrix
/// with columns `x, T, N` has determinant `+1`.
pub fn dual_frame(x: &MinkowskiVec, n: &MinkowskiVec) -> Result<MinkowskiVec> {
    if (x.q() + 1.0).abs() > FRAME_TOL || (n.q() - 1.0).abs() > FRAME_TOL {
        return Err(Error::Precondition(format!(
            "dual_frame needs q(x) = -1, q(N) = +1; got {} and {}",
            x.q(),
            n.q()
        )));
    }
    if x.dot(n).abs() > FRAME_TOL {
        return Err(Error::Precondition(format!(
            "dual_frame needs <x, N> = 0; got {}",
            x.dot(n)
        )));
    }
    // J (x cross N) is q-orthogonal to both (J = diag(-1, 1, 1))
    let cx = x.x1 * n.x2 - x.x2 * n.x1;
    let cy = x.x2 * n.x0 - x.x0 * n.x2;
    let cz = x.x0 * n.x1 - x.x1 * n.x0;
    let mut t = MinkowskiVec::new(-cx, cy, cz);
    let qt = t.q();
    if qt <= 0.0 {
        return Err(Error::Precondition(
            "degenerate frame: completed vector is not spacelike".into(),
        ));
    }
    t = t.scale(1.0 / qt.sqrt());
    if det3(x, &t, n) < 0.0 {
        t = t.scale(-1.0);
    }
    Ok(t)
}

/// Determinant of the matrix with columns `a, b, c`.
pub fn det3(a: &MinkowskiVec, b: &MinkowskiVec, c: &MinkowskiVec) -> f64 {
    a.x0 * (b.x1 * c.x2 - b.x2 * c.x1) - b.x0 * (a.x1 * c.x2 - a.x2 * c.x1)
        + c.x0 * (a.x1 * b.x2 - a.x2 * b.x1)
}
