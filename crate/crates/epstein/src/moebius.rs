//! Möbius transformations of the unit disk.
//!
//! An element of PSU(1,1) is stored as a unit-determinant pair `(a, b)` acting by
//! `z -> (a z + b)/(conj(b) z + conj(a))`. The pair is renormalized after every
//! composition so long products (triangulation walks, closure Newton iterations)
//! do not drift off the group.

use crate::{Error, Result};
use num_complex::Complex64;

const DEGENERATE_DENOM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusDisk {
    a: Complex64,
    b: Complex64,
}

impl MoebiusDisk {
    /// Normalizes `(a, b)` to `|a|^2 - |b|^2 = 1`; rejects pairs outside PSU(1,1).
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() - b.norm_sqr();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotPsu { norm });
        }
        let s = norm.sqrt();
        Ok(Self { a: a / s, b: b / s })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation `z -> e^{i psi} z`.
    pub fn rotation(psi: f64) -> Self {
        Self {
            a: Complex64::from_polar(1.0, psi / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// The map `z -> (z + c)/(1 + conj(c) z)` sending `0` to `c`.
    pub fn translation_to(c: Complex64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), c)
    }

    /// Coefficients `(a, b)`.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    /// Recover a PSU(1,1) element from a general 2x2 complex matrix known to act as
    /// a disk automorphism (e.g. a product of disk/half-plane factor maps).
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let [[m11, m12], [m21, m22]] = m;
        if m22.norm() == 0.0 && m11.norm() == 0.0 {
            return Err(Error::NotPsu { norm: f64::NAN });
        }
        // mu M must have the form [[a, b], [conj(b), conj(a)]]: solve for the phase.
        let chi = (m11.conj() / m22).arg() / 2.0;
        let mu = Complex64::from_polar(1.0, chi);
        let a = mu * m11;
        let b = mu * m12;
        let pattern = ((mu * m22) - a.conj()).norm() + ((mu * m21) - b.conj()).norm();
        let scale = a.norm() + b.norm();
        if pattern > 1e-9 * scale.max(1.0) {
            return Err(Error::NotPsu { norm: f64::NAN });
        }
        Self::new(a, b)
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() < DEGENERATE_DENOM {
            return Err(Error::SingularMap { z });
        }
        Ok((self.a * z + self.b) / den)
    }

    /// Complex derivative `alpha'(z) = 1/(conj(b) z + conj(a))^2`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() < DEGENERATE_DENOM {
            return Err(Error::SingularMap { z });
        }
        Ok(Complex64::new(1.0, 0.0) / (den * den))
    }

    pub fn second_derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() < DEGENERATE_DENOM {
            return Err(Error::SingularMap { z });
        }
        Ok(-2.0 * self.b.conj() / (den * den * den))
    }

    pub fn third_derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.b.conj() * z + self.a.conj();
        if den.norm() < DEGENERATE_DENOM {
            return Err(Error::SingularMap { z });
        }
        Ok(6.0 * self.b.conj() * self.b.conj() / (den * den * den * den))
    }

    /// Composition `self ∘ other` (matrix product, then renormalize).
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        Self::new(a, b).expect("products of PSU(1,1) elements stay in the group")
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Distance of the coefficients to +/- identity (PSU quotient).
    pub fn distance_to_identity(&self) -> f64 {
        let (a, b) = if self.a.re >= 0.0 {
            (self.a, self.b)
        } else {
            (-self.a, -self.b)
        };
        ((a - Complex64::new(1.0, 0.0)).norm_sqr() + b.norm_sqr()).sqrt()
    }
}

/// PSU(1,1) action on a point of the closed disk.
pub fn apply_moebius(m: &MoebiusDisk, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-9 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    m.apply(z)
}

/// Complex derivative of the action at `z`.
pub fn moebius_derivative(m: &MoebiusDisk, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-9 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    m.derivative(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example_a1() -> MoebiusDisk {
        // alpha(z) = (z + a0)/(1 + conj(a0) z), a0 = e^{i pi/3}/3
        let a0 = Complex64::from_polar(1.0 / 3.0, std::f64::consts::FRAC_PI_3);
        MoebiusDisk::new(Complex64::new(1.0, 0.0), a0).unwrap()
    }

    #[test]
    fn identity_fixes_points() {
        let z = Complex64::new(0.3, 0.1);
        let got = apply_moebius(&MoebiusDisk::identity(), z).unwrap();
        assert_abs_diff_eq!(got.re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(got.im, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn normalized_coefficients_of_translation() {
        let m = example_a1();
        let (a, b) = m.coefficients();
        // normalization of (1, a0): divide by sqrt(1 - 1/9) = 2*sqrt(2)/3
        assert_abs_diff_eq!(a.norm(), 3.0 / (2.0 * 2.0f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(b.norm(), 1.0 / (2.0 * 2.0f64.sqrt()), epsilon = 1e-15);
        // sends 0 to a0
        let img = m.apply(Complex64::new(0.0, 0.0)).unwrap();
        let a0 = Complex64::from_polar(1.0 / 3.0, std::f64::consts::FRAC_PI_3);
        assert_abs_diff_eq!((img - a0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_round_trip_on_grid() {
        let m = example_a1().compose(&MoebiusDisk::rotation(0.7));
        let minv = m.inverse();
        for j in 0..8 {
            for k in 0..8 {
                let z = Complex64::new(-0.84 + 0.24 * j as f64, -0.84 + 0.24 * k as f64);
                if z.norm() >= 1.0 {
                    continue;
                }
                let back = minv.apply(m.apply(z).unwrap()).unwrap();
                assert!((back - z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_real_translation() {
        // alpha(z) = (z + a0)/(1 + a0 z), a0 = 1/3 real, z = 1 -> (1 - a0^2)/(1 + a0)^2 = 1/2
        let m = MoebiusDisk::new(Complex64::new(1.0, 0.0), Complex64::new(1.0 / 3.0, 0.0)).unwrap();
        let d = moebius_derivative(&m, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cross_ratio_identity_on_circle() {
        // alpha'(z) alpha'(w) = (alpha(z) - alpha(w))^2 / (z - w)^2
        let m = example_a1().compose(&MoebiusDisk::rotation(1.1));
        for i in 0..100 {
            let z = Complex64::from_polar(1.0, 0.061 + 0.8 * i as f64);
            let w = Complex64::from_polar(1.0, 2.3 + 1.7 * i as f64);
            if (z - w).norm() < 1e-3 {
                continue;
            }
            let lhs = m.derivative(z).unwrap() * m.derivative(w).unwrap();
            let num = m.apply(z).unwrap() - m.apply(w).unwrap();
            let rhs = (num * num) / ((z - w) * (z - w));
            assert!((lhs - rhs).norm() < 1e-12, "residual {}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn composition_matches_matrix_product() {
        let m1 = example_a1();
        let m2 = MoebiusDisk::new(Complex64::new(1.2, 0.1), Complex64::new(0.3, -0.4)).unwrap();
        let z = Complex64::new(0.25, -0.55);
        let via_compose = m1.compose(&m2).apply(z).unwrap();
        let via_apply = m1.apply(m2.apply(z).unwrap()).unwrap();
        assert!((via_compose - via_apply).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_psu_pairs() {
        assert!(MoebiusDisk::new(Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)).is_err());
        // a matrix that is not a disk automorphism fails the pattern check
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert!(MoebiusDisk::from_matrix([[one, one], [z, one]]).is_err());
    }

    #[test]
    fn extreme_translations_are_caught_at_construction() {
        // |a|^2 - |b|^2 = 1 stops being representable long before the boundary
        // denominator |a| - |b| = e^{-s} could reach the singular guard, so
        // degenerate elements are rejected before they can act
        let far = 35.0f64;
        assert!(matches!(
            MoebiusDisk::new(
                Complex64::new(far.cosh(), 0.0),
                Complex64::new(far.sinh(), 0.0)
            ),
            Err(Error::NotPsu { .. })
        ));
        // a large but representable element acts fine at its worst point
        let s = 15.0f64;
        let m = MoebiusDisk::new(
            Complex64::new(s.cosh(), 0.0),
            Complex64::new(s.sinh(), 0.0),
        )
        .unwrap();
        let worst = Complex64::new(-1.0, 0.0);
        assert!((apply_moebius(&m, worst).unwrap() - worst).norm() < 1e-6);
    }

    #[test]
    fn from_matrix_recovers_disk_automorphism() {
        let m = example_a1().compose(&MoebiusDisk::rotation(-0.9));
        let (a, b) = m.coefficients();
        let s = Complex64::new(-1.7, 2.2); // arbitrary projective scale
        let mat = [[s * a, s * b], [s * b.conj(), s * a.conj()]];
        let rec = MoebiusDisk::from_matrix(mat).unwrap();
        let z = Complex64::new(0.4, 0.3);
        assert!((rec.apply(z).unwrap() - m.apply(z).unwrap()).norm() < 1e-12);
    }
}
