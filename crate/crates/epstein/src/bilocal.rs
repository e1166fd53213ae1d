//! Bi-local observables and renormalized lengths of decorated geodesics.
//!
//! The metric `phi_* d theta` decorates each boundary point `phi(u)` with the
//! horocycle of density `1/|phi'(u)|`. The renormalized length `RL(u, v)` is the
//! signed distance between the two horocycles along the geodesic
//! `(phi(u), phi(v))`, negative when the horoballs overlap, and satisfies
//! `O(phi; u, v)^2 = exp(-RL)/4` for the observable
//! `O = |phi'(u) phi'(v)|^{1/2} / |phi(u) - phi(v)|`.

use crate::diffeo::CircleDiffeo;
use crate::disk::{HalfPlaneAt, Horocycle};
use crate::{Error, Result};
use num_complex::Complex64;

/// Boundary point decorated by the derivative modulus of the map that sent it
/// there. The associated horocycle has density `1/decoration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedPoint {
    pub position: Complex64,
    pub decoration: f64,
}

impl DecoratedPoint {
    pub fn new(position: Complex64, decoration: f64) -> Result<Self> {
        if (position.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(
                "decorated points live on the unit circle".into(),
            ));
        }
        if !(decoration > 0.0) {
            return Err(Error::Precondition("decoration must be positive".into()));
        }
        Ok(Self {
            position: position / position.norm(),
            decoration,
        })
    }

    pub fn horocycle(&self) -> Horocycle {
        Horocycle::new(self.position, 1.0 / self.decoration)
            .expect("validated at construction")
    }

    /// The decorated image of boundary angle `theta` under `phi`.
    pub fn image_of(phi: &CircleDiffeo, theta: f64) -> Result<Self> {
        let j = phi.jet(theta);
        if !(j.d1 > 0.0) {
            return Err(Error::NotADiffeo { theta, d1: j.d1 });
        }
        Self::new(Complex64::from_polar(1.0, j.value), j.d1)
    }
}

fn angle_of(u: Complex64) -> Result<f64> {
    if (u.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "|u| = {} is not on the unit circle",
            u.norm()
        )));
    }
    Ok(u.arg())
}

/// Signed distance between two decorated horocycles along the geodesic joining
/// their base points (positive when the horoballs are disjoint).
///
/// Computed in the half-plane chart that sends `p` to infinity: the horocycle at
/// `p` becomes a horizontal line of height `Y`, the one at `q` a tangent circle of
/// Euclidean diameter `D` based at the image of `q`, and the signed gap along the
/// vertical geodesic is `log(Y/D)`.
pub fn renormalized_length_decorated(p: &DecoratedPoint, q: &DecoratedPoint) -> Result<f64> {
    if (p.position - q.position).norm() < 1e-12 {
        return Err(Error::Precondition(
            "renormalized length needs distinct base points".into(),
        ));
    }
    let chart = HalfPlaneAt::new(p.position)?;
    let y = chart.horocycle_height(&p.horocycle());
    let x0 = chart.map(q.position).re;
    let w = chart.map(q.horocycle().inner_point());
    let dy = w.im;
    let dx = w.re - x0;
    let d = (dx * dx + dy * dy) / dy;
    Ok((y / d).ln())
}

/// Geometric renormalized length for `phi` between boundary points `u != v`.
pub fn renormalized_length(phi: &CircleDiffeo, u: Complex64, v: Complex64) -> Result<f64> {
    let p = DecoratedPoint::image_of(phi, angle_of(u)?)?;
    let q = DecoratedPoint::image_of(phi, angle_of(v)?)?;
    renormalized_length_decorated(&p, &q)
}

/// Closed form `-log(4 |phi'(u) phi'(v)| / |phi(u) - phi(v)|^2)`.
pub fn renormalized_length_closed_form(
    phi: &CircleDiffeo,
    u: Complex64,
    v: Complex64,
) -> Result<f64> {
    let o = bilocal(phi, u, v)?;
    Ok(-(4.0 * o * o).ln())
}

/// The bi-local observable `|phi'(u) phi'(v)|^{1/2} / |phi(u) - phi(v)|`.
pub fn bilocal(phi: &CircleDiffeo, u: Complex64, v: Complex64) -> Result<f64> {
    let x = angle_of(u)?;
    let y = angle_of(v)?;
    let p = DecoratedPoint::image_of(phi, x)?;
    let q = DecoratedPoint::image_of(phi, y)?;
    bilocal_decorated(&p, &q)
}

/// Observable of a pair of decorated points: `sqrt(d_u d_v) / |p_u - p_v|`.
/// Reconstruction works entirely through this generalized form.
pub fn bilocal_decorated(p: &DecoratedPoint, q: &DecoratedPoint) -> Result<f64> {
    let gap = (p.position - q.position).norm();
    if gap < 1e-12 {
        return Err(Error::Precondition(
            "bi-local observable needs distinct points".into(),
        ));
    }
    Ok((p.decoration * q.decoration).sqrt() / gap)
}

/// Samples of the kinematic-space density `O(phi; u, v)^2` on a uniform grid of
/// ordered pairs; row `i`, column `j` holds the value at
/// `(u, v) = (2 pi i / n, 2 pi j / n)`, `NaN` on the diagonal.
pub fn kinematic_density_grid(phi: &CircleDiffeo, n: usize) -> Result<Vec<Vec<f64>>> {
    let points: Vec<DecoratedPoint> = (0..n)
        .map(|i| DecoratedPoint::image_of(phi, std::f64::consts::TAU * i as f64 / n as f64))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        f64::NAN
                    } else {
                        let o = bilocal_decorated(&points[i], &points[j]).unwrap();
                        o * o
                    }
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_antipodal_pair() {
        let id = CircleDiffeo::identity();
        let u = Complex64::new(1.0, 0.0);
        let v = Complex64::new(-1.0, 0.0);
        assert_abs_diff_eq!(renormalized_length(&id, u, v).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bilocal(&id, u, v).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn identity_quarter_turn_pair() {
        let id = CircleDiffeo::identity();
        let u = Complex64::new(-1.0, 0.0);
        let v = Complex64::new(0.0, 1.0);
        // |u - v|^2 = 2: RL = -log 2, O = 1/sqrt(2)
        assert_abs_diff_eq!(
            renormalized_length(&id, u, v).unwrap(),
            -(2.0f64).ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bilocal(&id, u, v).unwrap(),
            1.0 / 2.0f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn observable_squares_to_quarter_exponential() {
        let phi = CircleDiffeo::lift_sine(0.5).unwrap();
        for k in 0..50 {
            let u = Complex64::from_polar(1.0, 0.13 + 0.7 * k as f64);
            let v = Complex64::from_polar(1.0, 2.9 + 1.3 * k as f64);
            if (u - v).norm() < 1e-3 {
                continue;
            }
            let o = bilocal(&phi, u, v).unwrap();
            let rl = renormalized_length(&phi, u, v).unwrap();
            assert_abs_diff_eq!(o * o, 0.25 * (-rl).exp(), epsilon = 1e-10);
            // symmetric in the endpoints
            assert_abs_diff_eq!(o, bilocal(&phi, v, u).unwrap(), epsilon = 1e-14);
            assert_abs_diff_eq!(
                rl,
                renormalized_length(&phi, v, u).unwrap(),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn geometric_matches_closed_form() {
        let phi = CircleDiffeo::lift_sine(0.5).unwrap();
        let mut worst = 0.0f64;
        for k in 0..200 {
            let u = Complex64::from_polar(1.0, 0.05 + 0.59 * k as f64);
            let v = Complex64::from_polar(1.0, 1.7 + 1.11 * k as f64);
            if (u - v).norm() < 1e-2 {
                continue;
            }
            let a = renormalized_length(&phi, u, v).unwrap();
            let b = renormalized_length_closed_form(&phi, u, v).unwrap();
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-9, "max discrepancy {worst}");
    }

    #[test]
    fn moebius_renormalized_length_matches_identity() {
        // cross-ratio identity: RL_alpha = RL_Id for Möbius maps
        let m = crate::moebius::MoebiusDisk::new(
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0 / 3.0, 0.7),
        )
        .unwrap();
        let alpha = CircleDiffeo::from_moebius(&m);
        let id = CircleDiffeo::identity();
        for k in 0..50 {
            let u = Complex64::from_polar(1.0, 0.21 + 0.83 * k as f64);
            let v = Complex64::from_polar(1.0, 1.9 + 1.21 * k as f64);
            if (u - v).norm() < 1e-2 {
                continue;
            }
            let a = renormalized_length(&alpha, u, v).unwrap();
            let b = renormalized_length(&id, u, v).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn left_moebius_invariance() {
        let phi = CircleDiffeo::lift_sine(0.5).unwrap();
        let m = crate::moebius::MoebiusDisk::new(
            Complex64::new(1.1, 0.2),
            Complex64::new(0.3, -0.25),
        )
        .unwrap();
        let composed = phi.compose_moebius_left(&m).unwrap();
        for k in 0..100 {
            let u = Complex64::from_polar(1.0, 0.37 + 0.67 * k as f64);
            let v = Complex64::from_polar(1.0, 2.1 + 1.43 * k as f64);
            if (u - v).norm() < 1e-2 {
                continue;
            }
            let a = bilocal(&phi, u, v).unwrap();
            let b = bilocal(&composed, u, v).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let id = CircleDiffeo::identity();
        let u = Complex64::new(0.0, 1.0);
        assert!(bilocal(&id, u, u).is_err());
        assert!(renormalized_length(&id, u, u).is_err());
    }
}
