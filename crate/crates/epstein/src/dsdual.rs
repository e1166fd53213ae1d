//! The dual curve in de Sitter space.
//!
//! The outward normal field of an Epstein curve, read as a curve of `q = +1`
//! points in R^{1,2}, is spacelike; its length and total curvature swap roles with
//! the primal curve's: `d ell_perp = <N', -T> = k d ell` and
//! `k_perp d ell_perp = <-x', -T> = d ell`, where `T` completes `(x, T, N)` to a
//! positively oriented Lorentz frame. Hence the action equals the dual total
//! curvature and `2 pi` minus the dual length.

use crate::curve::EpsteinCurve;
use crate::minkowski::{dual_frame, tangent_to_minkowski, to_minkowski, MinkowskiVec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct DualQuantities {
    /// Signed de Sitter length of the dual curve (`= int k d ell`).
    pub l_perp: f64,
    /// Total geodesic curvature of the dual curve (`= int d ell = I_Sch`).
    pub k_perp: f64,
}

/// Length and total curvature of the dual curve, from the primal densities.
pub fn dual_quantities(curve: &EpsteinCurve) -> Result<DualQuantities> {
    if curve.degree() != 1 {
        return Err(Error::Precondition(
            "the dual-curve identities are stated for degree-1 curves".into(),
        ));
    }
    Ok(DualQuantities {
        l_perp: curve.total_curvature(),
        k_perp: curve.total_length(),
    })
}

/// The dual curve as explicit de Sitter points (the pushed-forward normals).
pub fn dual_curve_points(curve: &EpsteinCurve) -> Result<Vec<MinkowskiVec>> {
    curve
        .frames()
        .iter()
        .map(|f| tangent_to_minkowski(f.point, f.normal))
        .collect()
}

/// Largest deviation, over the grid, of the finite-difference dual densities from
/// the primal ones: recomputes `<N', -T>` and `<-x', -T>` with five-point
/// derivative stencils in Minkowski coordinates and compares against the
/// `k d ell` and `d ell` densities.
pub fn dual_density_residual(curve: &EpsteinCurve) -> Result<f64> {
    if curve.degree() != 1 {
        return Err(Error::Precondition(
            "density comparison is implemented for degree-1 curves".into(),
        ));
    }
    let frames = curve.frames();
    let n = frames.len();
    if n < 8 {
        return Err(Error::Precondition(
            "need at least 8 nodes for finite differences".into(),
        ));
    }
    let h = curve.grid().weight();
    let xs: Vec<MinkowskiVec> = frames.iter().map(|f| to_minkowski(f.point)).collect::<Result<_>>()?;
    let ns: Vec<MinkowskiVec> = frames
        .iter()
        .map(|f| tangent_to_minkowski(f.point, f.normal))
        .collect::<Result<_>>()?;
    let stencil = |v: &[MinkowskiVec], i: usize| -> MinkowskiVec {
        let g = |k: isize| {
            let idx = ((i as isize + k).rem_euclid(n as isize)) as usize;
            &v[idx]
        };
        // five-point fourth-order first derivative
        MinkowskiVec::new(
            (8.0 * (g(1).x0 - g(-1).x0) - (g(2).x0 - g(-2).x0)) / (12.0 * h),
            (8.0 * (g(1).x1 - g(-1).x1) - (g(2).x1 - g(-2).x1)) / (12.0 * h),
            (8.0 * (g(1).x2 - g(-1).x2) - (g(2).x2 - g(-2).x2)) / (12.0 * h),
        )
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = dual_frame(&xs[i], &ns[i])?;
        let nd = stencil(&ns, i);
        let xd = stencil(&xs, i);
        let dl_perp = nd.dot(&t.scale(-1.0));
        let kdl_perp = xd.scale(-1.0).dot(&t.scale(-1.0));
        worst = worst.max((dl_perp - frames[i].kdl_density).abs());
        worst = worst.max((kdl_perp - frames[i].dl_density).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::CircleDiffeo;
    use crate::grid::QuadratureGrid;
    use crate::metric::BoundaryMetric;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn round_metric_dual_is_an_equator() {
        let g = QuadratureGrid::new(512).unwrap();
        let curve = EpsteinCurve::from_metric(&BoundaryMetric::round(), &g);
        let d = dual_quantities(&curve).unwrap();
        assert_abs_diff_eq!(d.l_perp, TAU, epsilon = 1e-10);
        assert_abs_diff_eq!(d.k_perp, 0.0, epsilon = 1e-12);
        // the dual points sweep the x0 = 0 equator of the de Sitter quadric
        for p in dual_curve_points(&curve).unwrap() {
            assert_abs_diff_eq!(p.q(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.x0, 0.0, epsilon = 1e-12);
        }
        assert!(dual_density_residual(&curve).unwrap() < 1e-8);
    }

    #[test]
    fn sine_half_dual_identities() {
        const SINE_HALF_ACTION: f64 = 0.09330699317991842;
        let g = QuadratureGrid::new(2048).unwrap();
        let h = BoundaryMetric::pushforward(&CircleDiffeo::lift_sine(0.5).unwrap()).unwrap();
        let curve = EpsteinCurve::from_metric(&h, &g);
        let d = dual_quantities(&curve).unwrap();
        assert_abs_diff_eq!(d.k_perp, SINE_HALF_ACTION, epsilon = 1e-8);
        assert_abs_diff_eq!(TAU - d.l_perp, SINE_HALF_ACTION, epsilon = 1e-8);
        assert!(dual_density_residual(&curve).unwrap() < 1e-5);
    }
}
