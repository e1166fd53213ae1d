//! Reconstruction of a circle map from bi-local observables on an ideal
//! triangulation.
//!
//! The walk fixes the root edge `(u0, v0)`: the reconstructed map sends `u0` and
//! `v0` to themselves and the decoration at `u0` is `1`; the root observable then
//! determines the decoration at `v0`. For each triangle `(u, v, w)` with known
//! decorated images, the two observables `b = O(v, w)`, `c = O(w, u)` determine
//! `p_w` through the decoration-free ratio
//! `|p_u - p_w|^2 / |p_v - p_w|^2 = b^2 d_u / (c^2 d_v)`, which is strictly
//! monotone along the admissible arc, and then `d_w = b^2 |p_v - p_w|^2 / d_v`.
//!
//! On a finite triangulation the edge data are free coordinates: the walk
//! reproduces *any* positive bundle exactly (the recomputation residual is zero in
//! exact arithmetic), so corrupted bundles cannot be detected from the tree data
//! alone. They are exposed by the round-trip comparison against a reference map,
//! which [`roundtrip_mismatch`] packages: a bundle is rejected when the
//! reconstructed vertices disagree with the normalized reference beyond tolerance.

use crate::bilocal::{bilocal_decorated, DecoratedPoint};
use crate::diffeo::CircleDiffeo;
use crate::farey::IdealTriangulation;
use crate::moebius::MoebiusDisk;
use crate::{Error, Result};
use num_complex::Complex64;

/// Observable values aligned with `tri.edges()`.
#[derive(Debug, Clone)]
pub struct ObservableBundle {
    pub values: Vec<f64>,
}

impl ObservableBundle {
    /// Evaluates the observables of `phi` on every edge of the triangulation.
    pub fn of_diffeo(tri: &IdealTriangulation, phi: &CircleDiffeo) -> Result<Self> {
        let points: Vec<DecoratedPoint> = (0..tri.vertices().len())
            .map(|i| DecoratedPoint::image_of(phi, tri.angle(i)))
            .collect::<Result<_>>()?;
        let values = tri
            .edges()
            .iter()
            .map(|&(a, b)| bilocal_decorated(&points[a], &points[b]))
            .collect::<Result<_>>()?;
        Ok(Self { values })
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Decorated image per vertex index.
    pub points: Vec<DecoratedPoint>,
    /// Largest deviation of recomputed edge observables from the input bundle.
    pub max_edge_residual: f64,
}

const EDGE_RESIDUAL_TOL: f64 = 1e-8;

/// Runs the tree walk. Fails when an observable is non-positive, when the arc
/// bracket cannot hold a root, or when the final recomputation residual exceeds
/// the per-edge tolerance.
pub fn reconstruct_from_observables(
    tri: &IdealTriangulation,
    obs: &ObservableBundle,
) -> Result<Reconstruction> {
    if obs.values.len() != tri.edges().len() {
        return Err(Error::Precondition(format!(
            "bundle carries {} values for {} edges",
            obs.values.len(),
            tri.edges().len()
        )));
    }
    if let Some(bad) = obs.values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Precondition(format!(
            "observables must be positive and finite, got {bad}"
        )));
    }
    let (iu0, iv0) = tri.root_edge();
    let n = tri.vertices().len();
    let mut points: Vec<Option<DecoratedPoint>> = vec![None; n];
    let p_u0 = Complex64::from_polar(1.0, tri.angle(iu0));
    let p_v0 = Complex64::from_polar(1.0, tri.angle(iv0));
    points[iu0] = Some(DecoratedPoint::new(p_u0, 1.0)?);
    let o_root = obs.get(0);
    points[iv0] = Some(DecoratedPoint::new(
        p_v0,
        o_root * o_root * (p_u0 - p_v0).norm_sqr(),
    )?);

    for step in tri.walk() {
        let pu = points[step.u].expect("walk visits parents first");
        let pv = points[step.v].expect("walk visits parents first");
        let b = obs.get(step.edge_vw);
        let c = obs.get(step.edge_wu);
        let rho = b * b * pu.decoration / (c * c * pv.decoration);
        let pw = solve_on_arc(pu.position, pv.position, rho).map_err(|reason| {
            Error::InconsistentObservables {
                u: tri.angle(step.u),
                v: tri.angle(step.v),
                w: tri.angle(step.w),
                reason,
            }
        })?;
        let dw = b * b * (pv.position - pw).norm_sqr() / pv.decoration;
        points[step.w] = Some(DecoratedPoint::new(pw, dw)?);
    }

    let points: Vec<DecoratedPoint> = points
        .into_iter()
        .map(|p| p.expect("walk covers every vertex"))
        .collect();

    let mut max_edge_residual = 0.0f64;
    let mut worst_edge = 0usize;
    for (e, &(a, b)) in tri.edges().iter().enumerate() {
        let rec = bilocal_decorated(&points[a], &points[b])?;
        let res = (rec - obs.get(e)).abs() / obs.get(e).max(1.0);
        if res > max_edge_residual {
            max_edge_residual = res;
            worst_edge = e;
        }
    }
    if max_edge_residual > EDGE_RESIDUAL_TOL {
        let (a, b) = tri.edges()[worst_edge];
        return Err(Error::InconsistentObservables {
            u: tri.angle(a),
            v: tri.angle(b),
            w: f64::NAN,
            reason: format!("recomputed observable off by {max_edge_residual:.3e}"),
        });
    }
    Ok(Reconstruction {
        points,
        max_edge_residual,
    })
}

/// Solves `|p - p_u|^2 / |p - p_v|^2 = rho` for `p` on the open ccw arc from
/// `p_v` to `p_u`; the ratio is strictly monotone there, so a bracketed bisection
/// with a small guard margin either finds the root or reports it as out of range.
fn solve_on_arc(p_u: Complex64, p_v: Complex64, rho: f64) -> std::result::Result<Complex64, String> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(format!("ratio {rho} out of range"));
    }
    let tau = std::f64::consts::TAU;
    let av = p_v.arg();
    let span = (p_u.arg() - av).rem_euclid(tau);
    let ratio = |psi: f64| {
        let p = Complex64::from_polar(1.0, psi);
        (p - p_u).norm_sqr() / (p - p_v).norm_sqr()
    };
    let guard = 1e-12 * span;
    let mut lo = av + guard;
    let mut hi = av + span - guard;
    // ratio decreases from +inf at p_v to 0 at p_u
    if ratio(lo) < rho || ratio(hi) > rho {
        return Err(format!("no root on the admissible arc for ratio {rho:.6e}"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Complex64::from_polar(1.0, 0.5 * (lo + hi)))
}

/// The Möbius map `alpha` with `alpha(phi(u0)) = u0`, `alpha(phi(v0)) = v0`, and
/// `|alpha'(phi(u0))| = 1/|phi'(u0)|`: the normalization the reconstruction walk
/// imposes, so `alpha ∘ phi` is directly comparable with its output.
pub fn normalizing_moebius(
    phi: &CircleDiffeo,
    theta_u0: f64,
    theta_v0: f64,
) -> Result<MoebiusDisk> {
    let ju = phi.jet(theta_u0);
    let p = Complex64::from_polar(1.0, ju.value);
    let q = Complex64::from_polar(1.0, phi.lift(theta_v0));
    let x = Complex64::from_polar(1.0, theta_u0);
    let y = Complex64::from_polar(1.0, theta_v0);
    moebius_with_boundary_data(p, q, x, y, 1.0 / ju.d1)
}

/// The element of PSU(1,1) sending the boundary pair `(p, q)` to `(x, y)` with
/// prescribed derivative modulus at `p`. Assembled in half-plane coordinates:
/// conjugating the dilation `w -> lambda w` by charts sending each pair to
/// `(0, infinity)` realizes the one-parameter family, and the derivative condition
/// picks `lambda`.
pub fn moebius_with_boundary_data(
    p: Complex64,
    q: Complex64,
    x: Complex64,
    y: Complex64,
    deriv_at_p: f64,
) -> Result<MoebiusDisk> {
    type Mat = [[Complex64; 2]; 2];
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // Cayley: z -> i(1 - z)/(1 + z), disk to upper half-plane, -1 -> infinity
    let cayley: Mat = [[-i, i], [one, one]];
    let mul = |a: &Mat, b: &Mat| -> Mat {
        [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ]
    };
    let inv = |a: &Mat| -> Mat {
        [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
    };
    let apply = |a: &Mat, z: Complex64| -> Complex64 {
        (a[0][0] * z + a[0][1]) / (a[1][0] * z + a[1][1])
    };
    let deriv = |a: &Mat, z: Complex64| -> Complex64 {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let den = a[1][0] * z + a[1][1];
        det / (den * den)
    };
    // real boundary images; -1 maps to infinity
    let hat = |z: Complex64| -> Option<f64> {
        if (z + one).norm() < 1e-12 {
            None
        } else {
            Some(apply(&cayley, z).re)
        }
    };
    // real Möbius sending (a, b) to (0, infinity), positive determinant
    let to_zero_inf = |a: Option<f64>, b: Option<f64>| -> Result<Mat> {
        let re = |x: f64| Complex64::new(x, 0.0);
        match (a, b) {
            (Some(a), Some(b)) => {
                let s = if a > b { 1.0 } else { -1.0 };
                Ok([[re(s), re(-s * a)], [one, re(-b)]])
            }
            (Some(a), None) => Ok([[one, re(-a)], [zero, one]]),
            (None, Some(b)) => Ok([[zero, -one], [one, re(-b)]]),
            (None, None) => Err(Error::Precondition("coincident boundary pair".into())),
        }
    };
    let m1 = mul(&to_zero_inf(hat(p), hat(q))?, &cayley);
    let m2 = mul(&to_zero_inf(hat(x), hat(y))?, &cayley);
    let d1 = deriv(&m1, p).norm();
    let d2 = deriv(&m2, x).norm();
    if !(d1.is_finite() && d2.is_finite()) || d1 == 0.0 {
        return Err(Error::Precondition(
            "boundary data degenerate for normalization".into(),
        ));
    }
    let lambda = deriv_at_p * d2 / d1;
    let dil: Mat = [[Complex64::new(lambda, 0.0), zero], [zero, one]];
    let total = mul(&inv(&m2), &mul(&dil, &m1));
    MoebiusDisk::from_matrix(total)
}

/// Largest distance between the reconstructed vertex images and `alpha ∘ phi`
/// (with `alpha` the normalizer from [`normalizing_moebius`]); the fault detector
/// for corrupted bundles.
pub fn roundtrip_mismatch(
    tri: &IdealTriangulation,
    rec: &Reconstruction,
    phi: &CircleDiffeo,
) -> Result<f64> {
    let (iu0, iv0) = tri.root_edge();
    let alpha = normalizing_moebius(phi, tri.angle(iu0), tri.angle(iv0))?;
    let mut worst = 0.0f64;
    for (i, dp) in rec.points.iter().enumerate() {
        let img = alpha.apply(phi.point(tri.angle(i)))?;
        worst = worst.max((img - dp.position).norm());
    }
    Ok(worst)
}
