//! Property-based invariants: group laws, naturality, realness of the Schwarzian
//! integrand, route agreement, and error-propagation bounds.

use epstein::bilocal::bilocal;
use epstein::curve::{epstein_frame, EpsteinCurve};
use epstein::diffeo::CircleDiffeo;
use epstein::disk::{circulation_polyline, hyperbolic_distance, Horocycle};
use epstein::farey::farey_triangulation;
use epstein::grid::QuadratureGrid;
use epstein::metric::{diffeo_from_metric, BoundaryMetric};
use epstein::moebius::{apply_moebius, MoebiusDisk};
use epstein::reconstruct::{
    reconstruct_from_observables, roundtrip_mismatch, ObservableBundle,
};
use epstein::routes::{registry, ActionSubject, TIGHT_ROUTES};
use epstein::schwarzian::{action_direct, action_kstar_form};
use epstein::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn arb_disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.93f64, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn arb_moebius() -> impl Strategy<Value = MoebiusDisk> {
    (arb_disk_point(), 0.0..TAU).prop_map(|(c, psi)| {
        MoebiusDisk::translation_to(c)
            .unwrap()
            .compose(&MoebiusDisk::rotation(psi))
    })
}

/// Small Fourier lifts that are guaranteed diffeomorphisms.
fn arb_diffeo() -> impl Strategy<Value = CircleDiffeo> {
    proptest::collection::vec((-0.2..0.2f64, -0.2..0.2f64), 1..3).prop_map(|amps| {
        let terms: Vec<(u32, f64, f64)> = amps
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as u32;
                (k, a / (k as f64 * amps.len() as f64), b / (k as f64 * amps.len() as f64))
            })
            .collect();
        CircleDiffeo::from_lift_fourier(&terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moebius_group_laws(m1 in arb_moebius(), m2 in arb_moebius(), z in arb_disk_point()) {
        let composed = apply_moebius(&m1.compose(&m2), z).unwrap();
        let stepped = apply_moebius(&m1, apply_moebius(&m2, z).unwrap()).unwrap();
        prop_assert!((composed - stepped).norm() < 1e-12);
        let back = apply_moebius(&m1.inverse(), apply_moebius(&m1, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn moebius_preserves_disk_and_circle(m in arb_moebius(), t in 0.0..TAU) {
        let on_circle = apply_moebius(&m, Complex64::from_polar(1.0, t)).unwrap();
        prop_assert!((on_circle.norm() - 1.0).abs() < 1e-12);
        let inside = apply_moebius(&m, Complex64::from_polar(0.7, t)).unwrap();
        prop_assert!(inside.norm() < 1.0);
    }

    #[test]
    fn distance_is_isometry_invariant(m in arb_moebius(), p in arb_disk_point(), q in arb_disk_point()) {
        let d0 = hyperbolic_distance(p, q).unwrap();
        let d1 = hyperbolic_distance(
            apply_moebius(&m, p).unwrap(),
            apply_moebius(&m, q).unwrap(),
        ).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-10);
    }

    #[test]
    fn horocycle_naturality(m in arb_moebius(), t in 0.0..TAU, d in 0.2..4.0f64) {
        // map 32 sample points and compare against the predicted image horocycle
        let h = Horocycle::new(Complex64::from_polar(1.0, t), d).unwrap();
        let img = h.mapped(&m).unwrap();
        let c = h.euclidean_center();
        let r = h.euclidean_radius();
        for j in 0..32 {
            let z = c + Complex64::from_polar(r, TAU * j as f64 / 32.0);
            let w = m.apply(z).unwrap();
            prop_assert!(img.circle_distance(w).abs() < 1e-9);
        }
    }

    #[test]
    fn schwarzian_integrand_is_real_by_the_complex_route(phi in arb_diffeo(), t in 0.0..TAU) {
        // complex-division oracle: phi'(z) = F' e^{i(F - t)} etc.; the quantity
        // z^2 S[phi](z) must be real and match the lift formula
        let j = phi.jet(t);
        let i = Complex64::new(0.0, 1.0);
        let e = Complex64::from_polar(1.0, j.value - t);
        let a = j.d1 * e; // phi'(z)
        let da = (Complex64::new(j.d2, 0.0) + i * j.d1 * (j.d1 - 1.0)) * e;
        let b = da * Complex64::from_polar(1.0, -t) / i; // phi''(z)
        let dda = (Complex64::new(j.d3, 0.0)
            + i * Complex64::new(j.d2, 0.0) * (2.0 * j.d1 - 1.0)
            + i * (j.d1 - 1.0) * (Complex64::new(j.d2, 0.0) + i * j.d1 * (j.d1 - 1.0)))
            * e;
        let db = (dda - i * da) * Complex64::from_polar(1.0, -t) / i;
        let c = db * Complex64::from_polar(1.0, -t) / i; // phi'''(z)
        let s = c / a - 1.5 * (b / a) * (b / a);
        let z2s = Complex64::from_polar(1.0, 2.0 * t) * s;
        prop_assert!(z2s.im.abs() < 1e-10, "imaginary part {}", z2s.im);
        let lift_value = epstein::schwarzian::schwarzian_on_circle(&phi, t).unwrap();
        prop_assert!((z2s.re - lift_value).abs() < 1e-9);
    }

    #[test]
    fn action_is_left_moebius_invariant(phi in arb_diffeo(), m in arb_moebius()) {
        let grid = QuadratureGrid::new(1024).unwrap();
        let base = action_direct(&phi, &grid).unwrap();
        let moved = action_direct(&phi.compose_moebius_left(&m).unwrap(), &grid).unwrap();
        prop_assert!((base - moved).abs() < 1e-8, "invariance broken: {} vs {}", base, moved);
    }

    #[test]
    fn routes_agree_on_random_diffeos(phi in arb_diffeo()) {
        let grid = QuadratureGrid::new(1024).unwrap();
        let subject = ActionSubject::from_diffeo(&phi).unwrap();
        let mut tight = Vec::new();
        for route in registry() {
            if TIGHT_ROUTES.contains(&route.name()) {
                tight.push(route.compute(&subject, &grid).unwrap());
            }
        }
        for w in tight.windows(2) {
            prop_assert!((w[0] - w[1]).abs() < 1e-8);
        }
        prop_assert!(tight[0] >= -1e-8, "non-negativity violated: {}", tight[0]);
    }

    #[test]
    fn bilocal_is_left_invariant(phi in arb_diffeo(), m in arb_moebius(), x in 0.0..TAU, y in 0.0..TAU) {
        let u = Complex64::from_polar(1.0, x);
        let v = Complex64::from_polar(1.0, y);
        prop_assume!((u - v).norm() > 1e-2);
        let a = bilocal(&phi, u, v).unwrap();
        let b = bilocal(&phi.compose_moebius_left(&m).unwrap(), u, v).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn kstar_action_respects_lower_bound(phi in arb_diffeo()) {
        // total curvature at infinity of a diffeomorphism metric is >= -2 pi,
        // i.e. the kstar-form action is non-negative
        let grid = QuadratureGrid::new(1024).unwrap();
        let h = BoundaryMetric::pushforward(&phi).unwrap();
        let v = action_kstar_form(&h, &grid).unwrap();
        prop_assert!(v >= -1e-8);
    }
}

#[test]
fn nfold_action_is_invariant_under_the_conjugated_moebius_group() {
    // post-composing with an element of the n-conjugated group leaves the
    // n-fold action unchanged (and the covers differ by a plain Möbius map)
    let grid = QuadratureGrid::new(2048).unwrap();
    let phi = CircleDiffeo::lift_sine(0.5).unwrap();
    for n in [2u32, 3] {
        let base = epstein::schwarzian::action_nfold(&phi, n, &grid).unwrap();
        for k in 0..4 {
            let m = MoebiusDisk::translation_to(Complex64::from_polar(
                0.1 + 0.08 * k as f64,
                1.3 * k as f64,
            ))
            .unwrap()
            .compose(&MoebiusDisk::rotation(0.7 * k as f64));
            let b = CircleDiffeo::moebius_n(&m, n).unwrap();
            // sanity: B(z)^n = m(z^n) on the circle
            for j in 0..16 {
                let t = TAU * j as f64 / 16.0;
                let lhs = Complex64::from_polar(1.0, n as f64 * b.lift(t));
                let rhs = m
                    .apply(Complex64::from_polar(1.0, n as f64 * t))
                    .unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
            let moved = b.compose(&phi).unwrap();
            let v = epstein::schwarzian::action_nfold(&moved, n, &grid).unwrap();
            assert!(
                (v - base).abs() < 1e-8,
                "n = {n}, k = {k}: {v} vs {base}"
            );
        }
    }
}

#[test]
fn epstein_naturality_under_moebius() {
    // alpha(Ep_h(z)) = Ep_{alpha_* h}(alpha(z)) pointwise
    let phi = CircleDiffeo::lift_sine(0.5).unwrap();
    let h = BoundaryMetric::pushforward(&phi).unwrap();
    let m = MoebiusDisk::translation_to(Complex64::new(0.22, -0.31))
        .unwrap()
        .compose(&MoebiusDisk::rotation(0.8));
    let alpha = CircleDiffeo::from_moebius(&m);
    let pushed = BoundaryMetric::pushforward_of(&h, &alpha).unwrap();
    let mut worst = 0.0f64;
    for j in 0..256 {
        let t = TAU * j as f64 / 256.0;
        let lhs = m.apply(epstein_frame(&h, t).point).unwrap();
        let rhs = epstein_frame(&pushed, alpha.lift(t)).point;
        worst = worst.max((lhs - rhs).norm());
    }
    assert!(worst < 1e-8, "naturality error {worst}");
}

#[test]
fn moebius_pushforward_collapses_envelope() {
    let m = MoebiusDisk::translation_to(Complex64::new(0.3, 0.2)).unwrap();
    let alpha = CircleDiffeo::from_moebius(&m);
    let h = BoundaryMetric::pushforward(&alpha).unwrap();
    assert!((h.total_length() - TAU).abs() < 1e-12, "length must be 2 pi exactly");
    let target = m.apply(Complex64::new(0.0, 0.0)).unwrap();
    for j in 0..128 {
        let f = epstein_frame(&h, TAU * j as f64 / 128.0);
        assert!(
            (f.point - target).norm() < 1e-9,
            "envelope did not collapse: {} vs {}",
            f.point,
            target
        );
    }
}

#[test]
fn envelope_tangency_direction() {
    // the finite-difference tangent of the frame polyline aligns with
    // -i * normal * sign(dl) away from non-immersed points
    let phi = CircleDiffeo::lift_sine(0.5).unwrap();
    let h = BoundaryMetric::pushforward(&phi).unwrap();
    let grid = QuadratureGrid::new(4096).unwrap();
    let curve = EpsteinCurve::from_metric(&h, &grid);
    let frames = curve.frames();
    let n = frames.len();
    let mut checked = 0;
    for i in 0..n {
        let f = &frames[i];
        if f.dl_density.abs() < 0.1 {
            continue;
        }
        let fd = (frames[(i + 1) % n].point - frames[(i + n - 1) % n].point) / (2.0 * grid.weight());
        let predicted = -Complex64::new(0.0, 1.0) * f.normal * f.dl_density.signum();
        let cross = fd.re * predicted.im - fd.im * predicted.re;
        let sine = cross / (fd.norm() * predicted.norm());
        let dot = fd.re * predicted.re + fd.im * predicted.im;
        assert!(dot > 0.0, "tangent direction flipped at node {i}");
        assert!(sine.abs() < 1e-4, "tangent misaligned by sin = {sine}");
        checked += 1;
    }
    assert!(checked > n / 2);
}

#[test]
fn metric_diffeo_round_trip_on_random_fourier_metrics() {
    let mut worst = 0.0f64;
    for seed in 0..10u32 {
        let s = seed as f64;
        let h = BoundaryMetric::from_fourier_coeffs(&[
            (1, 0.08 * (s * 0.7).sin(), 0.06 * (s * 1.3).cos()),
            (2, 0.05 * (s * 2.1).cos(), 0.04 * (s * 0.4).sin()),
        ])
        .rescaled_to_round_length();
        let phi = diffeo_from_metric(&h, 0.0).unwrap();
        let back = BoundaryMetric::pushforward(&phi).unwrap();
        for j in 0..1024 {
            let t = TAU * j as f64 / 1024.0;
            worst = worst.max((back.sigma(t) - h.sigma(t)).abs());
        }
    }
    assert!(worst < 1e-8, "round-trip sup error {worst}");
}

#[test]
fn geodesic_polygon_area_matches_angle_defect() {
    // eta-circulation around a geodesic triangle with vertices near the boundary
    // (a truncated ideal triangle) equals the angle defect pi - (A + B + C), with
    // the angles supplied by the hyperbolic law of cosines as the oracle
    let verts = [
        Complex64::from_polar(0.95, 0.3),
        Complex64::from_polar(0.93, 2.4),
        Complex64::from_polar(0.96, 4.4),
    ];
    let side = |i: usize, j: usize| hyperbolic_distance(verts[i], verts[j]).unwrap();
    let (a, b, c) = (side(1, 2), side(2, 0), side(0, 1));
    let angle = |opp: f64, s1: f64, s2: f64| {
        ((s1.cosh() * s2.cosh() - opp.cosh()) / (s1.sinh() * s2.sinh())).acos()
    };
    let defect =
        std::f64::consts::PI - angle(a, b, c) - angle(b, c, a) - angle(c, a, b);

    // geodesic arc between interior points: circle orthogonal to S^1
    let geodesic_center = |p: Complex64, q: Complex64| -> Complex64 {
        let det = p.re * q.im - p.im * q.re;
        assert!(det.abs() > 1e-12, "diameter case not needed here");
        let rp = (1.0 + p.norm_sqr()) / 2.0;
        let rq = (1.0 + q.norm_sqr()) / 2.0;
        Complex64::new((rp * q.im - rq * p.im) / det, (p.re * rq - q.re * rp) / det)
    };
    let segments = 40_000usize;
    let mut pts = Vec::with_capacity(3 * segments);
    for i in 0..3 {
        let p = verts[i];
        let q = verts[(i + 1) % 3];
        let cc = geodesic_center(p, q);
        let r = (p - cc).norm();
        let a0 = (p - cc).arg();
        let sweep = ((q - cc) / (p - cc)).arg();
        for k in 0..segments {
            let s = a0 + sweep * k as f64 / segments as f64;
            pts.push(cc + Complex64::from_polar(r, s));
        }
    }
    let area = circulation_polyline(&pts).unwrap();
    assert!(
        (area - defect).abs() < 1e-6,
        "area {area} vs angle defect {defect}"
    );
}

#[test]
fn reconstruction_error_stays_bounded_with_depth() {
    // error propagation along the dual tree stays within 10x the per-edge
    // tolerance through depth 8
    let phi = CircleDiffeo::lift_sine(0.5).unwrap();
    for depth in [3u32, 5, 8] {
        let tri = farey_triangulation(depth).unwrap();
        let obs = ObservableBundle::of_diffeo(&tri, &phi).unwrap();
        let rec = reconstruct_from_observables(&tri, &obs).unwrap();
        let mismatch = roundtrip_mismatch(&tri, &rec, &phi).unwrap();
        assert!(
            mismatch < 1e-7,
            "depth {depth}: mismatch {mismatch} grew past the tolerance budget"
        );
    }
}
