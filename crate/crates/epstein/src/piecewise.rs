//! C^1 piecewise-Möbius circle diffeomorphisms and their completed Epstein curves.
//!
//! The Schwarzian of such a map is a sum of point masses `lambda_j delta_{z_j}` at
//! the breakpoints, with `lambda_j` the jump of `F''/F'` across `z_j`; the action
//! is `sum lambda_j`. The envelope degenerates to the points `a_j = alpha_j(0)`;
//! joining consecutive points by arcs of the breakpoint horocycles completes it to
//! a closed curve whose signed length is again the action and whose enclosed area
//! is its negative.
//!
//! The transition between adjacent pieces at breakpoint `z` with jump `lambda` is
//! the parabolic-type element fixing `z` with unit derivative,
//! `alpha(w) = ((2i + lambda) z w - z^2 lambda) / (lambda w + (2i - lambda) z)`,
//! i.e. the normalized pair `a = 1 - i lambda/2`, `b = i z lambda / 2`. A
//! requested jump vector generally violates the constraint that the transitions
//! compose to the identity around the circle; the builder restores closure by
//! damped Newton on the last three jumps.

use crate::diffeo::{CircleDiffeo, DiffeoRepr, LiftJet};
use crate::disk::{circulation_polyline, HalfPlaneAt, Horocycle};
use crate::moebius::MoebiusDisk;
use crate::spectral::FourierInterpolant;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

const C0_TOL: f64 = 1e-10;
const C1_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PiecewiseMoebiusDiffeo {
    /// Breakpoint angles, strictly increasing, spanning one period.
    breakpoints: Vec<f64>,
    /// `pieces[j]` acts on the arc from `breakpoints[j]` to the next breakpoint.
    pieces: Vec<MoebiusDisk>,
    /// Per-piece lift offsets making the lift continuous.
    offsets: Vec<f64>,
}

fn moebius_lift_raw(m: &MoebiusDisk, theta: f64) -> f64 {
    let (a, b) = m.coefficients();
    let z = Complex64::from_polar(1.0, theta);
    theta + 2.0 * a.arg() + 2.0 * (Complex64::new(1.0, 0.0) + (b / a) * z.conj()).arg()
}

fn moebius_lift_jet(m: &MoebiusDisk, theta: f64, offset: f64) -> LiftJet {
    let z = Complex64::from_polar(1.0, theta);
    let phi = m.apply(z).expect("regular on the circle");
    let (d1, d2, d3) = crate::diffeo::lift_derivatives_from_complex(
        z,
        phi,
        m.derivative(z).expect("regular"),
        m.second_derivative(z).expect("regular"),
        m.third_derivative(z).expect("regular"),
    );
    LiftJet {
        value: moebius_lift_raw(m, theta) + offset,
        d1,
        d2,
        d3,
    }
}

impl PiecewiseMoebiusDiffeo {
    /// Validates and assembles a piecewise map from explicit pieces.
    ///
    /// Checks: strictly increasing breakpoints, continuity and matching angular
    /// derivative moduli at every breakpoint, and total winding one.
    pub fn from_pieces(breakpoints: Vec<f64>, pieces: Vec<MoebiusDisk>) -> Result<Self> {
        let n = breakpoints.len();
        if n < 3 || pieces.len() != n {
            return Err(Error::Precondition(format!(
                "need >= 3 breakpoints and matching pieces, got {} and {}",
                n,
                pieces.len()
            )));
        }
        for j in 1..n {
            if breakpoints[j] <= breakpoints[j - 1] {
                return Err(Error::Precondition(
                    "breakpoints must be strictly increasing (counterclockwise)".into(),
                ));
            }
        }
        if breakpoints[n - 1] - breakpoints[0] >= TAU {
            return Err(Error::Precondition(
                "breakpoints must span less than one full period".into(),
            ));
        }
        for j in 0..n {
            let jn = (j + 1) % n;
            let theta = breakpoints[0].max(breakpoints[jn]) + if jn == 0 { TAU } else { 0.0 };
            let z = Complex64::from_polar(1.0, theta);
            let left = pieces[j].apply(z)?;
            let right = pieces[jn].apply(z)?;
            if (left - right).norm() > C0_TOL {
                return Err(Error::NotPiecewiseDiffeo(format!(
                    "discontinuity {:.3e} at breakpoint {}",
                    (left - right).norm(),
                    jn
                )));
            }
            let dl = pieces[j].derivative(z)?.norm();
            let dr = pieces[jn].derivative(z)?.norm();
            if (dl - dr).abs() > C1_TOL * dl.max(1.0) {
                return Err(Error::NotPiecewiseDiffeo(format!(
                    "derivative mismatch {:.3e} at breakpoint {}",
                    (dl - dr).abs(),
                    jn
                )));
            }
        }
        // continuity offsets and winding
        let mut offsets = vec![0.0; n];
        for j in 1..n {
            let t = breakpoints[j];
            offsets[j] =
                offsets[j - 1] + moebius_lift_raw(&pieces[j - 1], t) - moebius_lift_raw(&pieces[j], t);
        }
        let t_close = breakpoints[0] + TAU;
        let winding = (offsets[n - 1] + moebius_lift_raw(&pieces[n - 1], t_close)
            - (offsets[0] + moebius_lift_raw(&pieces[0], breakpoints[0])))
            / TAU;
        if (winding - 1.0).abs() > 1e-8 {
            return Err(Error::NotPiecewiseDiffeo(format!(
                "total winding {winding} (expected 1)"
            )));
        }
        Ok(Self {
            breakpoints,
            pieces,
            offsets,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[MoebiusDisk] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the piece whose arc contains angle `theta`.
    fn piece_index(&self, theta: f64) -> usize {
        let n = self.breakpoints.len();
        let t0 = self.breakpoints[0];
        let t = (theta - t0).rem_euclid(TAU) + t0;
        match self
            .breakpoints
            .partition_point(|&b| b <= t + 1e-15)
        {
            0 => n - 1,
            k => k - 1,
        }
    }

    /// Lift jet at `theta` (one-sided at breakpoints: the piece whose closed arc
    /// starts there wins).
    pub fn jet(&self, theta: f64) -> LiftJet {
        let t0 = self.breakpoints[0];
        let shift = (theta - t0).div_euclid(TAU);
        let t = theta - TAU * shift;
        let j = self.piece_index(t);
        let mut jet = moebius_lift_jet(&self.pieces[j], t, self.offsets[j]);
        jet.value += TAU * shift;
        jet
    }

    pub fn lift(&self, theta: f64) -> f64 {
        self.jet(theta).value
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.lift(theta))
    }

    /// Image of breakpoint `j` and the horocycle decorating it (metric density
    /// `1/|phi'(z_j)|`).
    pub fn breakpoint_horocycle(&self, j: usize) -> Result<Horocycle> {
        let z = Complex64::from_polar(1.0, self.breakpoints[j]);
        let p = self.pieces[j].apply(z)?;
        let d = self.pieces[j].derivative(z)?.norm();
        Horocycle::new(p, 1.0 / d)
    }

    /// Jump of `F''/F'` across breakpoint `j` (real; the imaginary residue of the
    /// complex formula is returned for diagnostics).
    pub fn jump(&self, j: usize) -> Result<(f64, f64)> {
        let n = self.len();
        let z = Complex64::from_polar(1.0, self.breakpoints[j]);
        let before = &self.pieces[(j + n - 1) % n];
        let after = &self.pieces[j];
        let i = Complex64::new(0.0, 1.0);
        let v = i * z
            * (before.second_derivative(z)? / before.derivative(z)?
                - after.second_derivative(z)? / after.derivative(z)?);
        Ok((v.re, v.im))
    }

    /// All jumps and their sum: the distributional Schwarzian action.
    pub fn distributional_action(&self) -> Result<(Vec<f64>, f64)> {
        let mut jumps = Vec::with_capacity(self.len());
        for j in 0..self.len() {
            let (re, im) = self.jump(j)?;
            if im.abs() > 1e-10 {
                return Err(Error::Precondition(format!(
                    "jump at breakpoint {j} has imaginary residue {im:.3e}"
                )));
            }
            jumps.push(re);
        }
        let total = jumps.iter().sum();
        Ok((jumps, total))
    }

    /// Gaussian mollification of the lift at width `eps`, sampled on `n` nodes:
    /// a smooth diffeomorphism whose action approaches the distributional one.
    pub fn mollified(&self, eps: f64, n: usize) -> Result<CircleDiffeo> {
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                self.lift(t) - t
            })
            .collect();
        let interp = FourierInterpolant::from_samples(&samples)?.gaussian_mollified(eps);
        CircleDiffeo::from_jet_fn(
            move |t| {
                let j = interp.eval_jet::<4>(t);
                LiftJet {
                    value: t + j[0],
                    d1: 1.0 + j[1],
                    d2: j[2],
                    d3: j[3],
                }
            },
            DiffeoRepr::AnalyticClosure,
        )
    }
}

/// The transition element at breakpoint `z` with Schwarzian jump `lambda`: fixes
/// `z`, has unit derivative there, and second-derivative jump `lambda`.
pub fn transition_map(z: Complex64, lambda: f64) -> MoebiusDisk {
    let i = Complex64::new(0.0, 1.0);
    MoebiusDisk::new(
        Complex64::new(1.0, -lambda / 2.0),
        i * z * lambda / 2.0,
    )
    .expect("transition pairs satisfy |a|^2 - |b|^2 = 1")
}

fn closure_residual(breaks: &[f64], lambdas: &[f64]) -> [f64; 3] {
    let n = breaks.len();
    let mut m = transition_map(Complex64::from_polar(1.0, breaks[1 % n]), lambdas[1 % n]);
    for j in 2..n {
        m = m.compose(&transition_map(
            Complex64::from_polar(1.0, breaks[j]),
            lambdas[j],
        ));
    }
    m = m.compose(&transition_map(Complex64::from_polar(1.0, breaks[0]), lambdas[0]));
    let (mut a, mut b) = m.coefficients();
    if a.re < 0.0 {
        a = -a;
        b = -b;
    }
    [a.im, b.re, b.im]
}

fn residual_norm(r: &[f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

const CLOSURE_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 100;

/// Builds a piecewise-Möbius diffeomorphism with the requested Schwarzian jumps.
///
/// The first `n - 3` requested jumps are honored exactly; the last three are
/// adjusted (from the requested values as initial guesses) so the transition maps
/// close up. Returns the map together with the jump vector actually realized; a
/// request whose closure repair lands outside the diffeomorphism class is
/// rejected by the winding check.
pub fn build_piecewise(
    breakpoints: &[f64],
    requested_jumps: &[f64],
    seed: Option<MoebiusDisk>,
) -> Result<(PiecewiseMoebiusDiffeo, Vec<f64>)> {
    let n = breakpoints.len();
    if n < 3 {
        return Err(Error::Precondition("need at least three breakpoints".into()));
    }
    if requested_jumps.len() != n {
        return Err(Error::Precondition(format!(
            "need one jump per breakpoint: {} != {n}",
            requested_jumps.len()
        )));
    }
    let mut lambdas = requested_jumps.to_vec();
    let mut res = closure_residual(breakpoints, &lambdas);
    let mut iters = 0;
    while residual_norm(&res) > CLOSURE_TOL {
        if iters >= MAX_NEWTON {
            return Err(Error::ClosureFailure {
                iters,
                residual: residual_norm(&res),
            });
        }
        iters += 1;
        // finite-difference Jacobian in the last three jumps
        let h = 1e-7;
        let mut jac = [[0.0f64; 3]; 3];
        for c in 0..3 {
            let mut bumped = lambdas.clone();
            bumped[n - 3 + c] += h;
            let r = closure_residual(breakpoints, &bumped);
            for (row, j) in jac.iter_mut().enumerate() {
                j[c] = (r[row] - res[row]) / h;
            }
        }
        let step = solve3(&jac, &[-res[0], -res[1], -res[2]]).ok_or(Error::ClosureFailure {
            iters,
            residual: residual_norm(&res),
        })?;
        // backtracking damping
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = lambdas.clone();
            for c in 0..3 {
                trial[n - 3 + c] += t * step[c];
            }
            let r = closure_residual(breakpoints, &trial);
            if residual_norm(&r) < residual_norm(&res) {
                lambdas = trial;
                res = r;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::ClosureFailure {
                iters,
                residual: residual_norm(&res),
            });
        }
    }
    let seed = seed.unwrap_or_else(MoebiusDisk::identity);
    let mut pieces = Vec::with_capacity(n);
    pieces.push(seed);
    for j in 1..n {
        let m = transition_map(Complex64::from_polar(1.0, breakpoints[j]), lambdas[j]);
        let prev = pieces[j - 1];
        pieces.push(prev.compose(&m));
    }
    let pm = PiecewiseMoebiusDiffeo::from_pieces(breakpoints.to_vec(), pieces)?;
    Ok((pm, lambdas))
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut x = [0.0; 3];
    for k in 0..3 {
        let mut m = *a;
        for row in 0..3 {
            m[row][k] = b[row];
        }
        let dk = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        x[k] = dk * inv_det;
    }
    Some(x)
}

/// One horocyclic arc of the completed curve.
#[derive(Debug, Clone)]
pub struct HoroArc {
    pub horocycle: Horocycle,
    /// Arc endpoints (`a_{j-1}` to `a_j`); the arc avoids the tangency base point.
    pub from: Complex64,
    pub to: Complex64,
    /// Signed length (positive when traversed clockwise, i.e. against the outward
    /// normal orientation); equals the Schwarzian jump at this breakpoint.
    pub signed_length: f64,
}

impl HoroArc {
    /// Start angle around the Euclidean center and signed sweep (the arc always
    /// avoids the tangency base point).
    fn sweep(&self) -> (f64, f64) {
        let c = self.horocycle.euclidean_center();
        let ph_from = (self.from - c).arg();
        let ph_to = (self.to - c).arg();
        let ph_base = (self.horocycle.base - c).arg();
        let ccw = (ph_to - ph_from).rem_euclid(TAU);
        let base_off = (ph_base - ph_from).rem_euclid(TAU);
        let sweep = if base_off < ccw { ccw - TAU } else { ccw };
        (ph_from, sweep)
    }

    /// Uniform samples along the arc, oriented `from -> to`.
    pub fn samples(&self, count: usize) -> Vec<Complex64> {
        let c = self.horocycle.euclidean_center();
        let r = self.horocycle.euclidean_radius();
        let (ph_from, sweep) = self.sweep();
        (0..count)
            .map(|k| {
                let s = ph_from + sweep * k as f64 / (count.max(2) - 1) as f64;
                c + Complex64::from_polar(r, s)
            })
            .collect()
    }

    /// Exact (Euclidean) tangent directions at the endpoints, in travel order.
    pub fn endpoint_tangents(&self) -> (Complex64, Complex64) {
        let c = self.horocycle.euclidean_center();
        let (_, sweep) = self.sweep();
        let i = Complex64::new(0.0, 1.0);
        let sign = if sweep >= 0.0 { 1.0 } else { -1.0 };
        (i * (self.from - c) * sign, i * (self.to - c) * sign)
    }
}

#[derive(Debug, Clone)]
pub struct CompletedEpstein {
    /// Envelope points `a_j = alpha_j(0)`, one per piece.
    pub points: Vec<Complex64>,
    /// `arcs[j]` runs along the horocycle at breakpoint `j` from `a_{j-1}` to `a_j`.
    pub arcs: Vec<HoroArc>,
    /// Exterior angles between consecutive outward normals at the `a_j`.
    pub betas: Vec<f64>,
}

impl CompletedEpstein {
    pub fn total_signed_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.signed_length).sum()
    }

    /// Gauss-Bonnet area: the arcs carry `k = -1` against the outward normal and
    /// the angles sum to `2 pi`, so `A = -sum lambda_j`.
    pub fn signed_area_gauss_bonnet(&self) -> f64 {
        -self.total_signed_length()
    }

    /// Independent area oracle: circulation of the area primitive along the
    /// densely sampled concatenation of the horocyclic arcs.
    pub fn signed_area_eta(&self, samples_per_arc: usize) -> Result<f64> {
        let mut pts = Vec::with_capacity(self.arcs.len() * samples_per_arc);
        for arc in &self.arcs {
            let s = arc.samples(samples_per_arc);
            // drop each arc's final sample; the next arc starts there
            pts.extend_from_slice(&s[..s.len() - 1]);
        }
        circulation_polyline(&pts)
    }

    pub fn beta_sum(&self) -> f64 {
        self.betas.iter().sum()
    }
}

/// The completed Epstein curve of a piecewise-Möbius map.
pub fn completed_epstein(pm: &PiecewiseMoebiusDiffeo) -> Result<CompletedEpstein> {
    let n = pm.len();
    let origin = Complex64::new(0.0, 0.0);
    let points: Vec<Complex64> = pm
        .pieces()
        .iter()
        .map(|m| m.apply(origin))
        .collect::<Result<_>>()?;
    let mut arcs = Vec::with_capacity(n);
    for j in 0..n {
        let horocycle = pm.breakpoint_horocycle(j)?;
        let from = points[(j + n - 1) % n];
        let to = points[j];
        // signed length in the half-plane chart at the base point: the horocycle
        // maps to a horizontal line of height Y and length is -(dx)/Y
        let chart = HalfPlaneAt::new(horocycle.base)?;
        let y = chart.horocycle_height(&horocycle);
        let signed_length = -(chart.map(to).re - chart.map(from).re) / y;
        arcs.push(HoroArc {
            horocycle,
            from,
            to,
            signed_length,
        });
    }
    let mut betas = Vec::with_capacity(n);
    for j in 0..n {
        let jn = (j + 1) % n;
        let at = points[j];
        let n_j = at - arcs[j].horocycle.euclidean_center();
        let n_jn = at - arcs[jn].horocycle.euclidean_center();
        betas.push((n_jn.arg() - n_j.arg()).rem_euclid(TAU));
    }
    Ok(CompletedEpstein {
        points,
        arcs,
        betas,
    })
}

/// One arc of the scaled completed curve.
#[derive(Debug, Clone)]
pub enum ScaledArc {
    /// Geodesic-flow image of `a_j`: a circle of hyperbolic radius `t` about it,
    /// traced over the piece's breakpoint arc.
    Circular {
        piece: usize,
        samples: Vec<Complex64>,
        signed_length: f64,
        total_curvature: f64,
        start_tangent: Complex64,
        end_tangent: Complex64,
    },
    /// The flowed horocyclic joint at breakpoint `j`.
    Horocyclic {
        breakpoint: usize,
        arc: HoroArc,
        signed_length: f64,
        total_curvature: f64,
    },
}

impl ScaledArc {
    pub fn samples(&self, per_arc: usize) -> Vec<Complex64> {
        match self {
            ScaledArc::Circular { samples, .. } => samples.clone(),
            ScaledArc::Horocyclic { arc, .. } => arc.samples(per_arc),
        }
    }

    /// Exact tangent directions at the endpoints, in travel order.
    pub fn endpoint_tangents(&self) -> (Complex64, Complex64) {
        match self {
            ScaledArc::Circular {
                start_tangent,
                end_tangent,
                ..
            } => (*start_tangent, *end_tangent),
            ScaledArc::Horocyclic { arc, .. } => arc.endpoint_tangents(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScaledCompletedEpstein {
    pub t: f64,
    pub arcs: Vec<ScaledArc>,
}

impl ScaledCompletedEpstein {
    pub fn total_signed_length(&self) -> f64 {
        self.arcs
            .iter()
            .map(|a| match a {
                ScaledArc::Circular { signed_length, .. } => *signed_length,
                ScaledArc::Horocyclic { signed_length, .. } => *signed_length,
            })
            .sum()
    }

    pub fn total_curvature(&self) -> f64 {
        self.arcs
            .iter()
            .map(|a| match a {
                ScaledArc::Circular { total_curvature, .. } => *total_curvature,
                ScaledArc::Horocyclic { total_curvature, .. } => *total_curvature,
            })
            .sum()
    }

    /// `A_t = int k dl - 2 pi` over both arc families (all junctions are tangent,
    /// so no corner terms enter).
    pub fn signed_area_gauss_bonnet(&self) -> f64 {
        self.total_curvature() - TAU
    }

    pub fn signed_area_eta(&self, samples_per_arc: usize) -> Result<f64> {
        let mut pts = Vec::new();
        for arc in &self.arcs {
            let s = arc.samples(samples_per_arc);
            pts.extend_from_slice(&s[..s.len() - 1]);
        }
        circulation_polyline(&pts)
    }

    /// Largest `|sin(angle)|` between incoming and outgoing tangent lines over all
    /// junctions (exact endpoint tangents); tangency makes every interior angle
    /// `0` or `2 pi`.
    pub fn max_junction_angle_defect(&self) -> f64 {
        let n = self.arcs.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            let (_, t_in) = self.arcs[j].endpoint_tangents();
            let (t_out, _) = self.arcs[(j + 1) % n].endpoint_tangents();
            let cross = t_in.re * t_out.im - t_in.im * t_out.re;
            let denom = t_in.norm() * t_out.norm();
            if denom > 0.0 {
                worst = worst.max((cross / denom).abs());
            }
        }
        worst
    }
}

/// The completed curve of `e^t h` for `t > 0`: circular arcs (flow images of the
/// `a_j`) joined by flowed horocyclic arcs, all junctions tangent.
pub fn scaled_completed_epstein(
    pm: &PiecewiseMoebiusDiffeo,
    t: f64,
    samples_per_arc: usize,
) -> Result<ScaledCompletedEpstein> {
    if !(t > 0.0) {
        return Err(Error::Precondition("scaled completion needs t > 0".into()));
    }
    let base = completed_epstein(pm)?;
    let n = pm.len();
    let rho = (t / 2.0).tanh();
    let breaks = pm.breakpoints();
    let mut arcs = Vec::with_capacity(2 * n);
    for j in 0..n {
        // flowed horocyclic arc at breakpoint j, between the two circular arcs
        let h0 = &base.arcs[j].horocycle;
        let horocycle = h0.flowed(t);
        let zj = Complex64::from_polar(1.0, breaks[j]);
        let before = &pm.pieces()[(j + n - 1) % n];
        let after = &pm.pieces()[j];
        let from = before.apply(zj * rho)?;
        let to = after.apply(zj * rho)?;
        let lam = base.arcs[j].signed_length * (-t).exp();
        arcs.push(ScaledArc::Horocyclic {
            breakpoint: j,
            arc: HoroArc {
                horocycle,
                from,
                to,
                signed_length: lam,
            },
            signed_length: lam,
            total_curvature: -lam,
        });
        // circular arc of piece j over [theta_j, theta_{j+1}]
        let t_start = breaks[j];
        let t_end = if j + 1 < n { breaks[j + 1] } else { breaks[0] + TAU };
        let samples: Vec<Complex64> = (0..samples_per_arc)
            .map(|k| {
                let th = t_start + (t_end - t_start) * k as f64 / (samples_per_arc - 1) as f64;
                pm.pieces()[j].apply(rho * Complex64::from_polar(1.0, th))
            })
            .collect::<Result<_>>()?;
        let span = t_end - t_start;
        let tangent_at = |th: f64| -> Result<Complex64> {
            let w = rho * Complex64::from_polar(1.0, th);
            Ok(pm.pieces()[j].derivative(w)? * w * Complex64::new(0.0, 1.0))
        };
        arcs.push(ScaledArc::Circular {
            piece: j,
            samples,
            signed_length: t.sinh() * span,
            total_curvature: t.cosh() * span,
            start_tangent: tangent_at(t_start)?,
            end_tangent: tangent_at(t_end)?,
        });
    }
    Ok(ScaledCompletedEpstein { t, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square_breaks() -> Vec<f64> {
        vec![0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0]
    }

    fn four_break_example() -> (PiecewiseMoebiusDiffeo, Vec<f64>) {
        build_piecewise(&square_breaks(), &[0.8, -0.8, 0.8, -0.8], None).unwrap()
    }

    #[test]
    fn zero_jumps_give_a_single_moebius() {
        let seed = MoebiusDisk::new(Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.1)).unwrap();
        let (pm, lambdas) = build_piecewise(&square_breaks(), &[0.0; 4], Some(seed)).unwrap();
        for l in &lambdas {
            assert_abs_diff_eq!(*l, 0.0, epsilon = 1e-12);
        }
        for p in pm.pieces() {
            let (a, b) = p.coefficients();
            let (sa, sb) = seed.coefficients();
            assert!((a - sa).norm().min((a + sa).norm()) < 1e-12);
            assert!((b - sb).norm().min((b + sb).norm()) < 1e-12);
        }
        let (jumps, total) = pm.distributional_action().unwrap();
        for j in jumps {
            assert_abs_diff_eq!(j, 0.0, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-10);
        // completed curve degenerates to the point alpha(0) with zero length/area
        let ce = completed_epstein(&pm).unwrap();
        let a0 = seed.apply(Complex64::new(0.0, 0.0)).unwrap();
        for p in &ce.points {
            assert!((p - a0).norm() < 1e-12);
        }
        assert_abs_diff_eq!(ce.total_signed_length(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ce.signed_area_gauss_bonnet(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn four_break_jumps_round_trip() {
        let (pm, lambdas) = four_break_example();
        // the requested first jump is honored; solved entries reported back
        assert_abs_diff_eq!(lambdas[0], 0.8, epsilon = 1e-12);
        let (jumps, total) = pm.distributional_action().unwrap();
        for (j, l) in jumps.iter().zip(&lambdas) {
            assert_abs_diff_eq!(*j, *l, epsilon = 1e-9);
        }
        assert!(total >= -1e-8, "action must stay non-negative, got {total}");
    }

    #[test]
    fn geometric_arc_lengths_match_jumps() {
        let (pm, lambdas) = four_break_example();
        let ce = completed_epstein(&pm).unwrap();
        for (arc, lam) in ce.arcs.iter().zip(&lambdas) {
            assert_abs_diff_eq!(arc.signed_length, *lam, epsilon = 1e-9);
            // endpoints sit on the horocycle
            assert!(arc.horocycle.circle_distance(arc.from).abs() < 1e-10);
            assert!(arc.horocycle.circle_distance(arc.to).abs() < 1e-10);
        }
    }

    #[test]
    fn betas_sum_to_tau_and_match_arc_measures() {
        let (pm, _) = four_break_example();
        let ce = completed_epstein(&pm).unwrap();
        assert_abs_diff_eq!(ce.beta_sum(), TAU, epsilon = 1e-12);
        for b in &ce.betas {
            assert_abs_diff_eq!(*b, TAU / 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn area_routes_agree() {
        let (pm, lambdas) = four_break_example();
        let ce = completed_epstein(&pm).unwrap();
        let total: f64 = lambdas.iter().sum();
        assert_abs_diff_eq!(ce.signed_area_gauss_bonnet(), -total, epsilon = 1e-12);
        let eta = ce.signed_area_eta(4096).unwrap();
        assert_abs_diff_eq!(eta, -total, epsilon = 1e-5);
    }

    #[test]
    fn lift_is_continuous_and_monotone() {
        let (pm, _) = four_break_example();
        let mut prev = pm.lift(0.0);
        for k in 1..=4096 {
            let t = TAU * k as f64 / 4096.0;
            let v = pm.lift(t);
            assert!(v > prev - 1e-12, "lift not monotone at {t}");
            assert!((v - prev) < 0.02, "lift jumps at {t}: {} -> {}", prev, v);
            prev = v;
        }
        assert_abs_diff_eq!(pm.lift(TAU) - pm.lift(0.0), TAU, epsilon = 1e-10);
    }

    #[test]
    fn asymmetric_five_break_example() {
        // unequal arcs: the exterior angles must reproduce the individual arc
        // measures, not just sum to 2 pi
        let breaks = vec![0.3, 1.1, 2.8, 4.0, 5.5];
        let (pm, lambdas) =
            build_piecewise(&breaks, &[0.5, -0.3, 0.4, 0.0, 0.0], None).unwrap();
        assert_abs_diff_eq!(lambdas[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(lambdas[1], -0.3, epsilon = 1e-12);
        let (jumps, total) = pm.distributional_action().unwrap();
        assert!(total >= -1e-8);
        let ce = completed_epstein(&pm).unwrap();
        for (arc, lam) in ce.arcs.iter().zip(&jumps) {
            assert_abs_diff_eq!(arc.signed_length, *lam, epsilon = 1e-9);
        }
        for (j, beta) in ce.betas.iter().enumerate() {
            let jn = (j + 1) % breaks.len();
            let arc_measure = (breaks[jn] - breaks[j]).rem_euclid(TAU);
            assert_abs_diff_eq!(*beta, arc_measure, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(ce.beta_sum(), TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(ce.total_signed_length(), total, epsilon = 1e-10);
        let eta = ce.signed_area_eta(4096).unwrap();
        assert_abs_diff_eq!(eta, -total, epsilon = 1e-5);
    }

    #[test]
    fn impossible_jump_requests_are_repaired_or_rejected() {
        // requesting all jumps -1 (sum -4) violates non-negativity; the builder
        // must either fail or return a repaired vector with non-negative sum
        match build_piecewise(&square_breaks(), &[-1.0; 4], None) {
            Err(Error::ClosureFailure { .. }) | Err(Error::NotPiecewiseDiffeo(_)) => {}
            Ok((_, lambdas)) => {
                let sum: f64 = lambdas.iter().sum();
                assert!(sum >= -1e-8, "realized action must be non-negative");
                let deviation: f64 = lambdas.iter().map(|l| (l + 1.0).abs()).sum();
                assert!(
                    deviation > 0.1,
                    "the all-negative request cannot be honored as stated"
                );
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn scaled_curve_structure() {
        let (pm, lambdas) = four_break_example();
        let t = 0.6;
        let sc = scaled_completed_epstein(&pm, t, 256).unwrap();
        assert_eq!(sc.arcs.len(), 2 * pm.len());
        assert!(sc.max_junction_angle_defect() < 1e-6);
        let total: f64 = lambdas.iter().sum();
        // closed forms for the scaled totals
        assert_abs_diff_eq!(
            sc.total_signed_length(),
            TAU * t.sinh() + (-t).exp() * total,
            epsilon = 1e-10
        );
        let a_t = sc.signed_area_gauss_bonnet();
        assert_abs_diff_eq!(
            a_t,
            TAU * (t.cosh() - 1.0) - (-t).exp() * total,
            epsilon = 1e-10
        );
        let eta = sc.signed_area_eta(2048).unwrap();
        assert_abs_diff_eq!(eta, a_t, epsilon = 1e-5);
    }

    #[test]
    fn scaled_completion_needs_positive_t() {
        let (pm, _) = four_break_example();
        assert!(scaled_completed_epstein(&pm, 0.0, 64).is_err());
        assert!(scaled_completed_epstein(&pm, -1.0, 64).is_err());
    }

    #[test]
    fn single_moebius_scaled_curve_is_a_circle() {
        let seed = MoebiusDisk::new(Complex64::new(1.0, 0.0), Complex64::new(0.25, -0.1)).unwrap();
        let (pm, _) = build_piecewise(&square_breaks(), &[0.0; 4], Some(seed)).unwrap();
        let t = 1.0;
        let sc = scaled_completed_epstein(&pm, t, 128).unwrap();
        // every sample is at hyperbolic distance t from alpha(0)
        let center = seed.apply(Complex64::new(0.0, 0.0)).unwrap();
        for arc in &sc.arcs {
            for p in arc.samples(32) {
                let d = crate::disk::hyperbolic_distance(center, p).unwrap();
                assert_abs_diff_eq!(d, t, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn mollified_action_approaches_distributional_action() {
        let (pm, lambdas) = four_break_example();
        let total: f64 = lambdas.iter().sum();
        let grid = crate::grid::QuadratureGrid::new(32768).unwrap();
        let mut prev_gap = f64::INFINITY;
        for eps in [3e-2, 1e-2, 3e-3, 1e-3] {
            let smooth = pm.mollified(eps, 32768).unwrap();
            let action = crate::schwarzian::action_direct(&smooth, &grid).unwrap();
            let gap = (action - total).abs();
            assert!(gap < prev_gap + 1e-12, "mollification not improving at {eps}");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3, "action gap at eps = 1e-3: {prev_gap}");
    }

    #[test]
    fn from_pieces_rejects_broken_data() {
        let breaks = square_breaks();
        let (pm, _) = four_break_example();
        let mut pieces = pm.pieces().to_vec();
        // breaking one piece destroys continuity
        pieces[2] = pieces[2].compose(&MoebiusDisk::rotation(1e-3));
        assert!(matches!(
            PiecewiseMoebiusDiffeo::from_pieces(breaks, pieces),
            Err(Error::NotPiecewiseDiffeo(_))
        ));
    }
}
