//! Analytic self-maps of the circle with exact complex derivatives on an annulus.
//!
//! Three explicit families (powers, Blaschke products, exponentials of the odd
//! Laurent monomial) plus Möbius maps and compositions. Each map carries closures
//! for `phi, phi', phi'', phi'''` valid on an annulus around the circle and a
//! smooth lift of its boundary restriction, so the same object feeds both the
//! conformal-distortion integrals (off the circle) and the action routes (on it).

use crate::diffeo::{lift_derivatives_from_complex, CircleDiffeo, DiffeoRepr, LiftJet};
use crate::moebius::MoebiusDisk;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

type CFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type LiftFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticKind {
    Power,
    Blaschke,
    Composition,
    Moebius,
    ExpSin,
}

#[derive(Clone)]
pub struct AnalyticCircleMap {
    kind: AnalyticKind,
    eval: CFn,
    d1: CFn,
    d2: CFn,
    d3: CFn,
    lift: LiftFn,
    degree: u32,
    /// Maps are analytic (and pole/zero free) on `inner_radius < |z| < 1/inner_radius`.
    inner_radius: f64,
}

impl std::fmt::Debug for AnalyticCircleMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticCircleMap")
            .field("kind", &self.kind)
            .field("degree", &self.degree)
            .field("inner_radius", &self.inner_radius)
            .finish()
    }
}

impl AnalyticCircleMap {
    fn validated(self) -> Result<Self> {
        for j in 0..64 {
            let t = TAU * j as f64 / 64.0;
            let z = Complex64::from_polar(1.0, t);
            let w = (self.eval)(z);
            if ((w.norm() - 1.0).abs()) > 1e-12 {
                return Err(Error::Precondition(format!(
                    "map does not preserve the circle: | |phi| - 1 | = {:.3e}",
                    (w.norm() - 1.0).abs()
                )));
            }
            let via_lift = Complex64::from_polar(1.0, (self.lift)(t));
            if (via_lift - w).norm() > 1e-9 {
                return Err(Error::Precondition(
                    "lift disagrees with the complex evaluation on the circle".into(),
                ));
            }
        }
        Ok(self)
    }

    /// `z -> z^n`.
    pub fn power(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("power map needs n >= 1".into()));
        }
        let nf = n as f64;
        Self {
            kind: AnalyticKind::Power,
            eval: Arc::new(move |z| z.powi(n as i32)),
            d1: Arc::new(move |z| nf * z.powi(n as i32 - 1)),
            d2: Arc::new(move |z| nf * (nf - 1.0) * z.powi(n as i32 - 2)),
            d3: Arc::new(move |z| nf * (nf - 1.0) * (nf - 2.0) * z.powi(n as i32 - 3)),
            lift: Arc::new(move |t| nf * t),
            degree: n,
            inner_radius: 0.05,
        }
        .validated()
    }

    /// Boundary restriction of a PSU(1,1) element.
    pub fn moebius(m: &MoebiusDisk) -> Result<Self> {
        let (a, b) = m.coefficients();
        let m = *m;
        let m1 = m;
        let m2 = m;
        let m3 = m;
        let base = 2.0 * a.arg();
        let ratio = b / a;
        let inner = if b.norm() == 0.0 {
            0.05
        } else {
            (b.norm() / a.norm()) + 1e-3
        };
        Self {
            kind: AnalyticKind::Moebius,
            eval: Arc::new(move |z| m.apply(z).expect("annulus avoids the pole")),
            d1: Arc::new(move |z| m1.derivative(z).expect("annulus avoids the pole")),
            d2: Arc::new(move |z| m2.second_derivative(z).expect("annulus avoids the pole")),
            d3: Arc::new(move |z| m3.third_derivative(z).expect("annulus avoids the pole")),
            lift: Arc::new(move |t| {
                let z = Complex64::from_polar(1.0, t);
                t + base + 2.0 * (Complex64::new(1.0, 0.0) + ratio * z.conj()).arg()
            }),
            degree: 1,
            inner_radius: inner.min(0.95),
        }
        .validated()
    }

    /// Blaschke product `e^{i psi} prod_j (z - a_j)/(1 - conj(a_j) z)`; degree is
    /// the number of zeros.
    pub fn blaschke(zeros: &[Complex64], rotation: f64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Precondition(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        let mut inner: f64 = 0.05;
        for a in zeros {
            if a.norm() >= 1.0 {
                return Err(Error::Precondition(format!(
                    "Blaschke zero |a| = {} must lie inside the disk",
                    a.norm()
                )));
            }
            inner = inner.max(a.norm() + 1e-3);
        }
        let zeros: Arc<[Complex64]> = zeros.to_vec().into();
        let rot = Complex64::from_polar(1.0, rotation);
        let eval_zeros = Arc::clone(&zeros);
        let eval = move |z: Complex64| -> Complex64 {
            let mut w = rot;
            for a in eval_zeros.iter() {
                w *= (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
            }
            w
        };
        // logarithmic derivatives: G = B'/B = sum 1/(z-a) + conj(a)/(1-conj(a)z)
        let g_zeros = Arc::clone(&zeros);
        let log_jets = move |z: Complex64| -> (Complex64, Complex64, Complex64) {
            let mut g = Complex64::new(0.0, 0.0);
            let mut g1 = Complex64::new(0.0, 0.0);
            let mut g2 = Complex64::new(0.0, 0.0);
            for a in g_zeros.iter() {
                let u = z - a;
                let v = Complex64::new(1.0, 0.0) - a.conj() * z;
                g += 1.0 / u + a.conj() / v;
                g1 += -1.0 / (u * u) + a.conj() * a.conj() / (v * v);
                g2 += 2.0 / (u * u * u) + 2.0 * a.conj().powi(3) / (v * v * v);
            }
            (g, g1, g2)
        };
        let e1 = eval.clone();
        let e2 = eval.clone();
        let e3 = eval.clone();
        let l1 = log_jets.clone();
        let l2 = log_jets.clone();
        let l3 = log_jets;
        let degree = zeros.len() as u32;
        let lift_zeros = Arc::clone(&zeros);
        Self {
            kind: AnalyticKind::Blaschke,
            eval: Arc::new(eval),
            d1: Arc::new(move |z| {
                let (g, _, _) = l1(z);
                e1(z) * g
            }),
            d2: Arc::new(move |z| {
                let (g, g1, _) = l2(z);
                e2(z) * (g * g + g1)
            }),
            d3: Arc::new(move |z| {
                let (g, g1, g2) = l3(z);
                e3(z) * (g * g * g + 3.0 * g * g1 + g2)
            }),
            lift: Arc::new(move |t| {
                let mut v = rotation + lift_zeros.len() as f64 * t;
                let e = Complex64::from_polar(1.0, -t);
                for a in lift_zeros.iter() {
                    v += 2.0 * (Complex64::new(1.0, 0.0) - a * e).arg();
                }
                v
            }),
            degree,
            inner_radius: inner.min(0.97),
        }
        .validated()
    }

    /// `z -> z exp(eps (z - 1/z)/2)`: circle-preserving with lift
    /// `theta + eps sin theta`; a diffeomorphism for `|eps| < 1`.
    pub fn exp_sin(eps: f64) -> Result<Self> {
        if eps.abs() >= 1.0 {
            return Err(Error::Precondition(
                "exp_sin needs |eps| < 1 to stay a diffeomorphism".into(),
            ));
        }
        let g = move |z: Complex64| eps * (z - 1.0 / z) / 2.0;
        let g1 = move |z: Complex64| eps * (Complex64::new(1.0, 0.0) + 1.0 / (z * z)) / 2.0;
        let g2 = move |z: Complex64| -eps / (z * z * z);
        let g3 = move |z: Complex64| 3.0 * eps / (z * z * z * z);
        Self {
            kind: AnalyticKind::ExpSin,
            eval: Arc::new(move |z| z * g(z).exp()),
            d1: Arc::new(move |z| g(z).exp() * (Complex64::new(1.0, 0.0) + z * g1(z))),
            d2: Arc::new(move |z| {
                g(z).exp() * (2.0 * g1(z) + z * g1(z) * g1(z) + z * g2(z))
            }),
            d3: Arc::new(move |z| {
                g(z).exp()
                    * (3.0 * g1(z) * g1(z)
                        + z * g1(z).powi(3)
                        + 3.0 * z * g1(z) * g2(z)
                        + 3.0 * g2(z)
                        + z * g3(z))
            }),
            lift: Arc::new(move |t| t + eps * t.sin()),
            degree: 1,
            inner_radius: 0.05,
        }
        .validated()
    }

    /// Composition `outer ∘ inner` (valid near the circle).
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let o = outer.clone();
        let i = inner.clone();
        let eval = {
            let (o, i) = (o.clone(), i.clone());
            Arc::new(move |z| (o.eval)((i.eval)(z))) as CFn
        };
        let d1 = {
            let (o, i) = (o.clone(), i.clone());
            Arc::new(move |z| (o.d1)((i.eval)(z)) * (i.d1)(z)) as CFn
        };
        let d2 = {
            let (o, i) = (o.clone(), i.clone());
            Arc::new(move |z| {
                let w = (i.eval)(z);
                let g1 = (i.d1)(z);
                (o.d2)(w) * g1 * g1 + (o.d1)(w) * (i.d2)(z)
            }) as CFn
        };
        let d3 = {
            let (o, i) = (o.clone(), i.clone());
            Arc::new(move |z| {
                let w = (i.eval)(z);
                let g1 = (i.d1)(z);
                let g2 = (i.d2)(z);
                (o.d3)(w) * g1 * g1 * g1 + 3.0 * (o.d2)(w) * g1 * g2 + (o.d1)(w) * (i.d3)(z)
            }) as CFn
        };
        let lift = {
            let (ol, il) = (Arc::clone(&o.lift), Arc::clone(&i.lift));
            Arc::new(move |t: f64| ol(il(t))) as LiftFn
        };
        Self {
            kind: AnalyticKind::Composition,
            eval,
            d1,
            d2,
            d3,
            lift,
            degree: outer.degree * inner.degree,
            inner_radius: outer.inner_radius.max(inner.inner_radius),
        }
        .validated()
    }

    pub fn kind(&self) -> AnalyticKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn deriv1(&self, z: Complex64) -> Complex64 {
        (self.d1)(z)
    }

    pub fn deriv2(&self, z: Complex64) -> Complex64 {
        (self.d2)(z)
    }

    pub fn deriv3(&self, z: Complex64) -> Complex64 {
        (self.d3)(z)
    }

    pub fn lift(&self, theta: f64) -> f64 {
        (self.lift)(theta)
    }

    /// The boundary restriction as a lift-based circle map (degree may exceed 1;
    /// the action integral accepts covers).
    pub fn boundary_diffeo(&self) -> Result<CircleDiffeo> {
        let eval = Arc::clone(&self.eval);
        let d1 = Arc::clone(&self.d1);
        let d2 = Arc::clone(&self.d2);
        let d3 = Arc::clone(&self.d3);
        let lift = Arc::clone(&self.lift);
        CircleDiffeo::from_jet_fn(
            move |t| {
                let z = Complex64::from_polar(1.0, t);
                let (j1, j2, j3) =
                    lift_derivatives_from_complex(z, eval(z), d1(z), d2(z), d3(z));
                LiftJet {
                    value: lift(t),
                    d1: j1,
                    d2: j2,
                    d3: j3,
                }
            },
            DiffeoRepr::AnalyticClosure,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check_derivatives(map: &AnalyticCircleMap, r: f64) {
        // complex finite differences guard against transcription slips
        let h = 1e-5;
        for j in 0..16 {
            let z = Complex64::from_polar(r, TAU * j as f64 / 16.0 + 0.01);
            for (exact, lower) in [
                (map.deriv1(z), None),
                (map.deriv2(z), Some(1)),
                (map.deriv3(z), Some(2)),
            ] {
                let fd = match lower {
                    None => (map.eval(z + h) - map.eval(z - h)) / (2.0 * h),
                    Some(1) => (map.deriv1(z + h) - map.deriv1(z - h)) / (2.0 * h),
                    _ => (map.deriv2(z + h) - map.deriv2(z - h)) / (2.0 * h),
                };
                assert!(
                    (exact - fd).norm() < 1e-5 * (1.0 + exact.norm()),
                    "derivative mismatch {} vs {}",
                    exact,
                    fd
                );
            }
        }
    }

    #[test]
    fn power_map_derivatives_and_degree() {
        let m = AnalyticCircleMap::power(3).unwrap();
        assert_eq!(m.degree(), 3);
        check_derivatives(&m, 0.9);
        let d = m.boundary_diffeo().unwrap();
        assert_eq!(d.degree(), 3);
    }

    #[test]
    fn blaschke_product_is_circle_map() {
        let zeros = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.25)];
        let m = AnalyticCircleMap::blaschke(&zeros, 0.4).unwrap();
        assert_eq!(m.degree(), 2);
        check_derivatives(&m, 0.95);
        check_derivatives(&m, 1.02);
        let d = m.boundary_diffeo().unwrap();
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn single_blaschke_factor_is_moebius() {
        let a = Complex64::new(0.3, 0.0);
        let b = AnalyticCircleMap::blaschke(&[a], 0.0).unwrap();
        // (z - a)/(1 - a z) equals the PSU(1,1) pair (1, -a) normalized
        let m = MoebiusDisk::new(Complex64::new(1.0, 0.0), -a).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(1.0, TAU * j as f64 / 16.0);
            assert!((b.eval(z) - m.apply(z).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn exp_sin_boundary_lift() {
        let m = AnalyticCircleMap::exp_sin(0.05).unwrap();
        check_derivatives(&m, 0.97);
        let d = m.boundary_diffeo().unwrap();
        assert_eq!(d.degree(), 1);
        for j in 0..16 {
            let t = TAU * j as f64 / 16.0;
            assert_abs_diff_eq!(d.lift(t), t + 0.05 * t.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn composition_chain_rule() {
        let f = AnalyticCircleMap::power(2).unwrap();
        let g = AnalyticCircleMap::exp_sin(0.05).unwrap();
        let c = AnalyticCircleMap::compose(&f, &g).unwrap();
        assert_eq!(c.degree(), 2);
        check_derivatives(&c, 0.98);
    }

    #[test]
    fn moebius_kind_round_trips() {
        let m = MoebiusDisk::new(Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.3)).unwrap();
        let a = AnalyticCircleMap::moebius(&m).unwrap();
        check_derivatives(&a, 0.9);
        let d = a.boundary_diffeo().unwrap();
        let action = crate::schwarzian::action_direct(&d, &crate::grid::QuadratureGrid::new(1024).unwrap())
            .unwrap();
        assert_abs_diff_eq!(action, 0.0, epsilon = 1e-9);
    }
}
