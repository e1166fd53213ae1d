//! The Farey ideal triangulation of the disk.
//!
//! Vertices are extended rationals built by Stern-Brocot mediant subdivision from
//! the root edge `(0, infinity)`, carried to the unit circle by the inverse Cayley
//! map `x -> (1 + ix)/(1 - ix)` (so `x = p/q` sits at angle `2 arctan(p/q)` and
//! infinity at angle `pi`). Depth `d` keeps the two root triangles
//! `{0, 1, infinity}` and `{-1, 0, infinity}` plus mediant subdivisions to depth
//! `d` on each side: `2^{d+2} - 2` triangles, `2^{d+3} - 3` edges, `2^{d+2}`
//! vertices, and a dual graph that is a binary tree rooted at the root edge.

use crate::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;

pub const MAX_DEPTH: u32 = 20;

/// Extended rational `p/q` in lowest terms; infinity is `(±1, 0)` (the sign keeps
/// mediants correct on the two sides of the root edge, the vertex is the same).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    pub p: i64,
    pub q: i64,
}

impl Fraction {
    pub fn infinity() -> Self {
        Self { p: 1, q: 0 }
    }

    pub fn integer(n: i64) -> Self {
        Self { p: n, q: 1 }
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0
    }

    pub fn mediant(&self, other: &Self) -> Self {
        Self {
            p: self.p + other.p,
            q: self.q + other.q,
        }
    }

    /// Canonical vertex key: both infinity representations collapse.
    fn key(&self) -> (i64, i64) {
        if self.q == 0 {
            (1, 0)
        } else {
            (self.p, self.q)
        }
    }

    /// Boundary angle under the inverse Cayley map, in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        if self.q == 0 {
            PI
        } else {
            2.0 * (self.p as f64 / self.q as f64).atan()
        }
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.q == 0 {
            write!(f, "inf")
        } else if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// One triangle of the walk: the known edge `(u, v)` and the new vertex `w`,
/// arranged so that `w` lies on the counterclockwise arc from `v` to `u`.
#[derive(Debug, Clone, Copy)]
pub struct WalkStep {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    /// Edge indices of `(v, w)` and `(w, u)`.
    pub edge_vw: usize,
    pub edge_wu: usize,
}

#[derive(Debug, Clone)]
pub struct IdealTriangulation {
    vertices: Vec<Fraction>,
    /// Vertex-index pairs, root edge first.
    edges: Vec<(usize, usize)>,
    /// Vertex-index triples in walk (ccw) order `(u, v, w)`.
    triangles: Vec<[usize; 3]>,
    steps: Vec<WalkStep>,
    depth: u32,
}

impl IdealTriangulation {
    pub fn vertices(&self) -> &[Fraction] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Triangles in parent-before-child order; processing them in order visits the
    /// dual tree from the root edge outward.
    pub fn walk(&self) -> &[WalkStep] {
        &self.steps
    }

    pub fn root_edge(&self) -> (usize, usize) {
        self.edges[0]
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn angle(&self, vertex: usize) -> f64 {
        self.vertices[vertex].angle()
    }
}

/// Builds the Farey triangulation to mediant depth `depth`.
pub fn farey_triangulation(depth: u32) -> Result<IdealTriangulation> {
    if depth > MAX_DEPTH {
        return Err(Error::ResourceLimit(format!(
            "farey depth {depth} exceeds the configured cap {MAX_DEPTH}"
        )));
    }
    let mut builder = Builder::default();
    let zero = Fraction::integer(0);
    let inf_right = Fraction::infinity();
    let inf_left = Fraction { p: -1, q: 0 };
    let (i_zero, i_inf) = (builder.vertex(zero), builder.vertex(inf_right));
    builder.edge(i_zero, i_inf); // root edge, index 0

    // right root triangle {0, 1, inf}: new vertex 1 on the ccw arc (0 -> inf)
    builder.triangle(inf_right, zero, zero.mediant(&inf_right), depth, 0);
    // left root triangle {-1, 0, inf}: new vertex -1 on the ccw arc (inf -> 0)
    builder.triangle(zero, inf_left, inf_left.mediant(&zero), depth, 0);

    Ok(IdealTriangulation {
        vertices: builder.vertices,
        edges: builder.edges,
        triangles: builder.triangles,
        steps: builder.steps,
        depth,
    })
}

#[derive(Default)]
struct Builder {
    vertices: Vec<Fraction>,
    index: HashMap<(i64, i64), usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
    steps: Vec<WalkStep>,
}

impl Builder {
    fn vertex(&mut self, f: Fraction) -> usize {
        if let Some(&i) = self.index.get(&f.key()) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(if f.q == 0 { Fraction::infinity() } else { f });
        self.index.insert(f.key(), i);
        i
    }

    fn edge(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&i) = self.edge_index.get(&key) {
            return i;
        }
        let i = self.edges.len();
        self.edges.push(key);
        self.edge_index.insert(key, i);
        i
    }

    /// Recursively adds the triangle with known edge `(u, v)` and new vertex `w`,
    /// then its two children across `(v, w)` and `(w, u)`.
    fn triangle(&mut self, u: Fraction, v: Fraction, w: Fraction, remaining: u32, _level: u32) {
        let (iu, iv, iw) = (self.vertex(u), self.vertex(v), self.vertex(w));
        let edge_vw = self.edge(iv, iw);
        let edge_wu = self.edge(iw, iu);
        self.triangles.push([iu, iv, iw]);
        self.steps.push(WalkStep {
            u: iu,
            v: iv,
            w: iw,
            edge_vw,
            edge_wu,
        });
        if remaining > 0 {
            // child across (v, w): the new vertex sits on the ccw arc (v -> w)
            self.triangle(w, v, v.mediant(&w), remaining - 1, _level + 1);
            // child across (w, u): the new vertex sits on the ccw arc (w -> u)
            self.triangle(u, w, w.mediant(&u), remaining - 1, _level + 1);
        }
    }
}

/// Do the chords `(a1, a2)` and `(b1, b2)` (boundary angles) cross inside the
/// open disk? Chords sharing an endpoint do not cross.
pub fn chords_cross(a1: f64, a2: f64, b1: f64, b2: f64) -> bool {
    let tau = std::f64::consts::TAU;
    let norm = |x: f64| x.rem_euclid(tau);
    let same = |x: f64, y: f64| {
        let d = norm(x - y);
        d < 1e-12 || d > tau - 1e-12
    };
    if same(a1, b1) || same(a1, b2) || same(a2, b1) || same(a2, b2) {
        return false;
    }
    let inside = |x: f64, lo: f64, hi: f64| {
        let span = norm(hi - lo);
        let off = norm(x - lo);
        off > 1e-12 && off < span - 1e-12
    };
    inside(b1, a1, a2) != inside(b2, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_counts() {
        let t = farey_triangulation(0).unwrap();
        assert_eq!(t.triangles().len(), 2);
        assert_eq!(t.edges().len(), 5);
        assert_eq!(t.vertices().len(), 4);
        assert_eq!(t.root_edge(), (0, 1)); // vertices 0 and infinity
    }

    #[test]
    fn depth_one_counts_and_tree() {
        let t = farey_triangulation(1).unwrap();
        // 4 new mediant vertices; the dual graph has 6 nodes (triangles)
        assert_eq!(t.vertices().len(), 8);
        assert_eq!(t.triangles().len(), 6);
        assert_eq!(t.edges().len(), 13);
        // every vertex index referenced by a step is created before its children use it
        let mut seen = vec![false; t.vertices().len()];
        let (r0, r1) = t.root_edge();
        seen[r0] = true;
        seen[r1] = true;
        for s in t.walk() {
            assert!(seen[s.u] && seen[s.v], "walk visits child before parent");
            seen[s.w] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn counts_follow_doubling_law() {
        for d in 0..=5u32 {
            let t = farey_triangulation(d).unwrap();
            assert_eq!(t.triangles().len(), (1 << (d + 2)) - 2);
            assert_eq!(t.vertices().len(), 1 << (d + 2));
            assert_eq!(t.edges().len(), (1 << (d + 3)) - 3);
            // exact determinacy: edges = 2 * vertices - 3
            assert_eq!(t.edges().len(), 2 * t.vertices().len() - 3);
        }
    }

    #[test]
    fn depth_one_contains_expected_fractions() {
        let t = farey_triangulation(1).unwrap();
        let mut got: Vec<String> = t.vertices().iter().map(|f| f.to_string()).collect();
        got.sort();
        let mut want: Vec<String> = ["0", "1", "inf", "-1", "1/2", "2", "-1/2", "-2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn walk_arcs_are_consistent() {
        // w must lie strictly inside the ccw arc from v to u
        let t = farey_triangulation(4).unwrap();
        let tau = std::f64::consts::TAU;
        for s in t.walk() {
            let au = t.angle(s.u).rem_euclid(tau);
            let av = t.angle(s.v).rem_euclid(tau);
            let aw = t.angle(s.w).rem_euclid(tau);
            let span = (au - av).rem_euclid(tau);
            let off = (aw - av).rem_euclid(tau);
            assert!(off > 1e-12 && off < span - 1e-12, "w outside its arc");
        }
    }

    #[test]
    fn edges_do_not_cross_through_depth_six() {
        let t = farey_triangulation(6).unwrap();
        let angles: Vec<f64> = (0..t.vertices().len()).map(|i| t.angle(i)).collect();
        let edges = t.edges();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a1, a2) = edges[i];
                let (b1, b2) = edges[j];
                assert!(
                    !chords_cross(angles[a1], angles[a2], angles[b1], angles[b2]),
                    "edges {i} and {j} cross"
                );
            }
        }
    }

    #[test]
    fn depth_cap_enforced() {
        assert!(farey_triangulation(MAX_DEPTH + 1).is_err());
    }
}
