//! Minimal SVG writer for disk pictures.
//!
//! The unit disk maps to a 1000x1000 viewBox with the y-axis flipped, so the
//! goldens are portable. Curves and horocycles are `<path>` elements (the path
//! count is the structural regression tests key on); the disk boundary and point
//! markers are `<circle>` elements and do not count as paths.

use num_complex::Complex64;
use std::fmt::Write as _;

pub struct SvgDoc {
    body: String,
    path_count: usize,
}

const SIZE: f64 = 1000.0;

fn map(z: Complex64) -> (f64, f64) {
    (SIZE / 2.0 + SIZE / 2.0 * z.re, SIZE / 2.0 - SIZE / 2.0 * z.im)
}

impl SvgDoc {
    pub fn new() -> Self {
        let mut doc = Self {
            body: String::new(),
            path_count: 0,
        };
        let _ = writeln!(
            doc.body,
            r##"<circle cx="500" cy="500" r="500" fill="none" stroke="#888" stroke-width="1"/>"##
        );
        doc
    }

    pub fn path_count(&self) -> usize {
        self.path_count
    }

    /// Polyline path through disk points; closed paths get a trailing `Z`.
    pub fn polyline(&mut self, points: &[Complex64], closed: bool, stroke: &str, width: f64) {
        if points.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let (x, y) = map(*p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#
        );
        self.path_count += 1;
    }

    /// Full circle as a path of two arcs (horocycles).
    pub fn circle_path(&mut self, center: Complex64, radius: f64, stroke: &str, width: f64) {
        let (cx, cy) = map(center);
        let r = radius * SIZE / 2.0;
        let _ = writeln!(
            self.body,
            r#"<path d="M{:.3},{:.3} A{r:.3},{r:.3} 0 1 0 {:.3},{:.3} A{r:.3},{r:.3} 0 1 0 {:.3},{:.3}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            cx + r,
            cy,
            cx - r,
            cy,
            cx + r,
            cy
        );
        self.path_count += 1;
    }

    /// Point marker (not a path).
    pub fn marker(&mut self, at: Complex64, radius: f64, fill: &str) {
        let (cx, cy) = map(at);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{radius}" fill="{fill}"/>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n{}</svg>\n",
            self.body
        )
    }
}

impl Default for SvgDoc {
    fn default() -> Self {
        Self::new()
    }
}
