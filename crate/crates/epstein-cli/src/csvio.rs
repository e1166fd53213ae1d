//! Frame CSV export/import. Columns are fixed:
//! `theta,x,y,nx,ny,dl,kdl,kstar`, one row per node, header mandatory. Values
//! are written in Rust's shortest round-trippable decimal form, so re-reading
//! reproduces the binary doubles exactly.

use anyhow::{bail, Context, Result};
use epstein::curve::{EpsteinCurve, EpsteinFrame};

pub const HEADER: &str = "theta,x,y,nx,ny,dl,kdl,kstar";

pub fn frames_to_csv(curve: &EpsteinCurve) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for f in curve.frames() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            f.theta, f.point.re, f.point.im, f.normal.re, f.normal.im, f.dl_density,
            f.kdl_density, f.kstar
        ));
    }
    out
}

pub fn frames_from_csv(text: &str) -> Result<Vec<EpsteinFrame>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV")?;
    if header.trim() != HEADER {
        bail!("unexpected CSV header {header:?}");
    }
    let mut frames = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            bail!("line {}: expected 8 fields, got {}", lineno + 2, fields.len());
        }
        let v: Vec<f64> = fields
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}", lineno + 2))?;
        frames.push(EpsteinFrame {
            theta: v[0],
            point: epstein::Complex64::new(v[1], v[2]),
            normal: epstein::Complex64::new(v[3], v[4]),
            dl_density: v[5],
            kdl_density: v[6],
            kstar: v[7],
        });
    }
    Ok(frames)
}
