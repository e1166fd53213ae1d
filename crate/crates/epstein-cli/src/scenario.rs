//! Versioned scenario files: a JSON alternative to command-line flags.

use anyhow::{bail, Context, Result};
use epstein::descriptor::Descriptor;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "epstein-action/1";

pub const OPS: [&str; 10] = [
    "action",
    "epstein",
    "foliate",
    "excess",
    "bilocal",
    "reconstruct",
    "piecewise",
    "nfold",
    "dual",
    "distort",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: String,
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Descriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Scale or range, e.g. `"1.0"` or `"0:5:0.1"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horocycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stroke_width: Option<f64>,
    #[serde(default)]
    pub area: bool,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).context("scenario JSON")?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            bail!("unsupported scenario schema {:?} (expected {SCHEMA:?})", self.schema);
        }
        if !OPS.contains(&self.op.as_str()) {
            bail!("unknown operation {:?}; expected one of {OPS:?}", self.op);
        }
        if let Some(g) = self.grid {
            if !g.is_power_of_two() || !(64..=65536).contains(&g) {
                bail!("grid size {g} must be a power of two between 64 and 65536");
            }
        }
        if self.input.is_none() && self.input_path.is_none() {
            bail!("scenario needs either an inline input descriptor or input_path");
        }
        Ok(())
    }
}

/// Parses `"a:b:step"` ranges or single scalars into a list of scales.
pub fn parse_t_values(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parts[0].parse::<f64>().context("scale value")?]),
        3 => {
            let start: f64 = parts[0].parse().context("range start")?;
            let end: f64 = parts[1].parse().context("range end")?;
            let step: f64 = parts[2].parse().context("range step")?;
            if !(step > 0.0) || end < start {
                bail!("bad range {spec:?}: need start <= end and step > 0");
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| start + step * k as f64).collect())
        }
        _ => bail!("expected a scalar or start:end:step, got {spec:?}"),
    }
}
