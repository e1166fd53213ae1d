//! Command-line front end for the Schwarzian/Epstein library.
//!
//! Exit codes: 0 on success, 2 for unusable inputs (descriptor, scenario, or
//! argument problems), 3 when a checked identity exceeds the configured
//! tolerance.

// `!(x > 0.0)` is used as a NaN-rejecting positivity guard
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod csvio;
mod scenario;
mod svg;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use epstein::analytic::AnalyticCircleMap;
use epstein::bilocal::{
    kinematic_density_grid, renormalized_length, renormalized_length_closed_form,
};
use epstein::curve::{isoperimetric_excess, EpsteinCurve};
use epstein::descriptor::{Descriptor, Input};
use epstein::diffeo::CircleDiffeo;
use epstein::disk::Horocycle;
use epstein::dsdual::{dual_density_residual, dual_quantities};
use epstein::extrapolate::aitken;
use epstein::farey::{farey_triangulation, IdealTriangulation};
use epstein::grid::QuadratureGrid;
use epstein::metric::BoundaryMetric;
use epstein::piecewise::{completed_epstein, scaled_completed_epstein};
use epstein::reconstruct::{
    reconstruct_from_observables, roundtrip_mismatch, ObservableBundle,
};
use epstein::routes::{registry, route, ActionSubject, TIGHT_ROUTES};
use epstein::schwarzian::{action_direct, action_nfold};
use epstein::Complex64;
use scenario::{parse_t_values, Scenario};
use serde_json::json;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use svg::SvgDoc;

#[derive(Parser)]
#[command(
    name = "epstein-action",
    version,
    about = "Schwarzian action and Epstein curves in the hyperbolic disk"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the action through every registered route and cross-check them.
    Action {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// Tight cross-route tolerance (the circulation oracle gets 1e-5 or this,
        /// whichever is larger).
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Compute a single named route instead of the whole registry.
        #[arg(long)]
        route: Option<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Epstein curve of a metric (or of a diffeomorphism's pushforward).
    Epstein {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        /// Scale t of the equidistant leaf (metric e^t h).
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 80)]
        horocycles: usize,
        /// Curve stroke width in viewBox units.
        #[arg(long, default_value_t = 1.6)]
        stroke_width: f64,
    },
    /// Render the equidistant foliation over a range of scales.
    Foliate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        /// Range start:end:step (inclusive).
        #[arg(long, default_value = "0:5:0.1")]
        t: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        horocycles: usize,
        /// Curve stroke width in viewBox units.
        #[arg(long, default_value_t = 0.9)]
        stroke_width: f64,
    },
    /// Isoperimetric excess along the foliation and its extrapolated limit.
    Excess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value = "3:6:1")]
        t: String,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Bi-local observable and renormalized length between two boundary angles.
    Bilocal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Export the kinematic density O^2 on an n-by-n grid of pairs.
        #[arg(long)]
        kinematic: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Farey-triangulation observables and reconstruction round-trip.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        /// Reconstruct from this observable bundle instead of the input map.
        #[arg(long)]
        bundle: Option<PathBuf>,
        /// Write the input map's observable bundle here.
        #[arg(long)]
        bundle_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Piecewise-Möbius diffeomorphism: jumps, completed curve, identities.
    Piecewise {
        #[arg(long)]
        input: PathBuf,
        /// Also build the scaled completed curve at this t > 0.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 80)]
        horocycles: usize,
    },
    /// n-fold cover action and its Epstein-curve identities.
    Nfold {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        horocycles: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// de Sitter dual quantities and density-level checks.
    Dual {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Conformal-distortion integrals D(r) and their extrapolated limit.
    Distort {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Also compute the enclosed-area version (degree-1 maps).
        #[arg(long)]
        area: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a versioned scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// List the registered action routes.
    Routes,
}

/// Failures that map to exit code 3 (identity exceeded its tolerance).
#[derive(Debug)]
struct ToleranceBreach(String);

impl std::fmt::Display for ToleranceBreach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "tolerance breach: {}", self.0)
    }
}

impl std::error::Error for ToleranceBreach {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ToleranceBreach>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Action {
            input,
            grid,
            tol,
            route,
            json,
        } => cmd_action(&load(&input)?, grid, tol, route.as_deref(), json.as_deref()),
        Cmd::Epstein {
            input,
            grid,
            t,
            svg,
            csv,
            horocycles,
            stroke_width,
        } => cmd_epstein(
            &load(&input)?,
            grid,
            t,
            svg.as_deref(),
            csv.as_deref(),
            horocycles,
            stroke_width,
        ),
        Cmd::Foliate {
            input,
            grid,
            t,
            svg,
            horocycles,
            stroke_width,
        } => cmd_foliate(&load(&input)?, grid, &t, svg.as_deref(), horocycles, stroke_width),
        Cmd::Excess {
            input,
            grid,
            t,
            tol,
            json,
        } => cmd_excess(&load(&input)?, grid, &t, tol, json.as_deref()),
        Cmd::Bilocal {
            input,
            u,
            v,
            tol,
            kinematic,
            csv,
            json,
        } => cmd_bilocal(&load(&input)?, u, v, tol, kinematic, csv.as_deref(), json.as_deref()),
        Cmd::Reconstruct {
            input,
            depth,
            bundle,
            bundle_out,
            tol,
            json,
        } => cmd_reconstruct(
            &load(&input)?,
            depth,
            bundle.as_deref(),
            bundle_out.as_deref(),
            tol,
            json.as_deref(),
        ),
        Cmd::Piecewise {
            input,
            t,
            tol,
            svg,
            json,
            horocycles,
        } => cmd_piecewise(&load(&input)?, t, tol, svg.as_deref(), json.as_deref(), horocycles),
        Cmd::Nfold {
            input,
            n,
            grid,
            tol,
            svg,
            csv,
            horocycles,
            json,
        } => cmd_nfold(
            &load(&input)?,
            n,
            grid,
            tol,
            svg.as_deref(),
            csv.as_deref(),
            horocycles,
            json.as_deref(),
        ),
        Cmd::Dual {
            input,
            grid,
            tol,
            json,
        } => cmd_dual(&load(&input)?, grid, tol, json.as_deref()),
        Cmd::Distort {
            input,
            kmax,
            grid,
            tol,
            area,
            json,
        } => cmd_distort(&load(&input)?, kmax, grid, tol, area, json.as_deref()),
        Cmd::Run { scenario } => cmd_run(&scenario),
        Cmd::Routes => {
            for r in registry() {
                println!("{:<18} {}", r.name(), r.describe());
            }
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Descriptor> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading descriptor {}", path.display()))?;
    Descriptor::from_json(&text).map_err(|e| anyhow!("{e}"))
}

fn make_grid(n: usize) -> Result<QuadratureGrid> {
    if !(64..=65536).contains(&n) {
        anyhow::bail!("grid size {n} must lie between 64 and 65536");
    }
    QuadratureGrid::new(n).map_err(|e| anyhow!("{e}"))
}

/// Subject for the action routes; metrics of non-`2 pi` length are rescaled.
fn subject_of(desc: &Descriptor) -> Result<ActionSubject> {
    let input = desc.build().map_err(|e| anyhow!("{e}"))?;
    match &input {
        Input::Metric(h) => {
            let h = if h.is_normalized(1e-8) {
                h.clone()
            } else {
                eprintln!(
                    "note: metric has length {:.6}; rescaled to 2 pi for the action",
                    h.total_length()
                );
                h.rescaled_to_round_length()
            };
            ActionSubject::from_metric(&h).map_err(|e| anyhow!("{e}"))
        }
        Input::Piecewise(_) => anyhow::bail!(
            "piecewise inputs carry a distributional action; use the `piecewise` subcommand"
        ),
        _ => {
            let d = input.diffeo().map_err(|e| anyhow!("{e}"))?;
            ActionSubject::from_diffeo(&d).map_err(|e| anyhow!("{e}"))
        }
    }
}

fn metric_of(desc: &Descriptor) -> Result<BoundaryMetric> {
    let input = desc.build().map_err(|e| anyhow!("{e}"))?;
    input.metric().map_err(|e| anyhow!("{e}"))
}

fn diffeo_of(desc: &Descriptor) -> Result<CircleDiffeo> {
    let input = desc.build().map_err(|e| anyhow!("{e}"))?;
    input.diffeo().map_err(|e| anyhow!("{e}"))
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, serde_json::to_string_pretty(value)?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_action(
    desc: &Descriptor,
    grid: usize,
    tol: f64,
    single: Option<&str>,
    json_out: Option<&Path>,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let subject = subject_of(desc)?;
    if let Some(name) = single {
        let r = route(name).ok_or_else(|| anyhow!("unknown route {name:?}; see `routes`"))?;
        let v = r.compute(&subject, &grid).map_err(|e| anyhow!("{e}"))?;
        println!("{:<18} {v:.15}", r.name());
        write_json(json_out, &json!({ r.name(): v }))?;
        return Ok(());
    }
    let mut values = serde_json::Map::new();
    let mut tight = Vec::new();
    let mut eta = None;
    for r in registry() {
        let v = r.compute(&subject, &grid).map_err(|e| anyhow!("{e}"))?;
        println!("{:<18} {v:.15}", r.name());
        values.insert(r.name().into(), json!(v));
        if TIGHT_ROUTES.contains(&r.name()) {
            tight.push(v);
        } else {
            eta = Some(v);
        }
    }
    let mut discrepancy = 0.0f64;
    for i in 0..tight.len() {
        for j in i + 1..tight.len() {
            discrepancy = discrepancy.max((tight[i] - tight[j]).abs());
        }
    }
    let eta_tol = tol.max(1e-5);
    let eta_dev = eta
        .map(|e| tight.iter().fold(0.0f64, |w, t| w.max((t - e).abs())))
        .unwrap_or(0.0);
    println!(
        "max pairwise discrepancy {discrepancy:.3e} (tol {tol:.1e}); oracle deviation {eta_dev:.3e} (tol {eta_tol:.1e})"
    );
    values.insert("discrepancy".into(), json!(discrepancy));
    values.insert("eta_deviation".into(), json!(eta_dev));
    write_json(json_out, &serde_json::Value::Object(values))?;
    if discrepancy > tol || eta_dev > eta_tol {
        return Err(ToleranceBreach(format!(
            "route discrepancy {discrepancy:.3e} / oracle deviation {eta_dev:.3e}"
        ))
        .into());
    }
    Ok(())
}

fn render_curve_svg(
    doc: &mut SvgDoc,
    curve: &EpsteinCurve,
    metric: &BoundaryMetric,
    horocycles: usize,
    stroke_width: f64,
) {
    for k in 0..horocycles {
        let t = TAU * k as f64 / horocycles.max(1) as f64;
        if let Ok(h) = Horocycle::new(Complex64::from_polar(1.0, t), metric.density(t)) {
            doc.circle_path(h.euclidean_center(), h.euclidean_radius(), "#4477cc", 0.45 * stroke_width);
        }
    }
    let pts: Vec<Complex64> = curve.frames().iter().map(|f| f.point).collect();
    let spread = pts
        .iter()
        .map(|p| (p - pts[0]).norm())
        .fold(0.0f64, f64::max);
    if spread < 1e-9 {
        // degenerate envelope: a point marker instead of a path
        doc.marker(pts[0], 4.0, "#dd6600");
    } else {
        doc.polyline(&pts, true, "#dd6600", stroke_width);
    }
}

fn cmd_epstein(
    desc: &Descriptor,
    grid: usize,
    t: f64,
    svg_out: Option<&Path>,
    csv_out: Option<&Path>,
    horocycles: usize,
    stroke_width: f64,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let h = metric_of(desc)?.scaled(t);
    let curve = EpsteinCurve::from_metric(&h, &grid);
    println!("total length        {:.12}", curve.total_length());
    println!("total curvature     {:.12}", curve.total_curvature());
    println!("area (Gauss-Bonnet) {:.12}", curve.signed_area_gauss_bonnet());
    println!(
        "area (eta oracle)   {:.12}",
        curve.signed_area_eta().map_err(|e| anyhow!("{e}"))?
    );
    if let Some(p) = csv_out {
        std::fs::write(p, csvio::frames_to_csv(&curve))
            .with_context(|| format!("writing {}", p.display()))?;
        // serialization fidelity: re-read and reproduce the totals exactly
        let back = csvio::frames_from_csv(&std::fs::read_to_string(p)?)?;
        let w = TAU / back.len() as f64;
        let l_back: f64 = back.iter().map(|f| f.dl_density).sum::<f64>() * w;
        let k_back: f64 = back.iter().map(|f| f.kdl_density).sum::<f64>() * w;
        let drift = (l_back - curve.total_length())
            .abs()
            .max((k_back - curve.total_curvature()).abs());
        if drift > 1e-12 {
            anyhow::bail!("CSV round-trip drifted by {drift:.3e}");
        }
        println!("csv round-trip      exact ({} rows)", back.len());
    }
    if let Some(p) = svg_out {
        let mut doc = SvgDoc::new();
        render_curve_svg(&mut doc, &curve, &h, horocycles, stroke_width);
        println!("svg paths           {}", doc.path_count());
        std::fs::write(p, doc.finish()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_foliate(
    desc: &Descriptor,
    grid: usize,
    t_spec: &str,
    svg_out: Option<&Path>,
    horocycles: usize,
    stroke_width: f64,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let h = metric_of(desc)?;
    let ts = parse_t_values(t_spec)?;
    let mut doc = SvgDoc::new();
    for k in 0..horocycles {
        let th = TAU * k as f64 / horocycles.max(1) as f64;
        if let Ok(hc) = Horocycle::new(Complex64::from_polar(1.0, th), h.density(th)) {
            doc.circle_path(hc.euclidean_center(), hc.euclidean_radius(), "#4477cc", 0.45 * stroke_width);
        }
    }
    for &t in &ts {
        let curve = EpsteinCurve::from_metric(&h.scaled(t), &grid);
        let pts: Vec<Complex64> = curve.frames().iter().map(|f| f.point).collect();
        doc.polyline(&pts, true, "#dd6600", stroke_width);
        println!(
            "t = {t:>6.3}: L = {:>14.9}, A = {:>14.9}",
            curve.total_length(),
            curve.signed_area_gauss_bonnet()
        );
    }
    println!("svg paths           {}", doc.path_count());
    if let Some(p) = svg_out {
        std::fs::write(p, doc.finish()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_excess(
    desc: &Descriptor,
    grid: usize,
    t_spec: &str,
    tol: f64,
    json_out: Option<&Path>,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let subject = subject_of(desc)?;
    let h = subject.metric();
    let ts = parse_t_values(t_spec)?;
    let mut xs = Vec::new();
    for &t in &ts {
        let x = isoperimetric_excess(h, t, &grid).map_err(|e| anyhow!("{e}"))?;
        println!("t = {t:>5.2}: excess = {x:.12}");
        xs.push(x);
    }
    let lim = aitken(&xs).map_err(|e| anyhow!("{e}"))?;
    let action = action_direct(subject.diffeo(), &grid).map_err(|e| anyhow!("{e}"))?;
    let gap = (lim.value - 2.0 * action).abs();
    println!(
        "extrapolated limit  {:.12} (est. error {:.2e})",
        lim.value, lim.error_estimate
    );
    println!("twice the action    {:.12} (gap {gap:.3e})", 2.0 * action);
    write_json(
        json_out,
        &json!({
            "t": ts,
            "excess": xs,
            "limit": lim.value,
            "limit_error_estimate": lim.error_estimate,
            "action": action,
        }),
    )?;
    if gap > tol {
        return Err(ToleranceBreach(format!("excess limit off by {gap:.3e}")).into());
    }
    Ok(())
}

fn cmd_bilocal(
    desc: &Descriptor,
    u: f64,
    v: f64,
    tol: f64,
    kinematic: Option<usize>,
    csv_out: Option<&Path>,
    json_out: Option<&Path>,
) -> Result<()> {
    let phi = diffeo_of(desc)?;
    let zu = Complex64::from_polar(1.0, u);
    let zv = Complex64::from_polar(1.0, v);
    let o = epstein::bilocal::bilocal(&phi, zu, zv).map_err(|e| anyhow!("{e}"))?;
    let rl_geom = renormalized_length(&phi, zu, zv).map_err(|e| anyhow!("{e}"))?;
    let rl_closed = renormalized_length_closed_form(&phi, zu, zv).map_err(|e| anyhow!("{e}"))?;
    let identity_residual = (o * o - 0.25 * (-rl_geom).exp()).abs();
    println!("observable O        {o:.15}");
    println!("RL (geometric)      {rl_geom:.15}");
    println!("RL (closed form)    {rl_closed:.15}");
    println!("O^2 - exp(-RL)/4    {identity_residual:.3e}");
    if let Some(n) = kinematic {
        let grid_vals = kinematic_density_grid(&phi, n).map_err(|e| anyhow!("{e}"))?;
        if let Some(p) = csv_out {
            let mut text = String::new();
            for row in &grid_vals {
                let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            println!("kinematic density   {n}x{n} grid written");
        }
    }
    write_json(
        json_out,
        &json!({
            "u": u, "v": v, "observable": o,
            "rl_geometric": rl_geom, "rl_closed_form": rl_closed,
            "identity_residual": identity_residual,
        }),
    )?;
    if (rl_geom - rl_closed).abs() > tol {
        return Err(ToleranceBreach(format!(
            "geometric and closed-form RL differ by {:.3e}",
            (rl_geom - rl_closed).abs()
        ))
        .into());
    }
    Ok(())
}

fn bundle_to_json(tri: &IdealTriangulation, obs: &ObservableBundle) -> serde_json::Value {
    let (u0, v0) = tri.root_edge();
    json!({
        "root": [tri.angle(u0), tri.angle(v0)],
        "edges": tri.edges().iter().enumerate().map(|(e, &(a, b))| {
            json!({"u": tri.angle(a), "v": tri.angle(b), "O": obs.get(e)})
        }).collect::<Vec<_>>(),
    })
}

fn bundle_from_json(tri: &IdealTriangulation, text: &str) -> Result<ObservableBundle> {
    #[derive(serde::Deserialize)]
    struct EdgeObs {
        u: f64,
        v: f64,
        #[serde(rename = "O")]
        o: f64,
    }
    #[derive(serde::Deserialize)]
    struct Bundle {
        edges: Vec<EdgeObs>,
    }
    let bundle: Bundle = serde_json::from_str(text).context("observable bundle JSON")?;
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let mut values = vec![f64::NAN; tri.edges().len()];
    for e in &bundle.edges {
        let mut found = false;
        for (i, &(a, b)) in tri.edges().iter().enumerate() {
            let (ta, tb) = (tri.angle(a), tri.angle(b));
            if (close(e.u, ta) && close(e.v, tb)) || (close(e.u, tb) && close(e.v, ta)) {
                values[i] = e.o;
                found = true;
                break;
            }
        }
        if !found {
            anyhow::bail!(
                "bundle edge ({}, {}) is not in the depth triangulation",
                e.u,
                e.v
            );
        }
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        let (a, b) = tri.edges()[i];
        anyhow::bail!("bundle is missing edge ({}, {})", tri.angle(a), tri.angle(b));
    }
    Ok(ObservableBundle { values })
}

fn cmd_reconstruct(
    desc: &Descriptor,
    depth: u32,
    bundle_in: Option<&Path>,
    bundle_out: Option<&Path>,
    tol: f64,
    json_out: Option<&Path>,
) -> Result<()> {
    let tri = farey_triangulation(depth).map_err(|e| anyhow!("{e}"))?;
    let phi = diffeo_of(desc)?;
    let obs = match bundle_in {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading bundle {}", p.display()))?;
            bundle_from_json(&tri, &text)?
        }
        None => ObservableBundle::of_diffeo(&tri, &phi).map_err(|e| anyhow!("{e}"))?,
    };
    if let Some(p) = bundle_out {
        std::fs::write(p, serde_json::to_string_pretty(&bundle_to_json(&tri, &obs))?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    let rec = reconstruct_from_observables(&tri, &obs).map_err(|e| anyhow!("{e}"))?;
    let mismatch = roundtrip_mismatch(&tri, &rec, &phi).map_err(|e| anyhow!("{e}"))?;
    println!("vertices            {}", tri.vertices().len());
    println!("edges               {}", tri.edges().len());
    println!("max edge residual   {:.3e}", rec.max_edge_residual);
    println!("round-trip mismatch {mismatch:.3e} (tol {tol:.1e})");
    write_json(
        json_out,
        &json!({
            "depth": depth,
            "max_edge_residual": rec.max_edge_residual,
            "roundtrip_mismatch": mismatch,
            "vertices": tri.vertices().iter().enumerate().map(|(i, f)| {
                let p = rec.points[i];
                json!({
                    "vertex": f.to_string(),
                    "theta": tri.angle(i),
                    "position": [p.position.re, p.position.im],
                    "decoration": p.decoration,
                })
            }).collect::<Vec<_>>(),
        }),
    )?;
    if mismatch > tol {
        return Err(ToleranceBreach(format!(
            "reconstruction disagrees with the input map by {mismatch:.3e}: observables rejected"
        ))
        .into());
    }
    Ok(())
}

fn cmd_piecewise(
    desc: &Descriptor,
    t: Option<f64>,
    tol: f64,
    svg_out: Option<&Path>,
    json_out: Option<&Path>,
    horocycles: usize,
) -> Result<()> {
    let input = desc.build().map_err(|e| anyhow!("{e}"))?;
    let pm = input.piecewise().map_err(|e| anyhow!("{e}"))?;
    let (jumps, action) = pm.distributional_action().map_err(|e| anyhow!("{e}"))?;
    let ce = completed_epstein(pm).map_err(|e| anyhow!("{e}"))?;
    let eta = ce.signed_area_eta(4096).map_err(|e| anyhow!("{e}"))?;
    println!("jumps               {jumps:?}");
    println!("action (sum)        {action:.15}");
    println!("completed length    {:.15}", ce.total_signed_length());
    println!("area (Gauss-Bonnet) {:.15}", ce.signed_area_gauss_bonnet());
    println!("area (eta oracle)   {eta:.15}");
    println!("beta sum - 2 pi     {:.3e}", ce.beta_sum() - TAU);
    let d_len = (ce.total_signed_length() - action).abs();
    let d_area = (ce.signed_area_gauss_bonnet() + action).abs();
    let d_eta = (eta + action).abs();
    let d_beta = (ce.beta_sum() - TAU).abs();

    let mut doc = SvgDoc::new();
    for k in 0..horocycles {
        let th = TAU * k as f64 / horocycles.max(1) as f64;
        let jet = pm.jet(th);
        if let Ok(hc) = Horocycle::new(Complex64::from_polar(1.0, jet.value), 1.0 / jet.d1) {
            doc.circle_path(hc.euclidean_center(), hc.euclidean_radius(), "#4477cc", 0.7);
        }
    }
    for arc in &ce.arcs {
        doc.polyline(&arc.samples(256), false, "#dd6600", 1.6);
    }
    for p in &ce.points {
        doc.marker(*p, 2.5, "#dd6600");
    }

    let mut scaled_report = json!(null);
    if let Some(t) = t {
        let sc = scaled_completed_epstein(pm, t, 512).map_err(|e| anyhow!("{e}"))?;
        let a_gb = sc.signed_area_gauss_bonnet();
        let a_eta = sc.signed_area_eta(2048).map_err(|e| anyhow!("{e}"))?;
        println!(
            "scaled t = {t}: arcs = {}, L = {:.12}, A = {:.12} (eta {:.12}), junction defect {:.3e}",
            sc.arcs.len(),
            sc.total_signed_length(),
            a_gb,
            a_eta,
            sc.max_junction_angle_defect()
        );
        for arc in &sc.arcs {
            doc.polyline(&arc.samples(256), false, "#119944", 1.2);
        }
        scaled_report = json!({
            "t": t,
            "arcs": sc.arcs.len(),
            "length": sc.total_signed_length(),
            "area_gauss_bonnet": a_gb,
            "area_eta": a_eta,
            "junction_defect": sc.max_junction_angle_defect(),
        });
    }
    println!("svg paths           {}", doc.path_count());
    if let Some(p) = svg_out {
        std::fs::write(p, doc.finish()).with_context(|| format!("writing {}", p.display()))?;
    }
    write_json(
        json_out,
        &json!({
            "jumps": jumps,
            "action": action,
            "length": ce.total_signed_length(),
            "area_gauss_bonnet": ce.signed_area_gauss_bonnet(),
            "area_eta": eta,
            "beta_sum": ce.beta_sum(),
            "scaled": scaled_report,
        }),
    )?;
    if d_len > tol || d_area > tol || d_eta > 1e-5 || d_beta > 1e-12 {
        return Err(ToleranceBreach(format!(
            "piecewise identities: length {d_len:.2e}, area {d_area:.2e}, eta {d_eta:.2e}, beta {d_beta:.2e}"
        ))
        .into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_nfold(
    desc: &Descriptor,
    n: u32,
    grid: usize,
    tol: f64,
    svg_out: Option<&Path>,
    csv_out: Option<&Path>,
    horocycles: usize,
    json_out: Option<&Path>,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let phi = diffeo_of(desc)?;
    let action = action_nfold(&phi, n, &grid).map_err(|e| anyhow!("{e}"))?;
    let cover = phi.nfold_cover(n).map_err(|e| anyhow!("{e}"))?;
    let curve = EpsteinCurve::from_cover(&cover, &grid).map_err(|e| anyhow!("{e}"))?;
    let length = curve.total_length();
    let area = curve.signed_area_gauss_bonnet();
    let r1 = (length - action).abs();
    let r2 = (-area - TAU * (n as f64 - 1.0) - action).abs();
    println!("n                   {n}");
    println!("orbit action        {action:.15}");
    println!("cover curve length  {length:.15}");
    println!("cover curve area    {area:.15}");
    println!("identity residuals  {r1:.3e}, {r2:.3e}");
    if let Some(p) = csv_out {
        std::fs::write(p, csvio::frames_to_csv(&curve))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = svg_out {
        let mut doc = SvgDoc::new();
        // horocycles of the multi-valued metric, sampled along the source circle
        for k in 0..horocycles {
            let th = TAU * k as f64 / horocycles.max(1) as f64;
            let j = cover.jet(th);
            if let Ok(hc) = Horocycle::new(Complex64::from_polar(1.0, j.value), 1.0 / j.d1) {
                doc.circle_path(hc.euclidean_center(), hc.euclidean_radius(), "#4477cc", 0.7);
            }
        }
        let pts: Vec<Complex64> = curve.frames().iter().map(|f| f.point).collect();
        doc.polyline(&pts, true, "#dd6600", 1.6);
        println!("svg paths           {}", doc.path_count());
        std::fs::write(p, doc.finish()).with_context(|| format!("writing {}", p.display()))?;
    }
    write_json(
        json_out,
        &json!({"n": n, "action": action, "length": length, "area": area}),
    )?;
    if r1 > tol || r2 > tol {
        return Err(ToleranceBreach(format!("n-fold identities off by {r1:.3e}/{r2:.3e}")).into());
    }
    Ok(())
}

fn cmd_dual(desc: &Descriptor, grid: usize, tol: f64, json_out: Option<&Path>) -> Result<()> {
    let grid = make_grid(grid)?;
    let subject = subject_of(desc)?;
    let curve = EpsteinCurve::from_metric(subject.metric(), &grid);
    let d = dual_quantities(&curve).map_err(|e| anyhow!("{e}"))?;
    let action = action_direct(subject.diffeo(), &grid).map_err(|e| anyhow!("{e}"))?;
    let density = dual_density_residual(&curve).map_err(|e| anyhow!("{e}"))?;
    let r1 = (d.k_perp - action).abs();
    let r2 = (TAU - d.l_perp - action).abs();
    println!("action              {action:.15}");
    println!("dual curvature      {:.15}", d.k_perp);
    println!("dual length         {:.15}", d.l_perp);
    println!("identity residuals  {r1:.3e}, {r2:.3e}");
    println!("density FD residual {density:.3e}");
    write_json(
        json_out,
        &json!({"action": action, "k_perp": d.k_perp, "l_perp": d.l_perp, "density_residual": density}),
    )?;
    if r1 > tol || r2 > tol || density > 1e-5 {
        return Err(ToleranceBreach(format!(
            "dual identities off by {r1:.3e}/{r2:.3e}, density {density:.3e}"
        ))
        .into());
    }
    Ok(())
}

fn cmd_distort(
    desc: &Descriptor,
    kmax: u32,
    grid: usize,
    tol: f64,
    area: bool,
    json_out: Option<&Path>,
) -> Result<()> {
    let grid = make_grid(grid)?;
    let map: AnalyticCircleMap = desc.build_analytic().map_err(|e| anyhow!("{e}"))?;
    let mut table = Vec::new();
    for k in 3..=kmax {
        let r = 1.0 - 0.5f64.powi(k as i32);
        let d = epstein::distortion::distortion_integral(&map, r, &grid)
            .map_err(|e| anyhow!("{e}"))?;
        println!("k = {k:>2}, r = {r:.6}: D(r) = {d:.12}");
        table.push(d);
    }
    let lim =
        epstein::distortion::distortion_limit(&map, kmax, &grid).map_err(|e| anyhow!("{e}"))?;
    println!(
        "extrapolated limit  {:.12} (est. error {:.2e})",
        lim.value, lim.error_estimate
    );
    let mut comparison = json!(null);
    let mut breach = None;
    if map.degree() == 1 {
        let action = action_direct(&map.boundary_diffeo().map_err(|e| anyhow!("{e}"))?, &grid)
            .map_err(|e| anyhow!("{e}"))?;
        let expected = -(2.0 / 3.0) * action;
        let gap = (lim.value - expected).abs();
        println!("-(2/3) action       {expected:.12} (gap {gap:.3e})");
        comparison = json!({"action": action, "expected": expected, "gap": gap});
        if gap > tol {
            breach = Some(format!("distortion limit off by {gap:.3e}"));
        }
        if area {
            let a = epstein::distortion::area_distortion(&map, kmax, &grid)
                .map_err(|e| anyhow!("{e}"))?;
            let agap = (a.value - expected).abs();
            println!("area-version limit  {:.12} (gap {agap:.3e})", a.value);
            if agap > tol {
                breach = Some(format!("area distortion off by {agap:.3e}"));
            }
        }
    } else if area {
        anyhow::bail!("the area version needs an injective (degree-1) boundary map");
    }
    write_json(
        json_out,
        &json!({"d_values": table, "limit": lim.value, "error_estimate": lim.error_estimate, "comparison": comparison}),
    )?;
    if let Some(b) = breach {
        return Err(ToleranceBreach(b).into());
    }
    Ok(())
}

fn cmd_run(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    let s = Scenario::parse(&text)?;
    let desc = match (&s.input, &s.input_path) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => load(Path::new(p))?,
        _ => unreachable!("validated"),
    };
    let grid = s.grid.unwrap_or(1024);
    let svg = s.svg.as_ref().map(PathBuf::from);
    let csv = s.csv.as_ref().map(PathBuf::from);
    let json = s.json.as_ref().map(PathBuf::from);
    let single_t = |spec: &Option<String>| -> Result<Option<f64>> {
        Ok(match spec {
            Some(x) => Some(
                *parse_t_values(x)?
                    .first()
                    .context("empty scale range")?,
            ),
            None => None,
        })
    };
    match s.op.as_str() {
        "action" => cmd_action(
            &desc,
            s.grid.unwrap_or(2048),
            s.tol.unwrap_or(1e-7),
            None,
            json.as_deref(),
        ),
        "epstein" => cmd_epstein(
            &desc,
            grid,
            single_t(&s.t)?.unwrap_or(0.0),
            svg.as_deref(),
            csv.as_deref(),
            s.horocycles.unwrap_or(80),
            s.stroke_width.unwrap_or(1.6),
        ),
        "foliate" => cmd_foliate(
            &desc,
            grid,
            s.t.as_deref().unwrap_or("0:5:0.1"),
            svg.as_deref(),
            s.horocycles.unwrap_or(0),
            s.stroke_width.unwrap_or(0.9),
        ),
        "excess" => cmd_excess(
            &desc,
            s.grid.unwrap_or(2048),
            s.t.as_deref().unwrap_or("3:6:1"),
            s.tol.unwrap_or(1e-5),
            json.as_deref(),
        ),
        "bilocal" => cmd_bilocal(
            &desc,
            s.u.context("bilocal scenario needs u")?,
            s.v.context("bilocal scenario needs v")?,
            s.tol.unwrap_or(1e-9),
            None,
            csv.as_deref(),
            json.as_deref(),
        ),
        "reconstruct" => cmd_reconstruct(
            &desc,
            s.depth.unwrap_or(5),
            None,
            None,
            s.tol.unwrap_or(1e-7),
            json.as_deref(),
        ),
        "piecewise" => cmd_piecewise(
            &desc,
            single_t(&s.t)?,
            s.tol.unwrap_or(1e-9),
            svg.as_deref(),
            json.as_deref(),
            s.horocycles.unwrap_or(80),
        ),
        "nfold" => cmd_nfold(
            &desc,
            s.n.context("nfold scenario needs n")?,
            s.grid.unwrap_or(2048),
            s.tol.unwrap_or(1e-6),
            svg.as_deref(),
            csv.as_deref(),
            s.horocycles.unwrap_or(0),
            json.as_deref(),
        ),
        "dual" => cmd_dual(
            &desc,
            s.grid.unwrap_or(2048),
            s.tol.unwrap_or(1e-7),
            json.as_deref(),
        ),
        "distort" => cmd_distort(
            &desc,
            s.kmax.unwrap_or(10),
            grid,
            s.tol.unwrap_or(1e-3),
            s.area,
            json.as_deref(),
        ),
        other => anyhow::bail!("unknown op {other:?}"),
    }
}
