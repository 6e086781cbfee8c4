//! Subcommand implementations and artifact emission.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use helimorph::export::{
    iteration_csv_string, write_json, write_node_csv, write_obj, write_sheet_csv,
};
use helimorph::forms::compute_forms_and_shape;
use helimorph::geodesic::geodesic_distance;
use helimorph::grid::ScalarField;
use helimorph::mesh::{build_catenoid, build_helicoid, build_reference, normal_variation, SurfaceMesh};
use helimorph::multigraph::{detect, verify_certificate, MultigraphCertificate};
use helimorph::operators::OperatorContext;
use helimorph::rescale::rescale_mesh;
use helimorph::solver::{successive_approximation, SolveReport};
use helimorph::stability::{ball_mask_interior, delta_stability_test, StabilityReport};

use crate::config::{RunConfig, SurfaceSpec};

/// Exit classes: `Config` for rejected input, `Verdict` for a check
/// that ran and failed, `Runtime` for everything else.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

pub struct Verdict(pub bool);

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    tool_version: &'a str,
    unix_time_s: u64,
}

fn emit_common(dir: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output dir {}", dir.display()))?;
    write_json(&dir.join("resolved_config.json"), cfg)?;
    let meta = Metadata {
        command,
        tool_version: env!("CARGO_PKG_VERSION"),
        unix_time_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    write_json(&dir.join("metadata.json"), &meta)?;
    Ok(())
}

fn build_surface(cfg: &RunConfig) -> Result<SurfaceMesh> {
    let grid = cfg.solver.grid;
    let mesh = match &cfg.surface {
        SurfaceSpec::Helicoid => build_helicoid(grid)?,
        SurfaceSpec::Catenoid => build_catenoid(grid)?,
        SurfaceSpec::Reference { kind, radius } => build_reference(*kind, *radius, grid)?,
    };
    Ok(mesh)
}

#[derive(Serialize)]
struct BuildSummary {
    command: &'static str,
    node_count: usize,
    max_abs_h: f64,
    gauss_residual_max: f64,
    orientation_consistent: bool,
}

pub fn build(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "build-helicoid", cfg)?;
    let mesh = build_surface(cfg)?;
    let (_, shape) = compute_forms_and_shape(&mesh)?;
    write_obj(&dir.join("mesh.obj"), &mesh)?;
    write_node_csv(&dir.join("nodes.csv"), &mesh, &shape, None)?;
    let summary = BuildSummary {
        command: "build-helicoid",
        node_count: mesh.grid.node_count(),
        max_abs_h: shape.max_h(),
        gauss_residual_max: shape.gauss_residual_max(2),
        orientation_consistent: mesh.orientation_consistent(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(summary.orientation_consistent))
}

#[derive(Serialize)]
struct PerturbSummary {
    command: &'static str,
    converged: bool,
    embedded: bool,
    iterations: usize,
    final_residual: f64,
    sup_u: f64,
    epsilon_max: Option<f64>,
    norm_ladder_ok: bool,
}

fn solve(cfg: &RunConfig) -> Result<(SurfaceMesh, ScalarField, SolveReport)> {
    let mesh = build_surface(cfg)?;
    let (u, report) = successive_approximation(&mesh, &cfg.solver)?;
    Ok((mesh, u, report))
}

pub fn perturb(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "perturb", cfg)?;
    let (mesh, u, report) = solve(cfg)?;
    let perturbed = normal_variation(&mesh, &u)?;
    let (_, shape) = compute_forms_and_shape(&perturbed)?;
    write_obj(&dir.join("perturbed.obj"), &perturbed)?;
    write_node_csv(&dir.join("nodes.csv"), &perturbed, &shape, Some(&u))?;
    std::fs::write(&dir.join("iterations.csv"), iteration_csv_string(&report.iterations))?;
    write_json(&dir.join("solve_report.json"), &report)?;
    let summary = PerturbSummary {
        command: "perturb",
        converged: report.converged,
        embedded: report.embedded,
        iterations: report.iterations.len(),
        final_residual: report.final_residual,
        sup_u: u.sup_norm(),
        epsilon_max: report.epsilon_max,
        norm_ladder_ok: report.norm_ladder_ok,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(report.converged))
}

#[derive(Serialize)]
struct AnalyzeSummary {
    command: &'static str,
    gauss_residual_max: f64,
    gauss_tol: f64,
    gauss_ok: bool,
    max_abs_h: f64,
    interior_h_min: f64,
    interior_h_max: f64,
}

pub fn analyze(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "analyze", cfg)?;
    let mesh = build_surface(cfg)?;
    let (_, shape) = compute_forms_and_shape(&mesh)?;
    write_node_csv(&dir.join("nodes.csv"), &mesh, &shape, None)?;
    let g = mesh.grid;
    let (mut h_min, mut h_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, j) in g.nodes() {
        if g.boundary_depth(i, j) >= 1 {
            let h = shape.h[g.idx(i, j)];
            h_min = h_min.min(h);
            h_max = h_max.max(h);
        }
    }
    let gauss = shape.gauss_residual_max(2);
    let summary = AnalyzeSummary {
        command: "analyze",
        gauss_residual_max: gauss,
        gauss_tol: cfg.analyze.gauss_tol,
        gauss_ok: gauss <= cfg.analyze.gauss_tol,
        max_abs_h: shape.max_h(),
        interior_h_min: h_min,
        interior_h_max: h_max,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(summary.gauss_ok))
}

#[derive(Serialize)]
struct ScanCell {
    delta: f64,
    radius: f64,
    report: Option<StabilityReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ScanSummary {
    command: &'static str,
    center: (usize, usize),
    cells: Vec<ScanCell>,
    all_evaluated_stable: bool,
}

pub fn stability_scan(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "stability-scan", cfg)?;
    let mesh = build_surface(cfg)?;
    let ctx = OperatorContext::from_mesh(&mesh)?;
    let g = mesh.grid;
    let center = cfg.stability.center.unwrap_or((g.n_s / 2, g.n_t / 2));
    let field = geodesic_distance(&mesh, center);
    let mut cells = Vec::new();
    let mut all_stable = true;
    for &radius in &cfg.stability.radii {
        let mask = ball_mask_interior(&field, radius);
        for &delta in &cfg.stability.deltas {
            let cell = match delta_stability_test(&ctx, &mask, delta) {
                Ok(rep) => {
                    all_stable &= rep.stable;
                    ScanCell { delta, radius, report: Some(rep), error: None }
                }
                Err(e) => ScanCell { delta, radius, report: None, error: Some(e.to_string()) },
            };
            cells.push(cell);
        }
    }
    let summary =
        ScanSummary { command: "stability-scan", center, cells, all_evaluated_stable: all_stable };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(true))
}

#[derive(Serialize)]
struct DetectSummary {
    command: &'static str,
    n: usize,
    omega: f64,
    epsilon: f64,
    perturb_first: bool,
    present: bool,
    verified: bool,
    r_bar: Option<f64>,
    grad_bound: Option<f64>,
    dist_to_origin: Option<f64>,
}

pub fn detect_multigraph(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "detect-multigraph", cfg)?;
    let mesh = build_surface(cfg)?;
    let target = if cfg.multigraph.perturb_first {
        let (_, u, _) = solve(cfg)?;
        normal_variation(&mesh, &u)?
    } else {
        mesh
    };
    let mg = &cfg.multigraph;
    let cert: Option<MultigraphCertificate> = detect(&target, mg.n, mg.omega, mg.epsilon)?;
    let (present, verified) = match &cert {
        Some(c) => {
            write_json(&dir.join("certificate.json"), c)?;
            write_sheet_csv(&dir.join("sheet.csv"), &c.samples)?;
            (true, verify_certificate(&target, c))
        }
        None => (false, false),
    };
    let summary = DetectSummary {
        command: "detect-multigraph",
        n: mg.n,
        omega: mg.omega,
        epsilon: mg.epsilon,
        perturb_first: mg.perturb_first,
        present,
        verified,
        r_bar: cert.as_ref().map(|c| c.r_bar),
        grad_bound: cert.as_ref().map(|c| c.grad_bound),
        dist_to_origin: cert.as_ref().map(|c| c.dist_to_origin),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(present && verified))
}

#[derive(Serialize)]
struct RescaleSummary {
    command: &'static str,
    factor: f64,
    max_h_law_error: f64,
    max_a2_law_error: f64,
    law_bound: f64,
    laws_ok: bool,
}

pub fn rescale(cfg: &RunConfig, dir: &Path) -> Result<Verdict> {
    emit_common(dir, "rescale", cfg)?;
    let mesh = build_surface(cfg)?;
    let r = cfg.rescale.factor;
    let scaled = rescale_mesh(&mesh, r)?;
    let (_, s0) = compute_forms_and_shape(&mesh)?;
    let (_, sr) = compute_forms_and_shape(&scaled)?;
    write_obj(&dir.join("rescaled.obj"), &scaled)?;
    write_node_csv(&dir.join("nodes.csv"), &scaled, &sr, None)?;
    let g = mesh.grid;
    let (mut h_err, mut a2_err) = (0.0f64, 0.0f64);
    for (i, j) in g.nodes() {
        if g.boundary_depth(i, j) >= 2 {
            let k = g.idx(i, j);
            h_err = h_err.max((sr.h[k] - s0.h[k] / r).abs());
            a2_err = a2_err.max((sr.a2[k] - s0.a2[k] / (r * r)).abs());
        }
    }
    let h = g.max_spacing();
    let bound = cfg.rescale.law_tol_h2 * h * h;
    let summary = RescaleSummary {
        command: "rescale",
        factor: r,
        max_h_law_error: h_err,
        max_a2_law_error: a2_err,
        law_bound: bound,
        laws_ok: h_err <= bound && a2_err <= bound,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Verdict(summary.laws_ok))
}

#[derive(Serialize)]
struct VerifySummary {
    command: &'static str,
    verified_dir: PathBuf,
    original_command: String,
    summary_reproduced: bool,
    certificate_reverified: Option<bool>,
}

/// Re-run the stored resolved config for the command recorded in the
/// directory's metadata and compare the regenerated summary byte for
/// byte; additionally re-verify a stored multigraph certificate against
/// a freshly built surface.
pub fn verify(dir: &Path, out: &Path) -> Result<Verdict> {
    let cfg_text = std::fs::read_to_string(dir.join("resolved_config.json"))
        .with_context(|| format!("no resolved_config.json in {}", dir.display()))?;
    let cfg: RunConfig = serde_json::from_str(&cfg_text)
        .with_context(|| "stored resolved config does not parse")?;
    let meta_text = std::fs::read_to_string(dir.join("metadata.json"))
        .with_context(|| format!("no metadata.json in {}", dir.display()))?;
    let meta: serde_json::Value = serde_json::from_str(&meta_text)?;
    let command = meta["command"].as_str().unwrap_or("").to_string();

    let tmp = tempdir_in(out)?;
    let rerun_dir = tmp.as_path();
    match command.as_str() {
        "build-helicoid" => build(&cfg, rerun_dir)?,
        "perturb" => perturb(&cfg, rerun_dir)?,
        "analyze" => analyze(&cfg, rerun_dir)?,
        "stability-scan" => stability_scan(&cfg, rerun_dir)?,
        "detect-multigraph" => detect_multigraph(&cfg, rerun_dir)?,
        "rescale" => rescale(&cfg, rerun_dir)?,
        other => anyhow::bail!("metadata names unknown command {other:?}"),
    };
    let old = std::fs::read(dir.join("summary.json"))
        .with_context(|| format!("no summary.json in {}", dir.display()))?;
    let new = std::fs::read(rerun_dir.join("summary.json"))?;
    let summary_reproduced = old == new;

    let cert_path = dir.join("certificate.json");
    let certificate_reverified = if cert_path.exists() {
        let cert: MultigraphCertificate =
            serde_json::from_str(&std::fs::read_to_string(&cert_path)?)?;
        let mesh = build_surface(&cfg)?;
        let target = if cfg.multigraph.perturb_first {
            let (_, u, _) = solve(&cfg)?;
            normal_variation(&mesh, &u)?
        } else {
            mesh
        };
        Some(verify_certificate(&target, &cert))
    } else {
        None
    };

    std::fs::create_dir_all(out)?;
    let summary = VerifySummary {
        command: "verify",
        verified_dir: dir.to_path_buf(),
        original_command: command,
        summary_reproduced,
        certificate_reverified,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(Verdict(summary_reproduced && certificate_reverified.unwrap_or(true)))
}

struct TempDir(PathBuf);

impl TempDir {
    fn as_path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn tempdir_in(out: &Path) -> Result<TempDir> {
    let d = out.join(format!(".verify-rerun-{}", std::process::id()));
    if d.exists() {
        std::fs::remove_dir_all(&d)?;
    }
    std::fs::create_dir_all(&d)?;
    Ok(TempDir(d))
}
