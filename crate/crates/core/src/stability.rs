//! Stability tests, area bounds and local-flatness diagnostics.
//!
//! A domain is delta-stable when `(1 - delta) int |A|^2 phi^2 <= int
//! |grad phi|^2` for all test functions vanishing on its boundary,
//! equivalently when the principal Dirichlet eigenvalue of
//! `-Delta - (1 - delta)|A|^2` is nonnegative. The log-substitution
//! certificate gives a sufficient pointwise criterion from a positive
//! supersolution. Geodesic balls feed an area-vs-curvature comparison
//! bound and four graphicality diagnostics.

use serde::{Deserialize, Serialize};

use crate::dirichlet::mask_connected;
use crate::eigen::principal_stability_eigen;
use crate::error::{Error, Result};
use crate::forms::compute_forms_and_shape;
use crate::geodesic::{geodesic_distance, GeodesicField, STRETCH};
use crate::grid::ScalarField;
use crate::mesh::SurfaceMesh;
use crate::operators::{laplace_beltrami, OperatorContext};
use crate::vec3;

pub const EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub delta: f64,
    /// Principal Dirichlet eigenvalue of `-Delta - (1-delta)|A|^2`.
    pub lambda1: f64,
    pub stable: bool,
    pub domain_nodes: usize,
}

/// Spectral delta-stability test on a connected node mask.
pub fn delta_stability_test(
    ctx: &OperatorContext,
    mask: &[bool],
    delta: f64,
) -> Result<StabilityReport> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidDomain(format!("delta {delta} outside [0, 1)")));
    }
    let count = mask.iter().filter(|&&m| m).count();
    if count < 9 {
        return Err(Error::InvalidDomain(format!("domain has {count} nodes, need at least 9")));
    }
    if !mask_connected(&ctx.grid, mask) {
        return Err(Error::InvalidDomain("domain mask is disconnected".into()));
    }
    let eig = principal_stability_eigen(ctx, mask, delta, 1e-9)?;
    Ok(StabilityReport {
        delta,
        lambda1: eig.value,
        stable: eig.value >= -EIG_TOL,
        domain_nodes: count,
    })
}

/// Log-substitution certificate: a positive `u` with
/// `Delta u + (1 - delta)|A|^2 u <= 0` on the domain certifies
/// delta-stability. Pointwise check with tolerance `1e-8 ||u||_inf`.
pub fn log_certificate_test(
    ctx: &OperatorContext,
    u: &ScalarField,
    mask: &[bool],
    delta: f64,
) -> Result<bool> {
    if !u.grid.compatible(&ctx.grid) || mask.len() != ctx.grid.node_count() {
        return Err(Error::GridMismatch);
    }
    for k in 0..mask.len() {
        if mask[k] && u.values()[k] <= 0.0 {
            let (i, j) = ctx.grid.ij(k);
            return Err(Error::NonPositive(format!(
                "certificate function is {} at node ({i}, {j})",
                u.values()[k]
            )));
        }
    }
    let cert_tol = 1e-8 * u.sup_norm();
    let lu = laplace_beltrami(ctx, u)?;
    let g = ctx.grid;
    for (i, j) in g.nodes() {
        let k = g.idx(i, j);
        if mask[k] {
            let v = lu.at(i, j) + (1.0 - delta) * ctx.shape.a2[k] * u.at(i, j);
            if v > cert_tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BishopCheck {
    pub radius: f64,
    pub area: f64,
    pub bound: f64,
    pub k_low: f64,
    pub ok: bool,
}

/// Comparison volume `V(K, R)`: hyperbolic-disk area for `K < 0`, flat
/// `pi R^2` otherwise (flat area is a valid lower-bound comparison when
/// the curvature floor is positive).
pub fn comparison_volume(k_low: f64, r: f64) -> f64 {
    if k_low < 0.0 {
        let q = (-k_low).sqrt();
        2.0 * std::f64::consts::PI * ((q * r).cosh() - 1.0) / (-k_low)
    } else {
        std::f64::consts::PI * r * r
    }
}

/// Geodesic-ball area against the comparison bound for the mesh's
/// curvature floor, with `3h/R` quadrature slack.
pub fn bishop_check(mesh: &SurfaceMesh, source: (usize, usize), r: f64) -> Result<BishopCheck> {
    if !(r > 0.0) {
        return Err(Error::InvalidDomain(format!("radius {r} must be positive")));
    }
    let field = geodesic_distance(mesh, source);
    let bd = field.boundary_distance();
    if bd <= r {
        return Err(Error::BallOverflow { radius: r, boundary_dist: bd });
    }
    let ctx = OperatorContext::from_mesh(mesh)?;
    let g = mesh.grid;
    let mut area = 0.0;
    for (i, j) in g.nodes() {
        if field.at(i, j) < r {
            area += ctx.area_weight(i, j);
        }
    }
    let k_low = ctx.shape.min_k();
    let bound = comparison_volume(k_low, r);
    let slack = 3.0 * g.max_spacing() / r;
    Ok(BishopCheck { radius: r, area, bound, k_low, ok: area <= bound * (1.0 + slack) })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatnessDiagnostics {
    pub s: f64,
    /// `sup |A|` over the radius-`s` ball.
    pub sup_a: f64,
    /// Whether the graphicality hypothesis `s sup|A| <= 1` held; when
    /// false the pass flags are advisory only.
    pub hypothesis_ok: bool,
    /// Grid slack added to every bound: `5 h`.
    pub slack: f64,
    pub normal_dev: f64,
    pub normal_dev_bound: f64,
    pub normal_ok: bool,
    pub chord_arc_min: f64,
    pub chord_arc_bound: f64,
    pub chord_arc_ok: bool,
    pub height_max: f64,
    pub height_bound: f64,
    pub height_ok: bool,
    pub proj_radius: f64,
    pub proj_radius_bound: f64,
    pub proj_ok: bool,
}

/// Four graphicality measurements on geodesic balls around `source`:
/// normal deviation over `B_s` against `s sup|A|`, chord-arc ratio over
/// `B_2s` against `9/10`, height over the tangent plane on `B_t`
/// (`t = s/2`) against `t^2/s`, and the directional radius of the
/// tangent-plane projection against `sqrt(t^2 - t^4/s^2)`.
pub fn local_flatness_checks(
    mesh: &SurfaceMesh,
    source: (usize, usize),
    s: f64,
) -> Result<FlatnessDiagnostics> {
    if !(s > 0.0) {
        return Err(Error::InvalidDomain(format!("scale {s} must be positive")));
    }
    let field = geodesic_distance(mesh, source);
    let bd = field.boundary_distance();
    if bd <= 2.0 * s {
        return Err(Error::BallOverflow { radius: 2.0 * s, boundary_dist: bd });
    }
    let (_, shape) = compute_forms_and_shape(mesh)?;
    let g = mesh.grid;
    let h = g.max_spacing();
    let slack = 5.0 * h;
    let x0 = mesh.position(source.0, source.1);
    let n0 = mesh.normal(source.0, source.1);

    let mut sup_a = 0.0f64;
    let mut normal_dev = 0.0f64;
    let mut chord_arc_min = 1.0f64;
    let mut height_max = 0.0f64;
    let t = 0.5 * s;
    let mut in_small_ball = Vec::new();
    for (i, j) in g.nodes() {
        let d = field.at(i, j);
        if d <= s {
            let k = g.idx(i, j);
            sup_a = sup_a.max(shape.a2[k].max(0.0).sqrt());
            let cosang = vec3::dot(n0, mesh.normal(i, j)).clamp(-1.0, 1.0);
            normal_dev = normal_dev.max(cosang.acos());
        }
        if d <= 2.0 * s && d > 2.0 * h {
            let de = vec3::dist(x0, mesh.position(i, j));
            chord_arc_min = chord_arc_min.min(de / d);
        }
        if d <= t {
            height_max = height_max.max(vec3::dot(vec3::sub(mesh.position(i, j), x0), n0).abs());
            in_small_ball.push((i, j));
        }
    }

    // directional extent of the projection onto the tangent plane
    let e1 = pick_tangent(n0);
    let e2 = vec3::cross(n0, e1);
    let mut proj_radius = f64::INFINITY;
    let dirs = 16;
    for k in 0..dirs {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / dirs as f64;
        let (ca, sa) = (ang.cos(), ang.sin());
        let mut extent = 0.0f64;
        for &(i, j) in &in_small_ball {
            let d = vec3::sub(mesh.position(i, j), x0);
            let p = ca * vec3::dot(d, e1) + sa * vec3::dot(d, e2);
            extent = extent.max(p);
        }
        proj_radius = proj_radius.min(extent);
    }

    let normal_dev_bound = s * sup_a;
    let height_bound = t * t / s;
    let proj_radius_bound = (t * t - t.powi(4) / (s * s)).max(0.0).sqrt();
    Ok(FlatnessDiagnostics {
        s,
        sup_a,
        hypothesis_ok: s * sup_a <= 1.0,
        slack,
        normal_dev,
        normal_dev_bound,
        normal_ok: normal_dev <= normal_dev_bound + slack,
        chord_arc_min,
        chord_arc_bound: 0.9,
        chord_arc_ok: chord_arc_min >= 0.9 / STRETCH - slack,
        height_max,
        height_bound,
        height_ok: height_max <= height_bound + slack,
        proj_radius,
        proj_radius_bound,
        proj_ok: proj_radius >= proj_radius_bound - slack,
    })
}

fn pick_tangent(n: vec3::Vec3) -> vec3::Vec3 {
    let trial = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t = vec3::sub(trial, vec3::scale(n, vec3::dot(trial, n)));
    vec3::normalized(t).expect("tangent direction")
}

/// Mask of the geodesic ball of radius `r`, clipped to interior nodes.
pub fn ball_mask_interior(field: &GeodesicField, r: f64) -> Vec<bool> {
    field
        .grid
        .nodes()
        .map(|(i, j)| field.at(i, j) < r && !field.grid.is_boundary(i, j))
        .collect()
}
