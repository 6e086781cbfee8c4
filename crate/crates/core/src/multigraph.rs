//! N-valued graph detection and certification.
//!
//! An N-valued graph is a single-valued height function over the
//! universal cover of a planar annulus, restricted to `|theta| <= N pi`.
//! Detection rotates a candidate axis to `e3`, unwraps the polar angle
//! continuously over each connected charted component, then scans inner
//! radii over a geometric ladder for the first annulus
//! `[R, omega R] x [-N pi, N pi]` that is fully covered by single-valued
//! samples with small gradient and is intrinsically close to the base
//! point.
//!
//! Sampling uses cell-midpoint grids and piecewise-linear interpolation
//! over the chart triangles, with a bucket index for point location.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::compute_forms_and_shape;
use crate::geodesic::geodesic_distance;
use crate::grid::ParamGrid;
use crate::mesh::SurfaceMesh;
use crate::vec3::{self, Vec3};

/// Nodes closer to the axis than this are left uncharted.
pub const RHO_FLOOR: f64 = 1e-6;
/// Geometric ratio of the inner-radius ladder.
pub const LADDER_RATIO: f64 = 1.1;

/// Continuous polar chart of a mesh around an axis.
#[derive(Debug, Clone)]
pub struct CoverChart {
    pub grid: ParamGrid,
    pub rho: Vec<f64>,
    /// Unwrapped angle, real-valued (not mod 2 pi).
    pub theta: Vec<f64>,
    pub z: Vec<f64>,
    /// Connected charted component of each node, if charted.
    pub component: Vec<Option<usize>>,
    pub n_components: usize,
    pub excluded: Vec<(usize, usize)>,
}

fn wrap_to_pi(d: f64) -> f64 {
    d - 2.0 * std::f64::consts::PI * (d / (2.0 * std::f64::consts::PI)).round()
}

/// Rotate `axis` to `e3` and unwrap `(rho, theta, z)` coordinates by
/// breadth-first propagation, starting each component at its node
/// nearest the origin.
pub fn unwrap_to_cover(mesh: &SurfaceMesh, axis: Vec3) -> Result<CoverChart> {
    unwrap_with_floor(mesh, axis, RHO_FLOOR)
}

/// [`unwrap_to_cover`] with an explicit exclusion radius around the
/// axis.
pub fn unwrap_with_floor(mesh: &SurfaceMesh, axis: Vec3, floor: f64) -> Result<CoverChart> {
    let g = mesh.grid;
    let n = g.node_count();
    let rot = vec3::rotation_to_e3(axis);
    let mut rho = vec![0.0; n];
    let mut theta_raw = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut charted = vec![false; n];
    let mut excluded = Vec::new();
    for (i, j) in g.nodes() {
        let p = vec3::mat_apply(&rot, mesh.position(i, j));
        let k = g.idx(i, j);
        rho[k] = p[0].hypot(p[1]);
        z[k] = p[2];
        theta_raw[k] = p[1].atan2(p[0]);
        if rho[k] >= floor {
            charted[k] = true;
        } else {
            excluded.push((i, j));
        }
    }

    let mut theta = vec![0.0; n];
    let mut component = vec![None; n];
    let mut n_components = 0usize;
    let neighbors = |k: usize| -> Vec<usize> {
        let (i, j) = g.ij(k);
        let mut out = Vec::with_capacity(4);
        if i > 0 {
            out.push(g.idx(i - 1, j));
        }
        if i + 1 < g.n_s {
            out.push(g.idx(i + 1, j));
        }
        if j > 0 {
            out.push(g.idx(i, j - 1));
        }
        if j + 1 < g.n_t {
            out.push(g.idx(i, j + 1));
        }
        out
    };

    for seed in 0..n {
        if !charted[seed] || component[seed].is_some() {
            continue;
        }
        // gather the component, then restart BFS from its node nearest
        // the origin for a deterministic unwrap root
        let mut members = Vec::new();
        let mut stack = vec![seed];
        component[seed] = Some(n_components);
        while let Some(k) = stack.pop() {
            members.push(k);
            for nb in neighbors(k) {
                if charted[nb] && component[nb].is_none() {
                    component[nb] = Some(n_components);
                    stack.push(nb);
                }
            }
        }
        let root = *members
            .iter()
            .min_by(|&&a, &&b| {
                let da = rho[a].hypot(z[a]);
                let db = rho[b].hypot(z[b]);
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            })
            .unwrap();
        theta[root] = theta_raw[root];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(k) = queue.pop_front() {
            for nb in neighbors(k) {
                if component[nb] == Some(n_components) && !seen[nb] {
                    let d = wrap_to_pi(theta_raw[nb] - theta_raw[k]);
                    theta[nb] = theta[k] + d;
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        n_components += 1;
    }

    // cycle consistency: every charted edge must telescope
    for k in 0..n {
        if component[k].is_none() {
            continue;
        }
        for nb in neighbors(k) {
            if nb > k && component[nb] == component[k] {
                let d = theta[nb] - theta[k];
                let raw = wrap_to_pi(theta_raw[nb] - theta_raw[k]);
                if (d - raw).abs() > 1e-9 {
                    let (i, j) = g.ij(k);
                    return Err(Error::ChartError(format!(
                        "theta increments do not telescope near node ({i}, {j}): {} vs {}",
                        d, raw
                    )));
                }
                if d.abs() >= std::f64::consts::PI {
                    let (i, j) = g.ij(k);
                    return Err(Error::ChartError(format!(
                        "theta jump {} >= pi at node ({i}, {j})",
                        d.abs()
                    )));
                }
            }
        }
    }

    Ok(CoverChart { grid: g, rho, theta, z, component, n_components, excluded })
}

/// Unwrap with the smallest exclusion radius in the geometric ladder
/// `RHO_FLOOR * 4^k` that yields a consistent chart. Perturbed meshes
/// can carry near-axis nodes whose angle is unstable; growing the
/// excluded disk restores a well-defined cover without touching the
/// annulus under certification.
pub fn unwrap_adaptive(mesh: &SurfaceMesh, axis: Vec3) -> Result<CoverChart> {
    let max_rho = mesh
        .positions()
        .iter()
        .map(|&p| vec3::norm(p))
        .fold(0.0f64, f64::max);
    let mut floor = RHO_FLOOR;
    loop {
        match unwrap_with_floor(mesh, axis, floor) {
            Ok(c) => return Ok(c),
            Err(e) => {
                floor *= 4.0;
                if floor > max_rho {
                    return Err(e);
                }
            }
        }
    }
}

/// Midpoint sample grid of the sheet over
/// `[r_bar, omega r_bar] x [-N pi, N pi]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheetSamples {
    pub n_rho: usize,
    pub n_theta: usize,
    pub rho0: f64,
    pub d_rho: f64,
    pub theta0: f64,
    pub d_theta: f64,
    /// Heights, rho index fastest.
    pub u: Vec<f64>,
}

impl SheetSamples {
    /// Radial samples sit on cell endpoints (the inner one exactly at
    /// `r_bar`, so the gradient law is measured at the annulus edge);
    /// angular samples sit on cell midpoints, which keeps them inside
    /// the charted hull when the theta span is exactly `2 N pi`.
    #[inline]
    pub fn rho_at(&self, r: usize) -> f64 {
        self.rho0 + r as f64 * self.d_rho
    }

    #[inline]
    pub fn theta_at(&self, t: usize) -> f64 {
        self.theta0 + (t as f64 + 0.5) * self.d_theta
    }

    #[inline]
    pub fn at(&self, r: usize, t: usize) -> f64 {
        self.u[t * self.n_rho + r]
    }

    /// Sup of `sqrt(u_rho^2 + (u_theta / rho)^2)` by finite differences
    /// on the sample grid.
    pub fn sup_gradient(&self) -> f64 {
        let mut sup = 0.0f64;
        for t in 0..self.n_theta {
            for r in 0..self.n_rho {
                let ur = if r == 0 {
                    (self.at(1, t) - self.at(0, t)) / self.d_rho
                } else if r == self.n_rho - 1 {
                    (self.at(r, t) - self.at(r - 1, t)) / self.d_rho
                } else {
                    (self.at(r + 1, t) - self.at(r - 1, t)) / (2.0 * self.d_rho)
                };
                let ut = if t == 0 {
                    (self.at(r, 1) - self.at(r, 0)) / self.d_theta
                } else if t == self.n_theta - 1 {
                    (self.at(r, t) - self.at(r, t - 1)) / self.d_theta
                } else {
                    (self.at(r, t + 1) - self.at(r, t - 1)) / (2.0 * self.d_theta)
                };
                let ang = ut / self.rho_at(r);
                sup = sup.max((ur * ur + ang * ang).sqrt());
            }
        }
        sup
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultigraphCertificate {
    pub axis: Vec3,
    pub n: usize,
    pub omega: f64,
    /// Requested gradient bound.
    pub epsilon: f64,
    pub r_bar: f64,
    /// Measured `sup |grad u|` over the sampled sheet.
    pub grad_bound: f64,
    /// Intrinsic distance from the base point to the sheet.
    pub dist_to_origin: f64,
    pub samples: SheetSamples,
}

/// Piecewise-linear interpolant over the chart triangles of one
/// component, with a bucket index over `(rho, theta)`.
struct SheetInterp {
    tris: Vec<[usize; 3]>,
    rho: Vec<f64>,
    theta: Vec<f64>,
    z: Vec<f64>,
    min_r: f64,
    min_t: f64,
    cell_r: f64,
    cell_t: f64,
    nb_r: usize,
    nb_t: usize,
    buckets: Vec<Vec<u32>>,
    pub max_rho: f64,
}

const SV_TOL: f64 = 1e-6;

impl SheetInterp {
    fn new(chart: &CoverChart, comp: usize) -> Option<Self> {
        let g = chart.grid;
        let mut tris = Vec::new();
        let in_comp = |i: usize, j: usize| chart.component[g.idx(i, j)] == Some(comp);
        for j in 0..g.n_t - 1 {
            for i in 0..g.n_s - 1 {
                if in_comp(i, j) && in_comp(i + 1, j) && in_comp(i, j + 1) && in_comp(i + 1, j + 1)
                {
                    let a = g.idx(i, j);
                    let b = g.idx(i + 1, j);
                    let c = g.idx(i, j + 1);
                    let d = g.idx(i + 1, j + 1);
                    tris.push([a, b, d]);
                    tris.push([a, d, c]);
                }
            }
        }
        if tris.is_empty() {
            return None;
        }
        let mut min_r = f64::INFINITY;
        let mut max_r = f64::NEG_INFINITY;
        let mut min_t = f64::INFINITY;
        let mut max_t = f64::NEG_INFINITY;
        for tri in &tris {
            for &v in tri {
                min_r = min_r.min(chart.rho[v]);
                max_r = max_r.max(chart.rho[v]);
                min_t = min_t.min(chart.theta[v]);
                max_t = max_t.max(chart.theta[v]);
            }
        }
        let nb_r = (tris.len() as f64).sqrt().ceil() as usize;
        let nb_t = nb_r;
        let cell_r = ((max_r - min_r) / nb_r as f64).max(1e-300);
        let cell_t = ((max_t - min_t) / nb_t as f64).max(1e-300);
        let mut buckets = vec![Vec::new(); nb_r * nb_t];
        let clampi = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        for (ti, tri) in tris.iter().enumerate() {
            let (mut r0, mut r1) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut t0, mut t1) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in tri {
                r0 = r0.min(chart.rho[v]);
                r1 = r1.max(chart.rho[v]);
                t0 = t0.min(chart.theta[v]);
                t1 = t1.max(chart.theta[v]);
            }
            let br0 = clampi((r0 - min_r) / cell_r, nb_r);
            let br1 = clampi((r1 - min_r) / cell_r, nb_r);
            let bt0 = clampi((t0 - min_t) / cell_t, nb_t);
            let bt1 = clampi((t1 - min_t) / cell_t, nb_t);
            for bt in bt0..=bt1 {
                for br in br0..=br1 {
                    buckets[bt * nb_r + br].push(ti as u32);
                }
            }
        }
        Some(Self {
            tris,
            rho: chart.rho.clone(),
            theta: chart.theta.clone(),
            z: chart.z.clone(),
            min_r,
            min_t,
            cell_r,
            cell_t,
            nb_r,
            nb_t,
            buckets,
            max_rho: max_r,
        })
    }

    /// Height at `(rho, theta)` if covered single-valuedly; `None` when
    /// uncovered, `Err` value flagged by returning NaN is avoided by
    /// the bool in the pair: `(value, multivalued)`.
    fn sample(&self, r: f64, t: f64) -> Option<(f64, bool)> {
        let br = ((r - self.min_r) / self.cell_r).floor();
        let bt = ((t - self.min_t) / self.cell_t).floor();
        if br < 0.0 || bt < 0.0 || br >= self.nb_r as f64 || bt >= self.nb_t as f64 {
            return None;
        }
        let bucket = &self.buckets[bt as usize * self.nb_r + br as usize];
        let mut value: Option<f64> = None;
        let mut multi = false;
        for &ti in bucket {
            let [a, b, c] = self.tris[ti as usize];
            let (xa, ya) = (self.rho[a], self.theta[a]);
            let (xb, yb) = (self.rho[b], self.theta[b]);
            let (xc, yc) = (self.rho[c], self.theta[c]);
            let det = (xb - xa) * (yc - ya) - (xc - xa) * (yb - ya);
            if det.abs() < 1e-300 {
                continue;
            }
            let l1 = ((r - xa) * (yc - ya) - (t - ya) * (xc - xa)) / det;
            let l2 = ((t - ya) * (xb - xa) - (r - xa) * (yb - ya)) / det;
            let l0 = 1.0 - l1 - l2;
            let tol = -1e-9;
            if l0 >= tol && l1 >= tol && l2 >= tol {
                let v = l0 * self.z[a] + l1 * self.z[b] + l2 * self.z[c];
                match value {
                    None => value = Some(v),
                    Some(prev) => {
                        if (prev - v).abs() > SV_TOL * (1.0 + prev.abs()) {
                            multi = true;
                        }
                    }
                }
            }
        }
        value.map(|v| (v, multi))
    }
}

fn component_theta_span(chart: &CoverChart, comp: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..chart.theta.len() {
        if chart.component[k] == Some(comp) {
            lo = lo.min(chart.theta[k]);
            hi = hi.max(chart.theta[k]);
        }
    }
    (lo, hi)
}

/// Smallest positive angular step between charted neighbors; sets the
/// sheet sampling resolution.
fn min_angular_step(chart: &CoverChart) -> f64 {
    let g = chart.grid;
    let mut step = f64::INFINITY;
    for (i, j) in g.nodes() {
        let k = g.idx(i, j);
        if chart.component[k].is_none() {
            continue;
        }
        let mut check = |kk: usize| {
            if chart.component[kk] == chart.component[k] {
                let d = (chart.theta[kk] - chart.theta[k]).abs();
                if d > 1e-12 {
                    step = step.min(d);
                }
            }
        };
        if i + 1 < g.n_s {
            check(g.idx(i + 1, j));
        }
        if j + 1 < g.n_t {
            check(g.idx(i, j + 1));
        }
    }
    step.clamp(1e-3, 0.5)
}

fn sample_sheet(
    interp: &SheetInterp,
    theta_center: f64,
    n: usize,
    r_bar: f64,
    omega: f64,
    h_s: f64,
    d_theta_target: f64,
) -> Option<SheetSamples> {
    let n_pi = n as f64 * std::f64::consts::PI;
    let width = (omega - 1.0) * r_bar;
    let n_rho = ((width / h_s).ceil() as usize).clamp(4, 1024) + 1;
    let n_theta = ((2.0 * n_pi / d_theta_target).ceil() as usize).clamp(8, 4096);
    let d_rho = width / (n_rho - 1) as f64;
    let d_theta = 2.0 * n_pi / n_theta as f64;
    let mut samples = SheetSamples {
        n_rho,
        n_theta,
        rho0: r_bar,
        d_rho,
        theta0: -n_pi,
        d_theta,
        u: vec![0.0; n_rho * n_theta],
    };
    for t in 0..n_theta {
        let th = samples.theta_at(t) + theta_center;
        for r in 0..n_rho {
            match interp.sample(samples.rho_at(r), th) {
                Some((v, false)) => samples.u[t * n_rho + r] = v,
                _ => return None,
            }
        }
    }
    Some(samples)
}

/// Candidate axes: normal and principal/tangent directions at the node
/// of maximal `|A|^2`, then an icosahedral direction sample with a
/// vertex at `e3` (6 vertex axes and 10 face axes), 21 in total.
pub fn candidate_axes(mesh: &SurfaceMesh) -> Vec<Vec3> {
    let mut axes: Vec<Vec3> = Vec::new();
    if let Ok((forms, shape)) = compute_forms_and_shape(mesh) {
        let g = mesh.grid;
        let mut kmax = 0usize;
        for k in 0..shape.a2.len() {
            if shape.a2[k] > shape.a2[kmax] {
                kmax = k;
            }
        }
        let (i, j) = g.ij(kmax);
        let n = mesh.normal(i, j);
        axes.push(n);
        // tangents from one-sided-safe finite differences
        let tang = crate::mesh::discrete_tangents(mesh);
        let xs = tang.0[kmax];
        let xt = tang.1[kmax];
        // shape operator in the (X_s, X_t) basis: I^-1 II
        let det = forms.det(kmax);
        let m00 = (forms.g1[kmax] * forms.e2[kmax] - forms.f1[kmax] * forms.f2[kmax]) / det;
        let m01 = (forms.g1[kmax] * forms.f2[kmax] - forms.f1[kmax] * forms.g2[kmax]) / det;
        let m10 = (forms.e1[kmax] * forms.f2[kmax] - forms.f1[kmax] * forms.e2[kmax]) / det;
        let m11 = (forms.e1[kmax] * forms.g2[kmax] - forms.f1[kmax] * forms.f2[kmax]) / det;
        let tr = m00 + m11;
        let disc = ((m00 - m11) * (m00 - m11) + 4.0 * m01 * m10).max(0.0).sqrt();
        for lam in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
            // eigenvector of [[m00, m01], [m10, m11]] for lam
            let (a, b) = if m01.abs() > 1e-14 {
                (m01, lam - m00)
            } else if m10.abs() > 1e-14 {
                (lam - m11, m10)
            } else {
                (1.0, 0.0)
            };
            let dir = vec3::add(vec3::scale(xs, a), vec3::scale(xt, b));
            if let Some(d) = vec3::normalized(dir) {
                axes.push(d);
            }
        }
        if let Some(d) = vec3::normalized(xs) {
            axes.push(d);
        }
        if let Some(d) = vec3::normalized(xt) {
            axes.push(d);
        }
    }

    // icosahedron with a vertex at e3
    let mut verts: Vec<Vec3> = vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let r5 = 5.0f64.sqrt();
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        verts.push([2.0 / r5 * a.cos(), 2.0 / r5 * a.sin(), 1.0 / r5]);
    }
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0 + std::f64::consts::PI / 5.0;
        verts.push([2.0 / r5 * a.cos(), 2.0 / r5 * a.sin(), -1.0 / r5]);
    }
    // 6 vertex axes: e3 first, then the upper ring
    axes.push(verts[0]);
    for k in 2..7 {
        axes.push(verts[k]);
    }
    // 10 face axes from mutually adjacent vertex triples, deduped by
    // antipodal symmetry
    let mut faces: Vec<Vec3> = Vec::new();
    for a in 0..12 {
        for b in a + 1..12 {
            for c in b + 1..12 {
                let adj = |p: usize, q: usize| vec3::dot(verts[p], verts[q]) > 0.4;
                if adj(a, b) && adj(a, c) && adj(b, c) {
                    let f = vec3::normalized(vec3::add(vec3::add(verts[a], verts[b]), verts[c]))
                        .unwrap();
                    let dup = faces
                        .iter()
                        .any(|g| vec3::dot(*g, f).abs() > 1.0 - 1e-9);
                    if !dup {
                        faces.push(f);
                    }
                }
            }
        }
    }
    axes.extend(faces);
    axes
}

/// Node whose position is nearest the coordinate origin.
fn base_node(mesh: &SurfaceMesh) -> (usize, usize) {
    let g = mesh.grid;
    let mut best = (0usize, 0usize);
    let mut best_d = f64::INFINITY;
    for (i, j) in g.nodes() {
        let d = vec3::norm(mesh.position(i, j));
        if d < best_d {
            best_d = d;
            best = (i, j);
        }
    }
    best
}

/// Search for an N-valued graph with outer/inner ratio `omega` and
/// gradient bound `epsilon`. Deterministic first success over the fixed
/// axis order and the ascending inner-radius ladder; `None` when no
/// axis and radius qualify.
pub fn detect(
    mesh: &SurfaceMesh,
    n: usize,
    omega: f64,
    epsilon: f64,
) -> Result<Option<MultigraphCertificate>> {
    if n == 0 || !(omega > 1.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidDomain(format!(
            "need N >= 1, omega > 1, epsilon > 0; got N = {n}, omega = {omega}, epsilon = {epsilon}"
        )));
    }
    let base = base_node(mesh);
    let mut geo = None;
    for axis in candidate_axes(mesh) {
        // a larger excluded disk can split sheets that a smaller one
        // leaves bridged (and therefore multivalued), so every
        // consistent floor is a separate candidate chart
        for floor in floor_ladder(mesh) {
            let chart = match unwrap_with_floor(mesh, axis, floor) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let d_theta_target = min_angular_step(&chart);
            for comp in 0..chart.n_components {
                let (lo, hi) = component_theta_span(&chart, comp);
                if hi - lo < 2.0 * n as f64 * std::f64::consts::PI - 1e-12 {
                    continue;
                }
                let center = 0.5 * (lo + hi);
                let interp = match SheetInterp::new(&chart, comp) {
                    Some(i) => i,
                    None => continue,
                };
                let r_max = interp.max_rho / omega;
                let mut r_bar = RHO_FLOOR * 10.0;
                while r_bar <= r_max {
                    if let Some(samples) = sample_sheet(
                        &interp,
                        center,
                        n,
                        r_bar,
                        omega,
                        mesh.grid.h_s(),
                        d_theta_target,
                    ) {
                        let grad = samples.sup_gradient();
                        if grad <= epsilon {
                            let field = geo
                                .get_or_insert_with(|| geodesic_distance(mesh, base));
                            let dist =
                                sheet_distance(&chart, comp, center, n, r_bar, omega, field);
                            if dist <= 4.0 * r_bar {
                                return Ok(Some(MultigraphCertificate {
                                    axis,
                                    n,
                                    omega,
                                    epsilon,
                                    r_bar,
                                    grad_bound: grad,
                                    dist_to_origin: dist,
                                    samples,
                                }));
                            }
                        }
                    }
                    r_bar *= LADDER_RATIO;
                }
            }
        }
    }
    Ok(None)
}

/// Exclusion radii tried for each axis: `RHO_FLOOR * 4^k` up to the
/// largest node distance from the origin.
fn floor_ladder(mesh: &SurfaceMesh) -> Vec<f64> {
    let max_rho = mesh
        .positions()
        .iter()
        .map(|&p| vec3::norm(p))
        .fold(0.0f64, f64::max);
    let mut floors = Vec::new();
    let mut floor = RHO_FLOOR;
    while floor <= max_rho {
        floors.push(floor);
        floor *= 4.0;
    }
    floors
}

fn sheet_distance(
    chart: &CoverChart,
    comp: usize,
    center: f64,
    n: usize,
    r_bar: f64,
    omega: f64,
    field: &crate::geodesic::GeodesicField,
) -> f64 {
    let n_pi = n as f64 * std::f64::consts::PI;
    let mut best = f64::INFINITY;
    for k in 0..chart.rho.len() {
        if chart.component[k] != Some(comp) {
            continue;
        }
        let th = chart.theta[k] - center;
        if chart.rho[k] >= r_bar
            && chart.rho[k] <= omega * r_bar
            && th.abs() <= n_pi
        {
            best = best.min(field.dist[k]);
        }
    }
    best
}

/// Re-derive the chart for the certificate's axis and re-measure every
/// certified quantity from scratch.
pub fn verify_certificate(mesh: &SurfaceMesh, cert: &MultigraphCertificate) -> bool {
    let n_pi = cert.n as f64 * std::f64::consts::PI;
    let base = base_node(mesh);
    let mut geo = None;
    for floor in floor_ladder(mesh) {
        let chart = match unwrap_with_floor(mesh, cert.axis, floor) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if verify_on_chart(mesh, cert, &chart, n_pi, base, &mut geo) {
            return true;
        }
    }
    false
}

fn verify_on_chart(
    mesh: &SurfaceMesh,
    cert: &MultigraphCertificate,
    chart: &CoverChart,
    n_pi: f64,
    base: (usize, usize),
    geo: &mut Option<crate::geodesic::GeodesicField>,
) -> bool {
    for comp in 0..chart.n_components {
        let (lo, hi) = component_theta_span(chart, comp);
        if hi - lo < 2.0 * n_pi - 1e-12 {
            continue;
        }
        let center = 0.5 * (lo + hi);
        let interp = match SheetInterp::new(chart, comp) {
            Some(i) => i,
            None => continue,
        };
        let s = &cert.samples;
        let mut re = s.clone();
        let mut ok = true;
        'outer: for t in 0..s.n_theta {
            let th = s.theta_at(t) + center;
            for r in 0..s.n_rho {
                match interp.sample(s.rho_at(r), th) {
                    Some((v, false)) => {
                        if (v - s.at(r, t)).abs() > 1e-9 * (1.0 + v.abs()) {
                            ok = false;
                            break 'outer;
                        }
                        re.u[t * s.n_rho + r] = v;
                    }
                    _ => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let grad = re.sup_gradient();
        if grad > cert.grad_bound * (1.0 + 1e-9) + 1e-12 || grad > cert.epsilon {
            continue;
        }
        let field = geo.get_or_insert_with(|| geodesic_distance(mesh, base));
        let dist = sheet_distance(chart, comp, center, cert.n, cert.r_bar, cert.omega, field);
        if dist <= 4.0 * cert.r_bar {
            return true;
        }
    }
    false
}
