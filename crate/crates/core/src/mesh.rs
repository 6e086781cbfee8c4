//! Parametric surface meshes and their fixtures.
//!
//! A [`SurfaceMesh`] is an immersion of a rectangular parameter patch into
//! Euclidean 3-space together with a unit normal per node. Fixtures come
//! with closed-form curvature so they double as oracles: the helicoid
//! (minimal, `|A|^2 = 2/(1+s^2)^2`), plane, cylinder and sphere (constant
//! curvature), and the catenoid (the multigraph non-example).
//!
//! Sign conventions: second-form coefficients are `e = <n, X_ss>` etc. and
//! `H = k1 + k2`. The fixture parametrizations are oriented so that the
//! cross-product normal gives `H = +2/r` on the sphere and `H = +1/r` on
//! the cylinder, which keeps the normal-variation linearization
//! `dH/du = Laplacian + |A|^2` with a plus sign throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::{ParamGrid, ScalarField};
use crate::vec3::{self, Vec3};

/// A structured parametric immersion with per-node unit normals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub grid: ParamGrid,
    position: Vec<Vec3>,
    normal: Vec<Vec3>,
}

/// Reference fixture with closed-form curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Plane,
    Cylinder,
    Sphere,
}

impl SurfaceMesh {
    pub fn from_parts(grid: ParamGrid, position: Vec<Vec3>, normal: Vec<Vec3>) -> Result<Self> {
        grid.validate()?;
        if position.len() != grid.node_count() || normal.len() != grid.node_count() {
            return Err(Error::InvalidGrid("position/normal count mismatch".into()));
        }
        Ok(Self { grid, position, normal })
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Vec3 {
        self.position[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn normal(&self, i: usize, j: usize) -> Vec3 {
        self.normal[self.grid.idx(i, j)]
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.position
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normal
    }

    /// Max deviation of normal length from 1.
    pub fn max_normal_defect(&self) -> f64 {
        self.normal
            .iter()
            .fold(0.0f64, |m, n| m.max((vec3::norm(*n) - 1.0).abs()))
    }

    /// True iff `<N(x), N(x')> > 0` for every pair of axis-adjacent nodes.
    pub fn orientation_consistent(&self) -> bool {
        let g = &self.grid;
        for (i, j) in g.nodes() {
            let n = self.normal(i, j);
            if i + 1 < g.n_s && vec3::dot(n, self.normal(i + 1, j)) <= 0.0 {
                return false;
            }
            if j + 1 < g.n_t && vec3::dot(n, self.normal(i, j + 1)) <= 0.0 {
                return false;
            }
        }
        true
    }

    /// Rigidly rotate positions and normals (row-major rotation matrix).
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> SurfaceMesh {
        SurfaceMesh {
            grid: self.grid,
            position: self.position.iter().map(|p| vec3::mat_apply(r, *p)).collect(),
            normal: self.normal.iter().map(|n| vec3::mat_apply(r, *n)).collect(),
        }
    }
}

/// Helicoid `(s sin t, s cos t, t)` with its analytic normal.
pub fn build_helicoid(grid: ParamGrid) -> Result<SurfaceMesh> {
    grid.validate()?;
    let mut position = Vec::with_capacity(grid.node_count());
    let mut normal = Vec::with_capacity(grid.node_count());
    for (i, j) in grid.nodes() {
        let s = grid.s_at(i);
        let t = grid.t_at(j);
        position.push([s * t.sin(), s * t.cos(), t]);
        let w = (1.0 + s * s).sqrt();
        normal.push([t.cos() / w, -t.sin() / w, -s / w]);
    }
    SurfaceMesh::from_parts(grid, position, normal)
}

/// Catenoid `(cosh s cos t, cosh s sin t, s)`; closes up after one turn, so
/// it never contains a 2-valued graph.
pub fn build_catenoid(grid: ParamGrid) -> Result<SurfaceMesh> {
    grid.validate()?;
    let mut position = Vec::with_capacity(grid.node_count());
    let mut normal = Vec::with_capacity(grid.node_count());
    for (i, j) in grid.nodes() {
        let s = grid.s_at(i);
        let t = grid.t_at(j);
        let ch = s.cosh();
        position.push([ch * t.cos(), ch * t.sin(), s]);
        // X_s x X_t normalized
        let sh = s.sinh();
        let n = [-ch * t.cos(), -ch * t.sin(), sh * ch];
        normal.push(vec3::normalized(n).expect("catenoid normal"));
    }
    SurfaceMesh::from_parts(grid, position, normal)
}

/// Standard parametrizations of plane, cylinder and sphere.
///
/// - plane: `(s, t, 0)`, normal `e3`
/// - cylinder radius r: `(r cos t, r sin t, s)`, inward normal, `H = 1/r`
/// - sphere radius r: `r (sin t cos s, sin t sin s, cos t)` with polar angle
///   `t` strictly inside `(0, pi)`, inward normal, `H = 2/r`
pub fn build_reference(kind: ReferenceKind, r: f64, grid: ParamGrid) -> Result<SurfaceMesh> {
    grid.validate()?;
    if matches!(kind, ReferenceKind::Cylinder | ReferenceKind::Sphere) && !(r > 0.0) {
        return Err(Error::InvalidFixture(format!("radius must be positive, got {r}")));
    }
    if kind == ReferenceKind::Sphere && !(grid.t_min > 0.0 && grid.t_max < std::f64::consts::PI) {
        return Err(Error::InvalidFixture(format!(
            "sphere polar range [{}, {}] must be strictly inside (0, pi)",
            grid.t_min, grid.t_max
        )));
    }
    let mut position = Vec::with_capacity(grid.node_count());
    let mut normal = Vec::with_capacity(grid.node_count());
    for (i, j) in grid.nodes() {
        let s = grid.s_at(i);
        let t = grid.t_at(j);
        match kind {
            ReferenceKind::Plane => {
                position.push([s, t, 0.0]);
                normal.push([0.0, 0.0, 1.0]);
            }
            ReferenceKind::Cylinder => {
                position.push([r * t.cos(), r * t.sin(), s]);
                normal.push([-t.cos(), -t.sin(), 0.0]);
            }
            ReferenceKind::Sphere => {
                let p = [t.sin() * s.cos(), t.sin() * s.sin(), t.cos()];
                position.push(vec3::scale(p, r));
                normal.push(vec3::scale(p, -1.0));
            }
        }
    }
    SurfaceMesh::from_parts(grid, position, normal)
}

/// Discrete coordinate tangents of the immersion (second-order stencils).
pub(crate) fn discrete_tangents(mesh: &SurfaceMesh) -> (Vec<Vec3>, Vec<Vec3>) {
    let g = &mesh.grid;
    let mut xs = vec![[0.0; 3]; g.node_count()];
    let mut xt = vec![[0.0; 3]; g.node_count()];
    for c in 0..3 {
        let ds = fd::d_s(g, |i, j| mesh.position(i, j)[c]);
        let dt = fd::d_t(g, |i, j| mesh.position(i, j)[c]);
        for k in 0..g.node_count() {
            xs[k][c] = ds[k];
            xt[k][c] = dt[k];
        }
    }
    (xs, xt)
}

/// Normals from the cross product of discrete tangents; errors on
/// degenerate nodes.
pub(crate) fn discrete_normals(mesh: &SurfaceMesh) -> Result<Vec<Vec3>> {
    let g = &mesh.grid;
    let (xs, xt) = discrete_tangents(mesh);
    let mut normals = Vec::with_capacity(g.node_count());
    let mut bad = Vec::new();
    for (i, j) in g.nodes() {
        let k = g.idx(i, j);
        match vec3::normalized(vec3::cross(xs[k], xt[k])) {
            Some(n) => normals.push(n),
            None => {
                bad.push((i, j));
                normals.push([0.0, 0.0, 0.0]);
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::DegenerateMetric(bad));
    }
    Ok(normals)
}

/// Normal variation `x -> x + u(x) N(x)` with normals recomputed from the
/// perturbed immersion.
pub fn normal_variation(mesh: &SurfaceMesh, u: &ScalarField) -> Result<SurfaceMesh> {
    if !u.grid.compatible(&mesh.grid) {
        return Err(Error::GridMismatch);
    }
    let g = mesh.grid;
    let mut position = Vec::with_capacity(g.node_count());
    for (i, j) in g.nodes() {
        position.push(vec3::add(mesh.position(i, j), vec3::scale(mesh.normal(i, j), u.at(i, j))));
    }
    let moved = SurfaceMesh { grid: g, position, normal: mesh.normal.clone() };
    let normal = discrete_normals(&moved)?;
    // keep the original orientation: the recomputed cross product must not flip
    let mut normal = normal;
    for k in 0..normal.len() {
        if vec3::dot(normal[k], mesh.normal[k]) < 0.0 {
            normal[k] = vec3::scale(normal[k], -1.0);
        }
    }
    Ok(SurfaceMesh { grid: g, position: moved.position, normal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helicoid_grid() -> ParamGrid {
        ParamGrid::new(-2.0, 2.0, -std::f64::consts::PI, std::f64::consts::PI, 41, 61).unwrap()
    }

    #[test]
    fn helicoid_normals() {
        let m = build_helicoid(helicoid_grid()).unwrap();
        assert!(m.max_normal_defect() < 1e-12);
        assert!(m.orientation_consistent());
        // node (s=0, t=0) -> origin with normal (1, 0, 0)
        let g = m.grid;
        let (i0, j0) = (g.n_s / 2, g.n_t / 2);
        assert!((g.s_at(i0)).abs() < 1e-12);
        assert!((g.t_at(j0)).abs() < 1e-12);
        assert!(vec3::dist(m.position(i0, j0), [0.0, 0.0, 0.0]) < 1e-12);
        assert!(vec3::dist(m.normal(i0, j0), [1.0, 0.0, 0.0]) < 1e-12);
        // along the axis the normal is (cos t, -sin t, 0)
        for j in 0..g.n_t {
            let t = g.t_at(j);
            assert!(vec3::dist(m.normal(i0, j), [t.cos(), -t.sin(), 0.0]) < 1e-12);
        }
    }

    #[test]
    fn sphere_rejects_pole_touching_grid() {
        let bad = ParamGrid::new(0.0, 3.0, 0.0, 2.0, 9, 9).unwrap();
        assert!(build_reference(ReferenceKind::Sphere, 1.0, bad).is_err());
        let good = ParamGrid::new(0.0, 3.0, 0.5, 2.5, 9, 9).unwrap();
        assert!(build_reference(ReferenceKind::Sphere, 1.0, good).is_ok());
    }

    #[test]
    fn zero_variation_is_identity() {
        let m = build_helicoid(helicoid_grid()).unwrap();
        let u = ScalarField::zeros(m.grid);
        let m2 = normal_variation(&m, &u).unwrap();
        for k in 0..m.positions().len() {
            assert!(vec3::dist(m.positions()[k], m2.positions()[k]) < 1e-14);
        }
    }

    #[test]
    fn plane_translates_under_constant_variation() {
        let g = ParamGrid::new(0.0, 1.0, 0.0, 1.0, 11, 11).unwrap();
        let m = build_reference(ReferenceKind::Plane, 0.0, g).unwrap();
        let u = ScalarField::constant(g, 0.25);
        let m2 = normal_variation(&m, &u).unwrap();
        for (i, j) in g.nodes() {
            assert!(vec3::dist(m2.position(i, j), [g.s_at(i), g.t_at(j), 0.25]) < 1e-14);
        }
    }

    #[test]
    fn variation_round_trip_is_second_order() {
        let m = build_helicoid(helicoid_grid()).unwrap();
        let amp = 1e-3;
        let u = ScalarField::from_fn(m.grid, |s, t| amp * (s * 0.7).cos() * (t * 0.5).sin());
        let fwd = normal_variation(&m, &u).unwrap();
        let back = normal_variation(&fwd, &u.scaled(-1.0)).unwrap();
        let mut max = 0.0f64;
        for k in 0..m.positions().len() {
            max = max.max(vec3::dist(m.positions()[k], back.positions()[k]));
        }
        assert!(max < 50.0 * amp * amp, "round trip defect {max}");
    }

    #[test]
    fn oversized_variation_on_sphere_degenerates() {
        let g = ParamGrid::new(0.0, 3.0, 0.5, 2.5, 21, 21).unwrap();
        let m = build_reference(ReferenceKind::Sphere, 1.0, g).unwrap();
        // pushing inward by a full radius collapses the sphere to a point
        let u = ScalarField::constant(g, 1.0);
        assert!(matches!(normal_variation(&m, &u), Err(Error::DegenerateMetric(_))));
    }
}
