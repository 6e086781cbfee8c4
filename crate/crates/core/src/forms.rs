//! Fundamental forms and curvature fields of a parametric mesh.
//!
//! First and second forms come from second-order finite differences of the
//! immersion; `H = (eG - 2fF + gE)/(EG - F^2)` (sum convention),
//! `K = (eg - f^2)/(EG - F^2)`, `|A|^2 = H^2 - 2K`.
//!
//! Those three extrinsic fields satisfy `H^2 = |A|^2 + 2K` identically, so
//! a meaningful Gauss-equation residual needs an independent route to K.
//! [`ShapeData`] therefore also carries `k_intrinsic`, the curvature of
//! the first form alone via the Brioschi formula; the residual
//! `|H^2 - |A|^2 - 2 K_intrinsic|` is a genuine O(h^2) consistency check
//! between the two fundamental forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::ParamGrid;
use crate::mesh::{self, SurfaceMesh};
use crate::vec3;

/// First (E, F, G) and second (e, f, g) fundamental form coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub grid: ParamGrid,
    pub e1: Vec<f64>,
    pub f1: Vec<f64>,
    pub g1: Vec<f64>,
    pub e2: Vec<f64>,
    pub f2: Vec<f64>,
    pub g2: Vec<f64>,
}

impl FundamentalForms {
    #[inline]
    pub fn det(&self, k: usize) -> f64 {
        self.e1[k] * self.g1[k] - self.f1[k] * self.f1[k]
    }

    /// Area-element factor `sqrt(EG - F^2)` per node.
    pub fn sqrt_det(&self) -> Vec<f64> {
        (0..self.e1.len()).map(|k| self.det(k).sqrt()).collect()
    }
}

/// Curvature fields derived from the forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeData {
    pub grid: ParamGrid,
    /// Mean curvature, sum convention `H = k1 + k2`.
    pub h: Vec<f64>,
    /// Extrinsic Gauss curvature `(eg - f^2)/(EG - F^2)`.
    pub k: Vec<f64>,
    /// `|A|^2 = H^2 - 2K`.
    pub a2: Vec<f64>,
    /// Gauss curvature of the first form alone (Brioschi).
    pub k_intrinsic: Vec<f64>,
}

impl ShapeData {
    /// `max |H^2 - |A|^2 - 2 K_intrinsic|` over nodes at boundary depth
    /// >= `depth`. Depth 2 keeps one-sided-stencil contamination out.
    pub fn gauss_residual_max(&self, depth: usize) -> f64 {
        self.grid
            .nodes_at_depth(depth)
            .fold(0.0f64, |m, (i, j)| {
                let k = self.grid.idx(i, j);
                m.max((self.h[k] * self.h[k] - self.a2[k] - 2.0 * self.k_intrinsic[k]).abs())
            })
    }

    pub fn max_h(&self) -> f64 {
        self.h.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_a2(&self) -> f64 {
        self.a2.iter().fold(0.0f64, |m, v| m.max(*v))
    }

    pub fn min_k(&self) -> f64 {
        self.k.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// Forms and curvature of a mesh by finite differences.
///
/// Aborts with the offending node list if the metric degenerates
/// (`EG - F^2 <= 0`) anywhere.
pub fn compute_forms_and_shape(m: &SurfaceMesh) -> Result<(FundamentalForms, ShapeData)> {
    let g = m.grid;
    let n = g.node_count();
    let (xs, xt) = mesh::discrete_tangents(m);

    let mut xss = vec![[0.0; 3]; n];
    let mut xtt = vec![[0.0; 3]; n];
    let mut xst = vec![[0.0; 3]; n];
    for c in 0..3 {
        let dss = fd::d_ss(&g, |i, j| m.position(i, j)[c]);
        let dtt = fd::d_tt(&g, |i, j| m.position(i, j)[c]);
        let dst = fd::d_st(&g, |i, j| m.position(i, j)[c]);
        for k in 0..n {
            xss[k][c] = dss[k];
            xtt[k][c] = dtt[k];
            xst[k][c] = dst[k];
        }
    }

    let mut forms = FundamentalForms {
        grid: g,
        e1: vec![0.0; n],
        f1: vec![0.0; n],
        g1: vec![0.0; n],
        e2: vec![0.0; n],
        f2: vec![0.0; n],
        g2: vec![0.0; n],
    };
    let mut bad = Vec::new();
    for (i, j) in g.nodes() {
        let k = g.idx(i, j);
        forms.e1[k] = vec3::dot(xs[k], xs[k]);
        forms.f1[k] = vec3::dot(xs[k], xt[k]);
        forms.g1[k] = vec3::dot(xt[k], xt[k]);
        let nrm = match vec3::normalized(vec3::cross(xs[k], xt[k])) {
            Some(v) if forms.det(k) > 0.0 => v,
            _ => {
                bad.push((i, j));
                continue;
            }
        };
        // orient the discrete normal with the stored one
        let nrm = if vec3::dot(nrm, m.normal(i, j)) < 0.0 { vec3::scale(nrm, -1.0) } else { nrm };
        forms.e2[k] = vec3::dot(nrm, xss[k]);
        forms.f2[k] = vec3::dot(nrm, xst[k]);
        forms.g2[k] = vec3::dot(nrm, xtt[k]);
    }
    if !bad.is_empty() {
        return Err(Error::DegenerateMetric(bad));
    }

    let mut h = vec![0.0; n];
    let mut kk = vec![0.0; n];
    let mut a2 = vec![0.0; n];
    for k in 0..n {
        let det = forms.det(k);
        h[k] = (forms.e2[k] * forms.g1[k] - 2.0 * forms.f2[k] * forms.f1[k]
            + forms.g2[k] * forms.e1[k])
            / det;
        kk[k] = (forms.e2[k] * forms.g2[k] - forms.f2[k] * forms.f2[k]) / det;
        a2[k] = h[k] * h[k] - 2.0 * kk[k];
    }
    let k_intrinsic = brioschi(&forms);
    Ok((forms, ShapeData { grid: g, h, k: kk, a2, k_intrinsic }))
}

/// Gauss curvature from (E, F, G) alone via the Brioschi determinant
/// formula.
fn brioschi(f: &FundamentalForms) -> Vec<f64> {
    let g = f.grid;
    let get = |v: &Vec<f64>| {
        let v = v.clone();
        move |i: usize, j: usize| v[g.idx(i, j)]
    };
    let es = fd::d_s(&g, get(&f.e1));
    let et = fd::d_t(&g, get(&f.e1));
    let gs = fd::d_s(&g, get(&f.g1));
    let gt = fd::d_t(&g, get(&f.g1));
    let fs = fd::d_s(&g, get(&f.f1));
    let ft = fd::d_t(&g, get(&f.f1));
    let ett = fd::d_tt(&g, get(&f.e1));
    let gss = fd::d_ss(&g, get(&f.g1));
    let fst = fd::d_st(&g, get(&f.f1));

    let det3 = |a: f64, b: f64, c: f64, d: f64, e: f64, ff: f64, gg: f64, h: f64, i: f64| {
        a * (e * i - ff * h) - b * (d * i - ff * gg) + c * (d * h - e * gg)
    };
    (0..g.node_count())
        .map(|k| {
            let (ee, fff, gg) = (f.e1[k], f.f1[k], f.g1[k]);
            let det = ee * gg - fff * fff;
            let d1 = det3(
                -0.5 * ett[k] + fst[k] - 0.5 * gss[k],
                0.5 * es[k],
                fs[k] - 0.5 * et[k],
                ft[k] - 0.5 * gs[k],
                ee,
                fff,
                0.5 * gt[k],
                fff,
                gg,
            );
            let d2 = det3(0.0, 0.5 * et[k], 0.5 * gs[k], 0.5 * et[k], ee, fff, 0.5 * gs[k], fff, gg);
            (d1 - d2) / (det * det)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_helicoid, build_reference, ReferenceKind};

    #[test]
    fn helicoid_forms_match_closed_form() {
        let g = ParamGrid::new(-2.0, 2.0, -std::f64::consts::PI, std::f64::consts::PI, 81, 121)
            .unwrap();
        let m = build_helicoid(g).unwrap();
        let (f, sh) = compute_forms_and_shape(&m).unwrap();
        // E = 1, F = 0, G = 1 + s^2, |A|^2 = 2/(1+s^2)^2, H = 0
        for (i, j) in g.nodes_at_depth(1) {
            let k = g.idx(i, j);
            let s = g.s_at(i);
            assert!((f.e1[k] - 1.0).abs() < 1e-8, "E at ({i},{j})");
            assert!(f.f1[k].abs() < 1e-8);
            assert!((f.g1[k] - (1.0 + s * s)).abs() < 5e-3);
            let a2 = 2.0 / (1.0 + s * s).powi(2);
            assert!((sh.a2[k] - a2).abs() < 5e-3, "A2 {} vs {}", sh.a2[k], a2);
            assert!(sh.h[k].abs() < 1e-9, "H at ({i},{j}) = {}", sh.h[k]);
        }
    }

    #[test]
    fn sphere_curvatures() {
        let g = ParamGrid::new(
            0.0,
            std::f64::consts::PI,
            std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_4,
            81,
            81,
        )
        .unwrap();
        let m = build_reference(ReferenceKind::Sphere, 1.0, g).unwrap();
        let (_, sh) = compute_forms_and_shape(&m).unwrap();
        for (i, j) in g.nodes_at_depth(1) {
            let k = g.idx(i, j);
            assert!((sh.h[k] - 2.0).abs() < 1e-2, "H = {}", sh.h[k]);
            assert!((sh.k[k] - 1.0).abs() < 1e-2);
            assert!((sh.a2[k] - 2.0).abs() < 1e-2);
        }
        assert!(sh.gauss_residual_max(2) < 1e-2);
    }

    #[test]
    fn cylinder_curvatures() {
        let g = ParamGrid::new(-1.0, 1.0, 0.0, std::f64::consts::PI, 41, 41).unwrap();
        let m = build_reference(ReferenceKind::Cylinder, 2.0, g).unwrap();
        let (_, sh) = compute_forms_and_shape(&m).unwrap();
        for k in 0..g.node_count() {
            assert!((sh.h[k] - 0.5).abs() < 5e-3);
            assert!(sh.k[k].abs() < 1e-9);
            assert!((sh.a2[k] - 0.25).abs() < 5e-3);
        }
    }

    #[test]
    fn plane_is_flat() {
        let g = ParamGrid::new(0.0, 1.0, 0.0, 1.0, 21, 21).unwrap();
        let m = build_reference(ReferenceKind::Plane, 0.0, g).unwrap();
        let (_, sh) = compute_forms_and_shape(&m).unwrap();
        assert!(sh.max_h() < 1e-12);
        assert!(sh.max_a2() < 1e-12);
        assert!(sh.gauss_residual_max(2) < 1e-12);
    }

    #[test]
    fn intrinsic_k_matches_extrinsic_on_sphere() {
        let g = ParamGrid::new(
            0.0,
            std::f64::consts::PI,
            std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_4,
            81,
            81,
        )
        .unwrap();
        let m = build_reference(ReferenceKind::Sphere, 1.0, g).unwrap();
        let (_, sh) = compute_forms_and_shape(&m).unwrap();
        for (i, j) in g.nodes_at_depth(2) {
            let k = g.idx(i, j);
            assert!((sh.k_intrinsic[k] - 1.0).abs() < 1e-2);
        }
    }
}
