//! Homothetic rescaling of meshes and graph fields.
//!
//! Scaling positions by `R` together with the parameter grid keeps the
//! parametrization velocity fixed, so the first fundamental form is
//! unchanged nodewise while curvatures transform by `H -> H/R` and
//! `|A|^2 -> |A|^2 / R^2`. Fields over planar grids rescale by
//! `w(x) = R u(x/R)`, which on matched grids is an exact nodewise
//! relabeling.

use crate::error::{Error, Result};
use crate::grid::{ParamGrid, ScalarField};
use crate::mesh::SurfaceMesh;
use crate::vec3;

fn scaled_grid(g: &ParamGrid, r: f64) -> Result<ParamGrid> {
    ParamGrid::new(
        g.s_min * r,
        g.s_max * r,
        g.t_min * r,
        g.t_max * r,
        g.n_s,
        g.n_t,
    )
}

/// Scale all positions by `R` (normals are unchanged); the grid bounds
/// scale along so node spacings match the new size.
pub fn rescale_mesh(mesh: &SurfaceMesh, r: f64) -> Result<SurfaceMesh> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidDomain(format!("scale factor must be positive, got {r}")));
    }
    let grid = scaled_grid(&mesh.grid, r)?;
    let position = mesh.positions().iter().map(|&p| vec3::scale(p, r)).collect();
    SurfaceMesh::from_parts(grid, position, mesh.normals().to_vec())
}

/// `w(x) = R u(x/R)` over the grid scaled by `R`: exact relabeling, no
/// interpolation.
pub fn rescale_field(u: &ScalarField, r: f64) -> Result<ScalarField> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidDomain(format!("scale factor must be positive, got {r}")));
    }
    let grid = scaled_grid(&u.grid, r)?;
    ScalarField::from_values(grid, u.values().iter().map(|&v| r * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::compute_forms_and_shape;
    use crate::grid::ParamGrid;
    use crate::mesh::{build_helicoid, build_reference, ReferenceKind};
    use crate::operators::euclidean_graph_h;

    #[test]
    fn identity_scale_is_identity() {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 21, 21).unwrap();
        let m = build_helicoid(g).unwrap();
        let m1 = rescale_mesh(&m, 1.0).unwrap();
        for k in 0..g.node_count() {
            assert_eq!(m.positions()[k], m1.positions()[k]);
        }
    }

    #[test]
    fn sphere_curvatures_transform() {
        let g = ParamGrid::new(
            0.0,
            1.0,
            std::f64::consts::FRAC_PI_4,
            3.0 * std::f64::consts::FRAC_PI_4,
            41,
            41,
        )
        .unwrap();
        let m = build_reference(ReferenceKind::Sphere, 1.0, g).unwrap();
        let m2 = rescale_mesh(&m, 2.0).unwrap();
        let (_, shape) = compute_forms_and_shape(&m2).unwrap();
        for k in 0..g.node_count() {
            assert!((shape.h[k] - 1.0).abs() < 1e-2, "H = {}", shape.h[k]);
            assert!((shape.a2[k] - 0.5).abs() < 1e-2);
        }
    }

    #[test]
    fn helicoid_a2_law_at_axis() {
        let g = ParamGrid::new(-2.0, 2.0, -1.0, 1.0, 81, 41).unwrap();
        let m = build_helicoid(g).unwrap();
        let m3 = rescale_mesh(&m, 3.0).unwrap();
        let (_, shape) = compute_forms_and_shape(&m3).unwrap();
        // |A|^2 = 2 at the axis for the unit helicoid
        let k = g.idx(40, 20);
        assert!((shape.a2[k] - 2.0 / 9.0).abs() < 1e-3, "a2 = {}", shape.a2[k]);
    }

    #[test]
    fn curvature_laws_hold_on_fixtures() {
        let g = ParamGrid::new(-1.5, 1.5, -2.0, 2.0, 41, 51).unwrap();
        let m = build_helicoid(g).unwrap();
        let (_, s0) = compute_forms_and_shape(&m).unwrap();
        for r in [0.5, 2.0, 5.0] {
            let mr = rescale_mesh(&m, r).unwrap();
            let (_, sr) = compute_forms_and_shape(&mr).unwrap();
            for k in 0..g.node_count() {
                assert!((sr.h[k] - s0.h[k] / r).abs() < 1e-10);
                assert!((sr.a2[k] - s0.a2[k] / (r * r)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_field_relabels() {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 11, 11).unwrap();
        let u = ScalarField::constant(g, 0.3);
        let w = rescale_field(&u, 4.0).unwrap();
        assert!((w.grid.s_max - 4.0).abs() < 1e-15);
        assert!(w.values().iter().all(|&v| (v - 1.2).abs() < 1e-15));
    }

    #[test]
    fn hemisphere_graph_mean_curvature_halves() {
        // lower hemisphere cap of the unit sphere: graph H = +2; after
        // R = 2 it is a cap of the radius 2 sphere with H = +1
        let g = ParamGrid::new(-0.4, 0.4, -0.4, 0.4, 41, 41).unwrap();
        let u = ScalarField::from_fn(g, |s, t| -(1.0 - s * s - t * t).sqrt());
        let w = rescale_field(&u, 2.0).unwrap();
        let h = euclidean_graph_h(&w);
        for (i, j) in w.grid.interior_nodes() {
            assert!((h.at(i, j) - 1.0).abs() < 2e-2, "H = {}", h.at(i, j));
        }
    }

    #[test]
    fn nonpositive_factor_rejected() {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 11, 11).unwrap();
        let m = build_helicoid(g).unwrap();
        assert!(rescale_mesh(&m, 0.0).is_err());
        assert!(rescale_mesh(&m, -2.0).is_err());
        assert!(rescale_field(&ScalarField::zeros(g), f64::NAN).is_err());
    }
}
