//! Randomized structural properties of the geometry layer.

use helimorph::forms::compute_forms_and_shape;
use helimorph::geodesic::geodesic_distance;
use helimorph::grid::{ParamGrid, ScalarField};
use helimorph::mesh::{build_helicoid, build_reference, normal_variation, ReferenceKind};
use helimorph::rescale::{rescale_field, rescale_mesh};
use helimorph::vec3;
use proptest::prelude::*;

fn small_helicoid() -> (ParamGrid, helimorph::mesh::SurfaceMesh) {
    let g = ParamGrid::new(-1.5, 1.5, -2.0, 2.0, 21, 31).unwrap();
    (g, build_helicoid(g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn curvature_rescaling_laws(r in 0.3f64..5.0) {
        let (g, m) = small_helicoid();
        let (_, s0) = compute_forms_and_shape(&m).unwrap();
        let mr = rescale_mesh(&m, r).unwrap();
        let (_, sr) = compute_forms_and_shape(&mr).unwrap();
        for k in 0..g.node_count() {
            prop_assert!((sr.h[k] - s0.h[k] / r).abs() < 1e-9 * (1.0 + 1.0 / r));
            prop_assert!((sr.a2[k] - s0.a2[k] / (r * r)).abs() < 1e-9 * (1.0 + 1.0 / (r * r)));
        }
    }

    #[test]
    fn rescale_field_is_exact_relabeling(c in -3.0f64..3.0, r in 0.5f64..4.0) {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 11, 13).unwrap();
        let u = ScalarField::from_fn(g, |s, t| c * (s + 0.5 * t));
        let w = rescale_field(&u, r).unwrap();
        for k in 0..g.node_count() {
            prop_assert_eq!(w.values()[k], r * u.values()[k]);
        }
    }

    #[test]
    fn normal_variation_round_trip(amp in 0.0f64..0.05) {
        let (g, m) = small_helicoid();
        let u = ScalarField::from_fn(g, |s, t| amp * (0.9 * s).cos() * (0.7 * t).cos());
        let moved = normal_variation(&m, &u).unwrap();
        let back = normal_variation(&moved, &u.scaled(-1.0)).unwrap();
        let tol = 50.0 * amp * amp + 1e-12;
        for k in 0..g.node_count() {
            prop_assert!(vec3::dist(back.positions()[k], m.positions()[k]) <= tol);
        }
    }

    #[test]
    fn geodesic_distance_is_symmetric(i in 2usize..19, j in 2usize..29) {
        let (_, m) = small_helicoid();
        let a = (10usize, 15usize);
        let fa = geodesic_distance(&m, a);
        let fb = geodesic_distance(&m, (i, j));
        prop_assert!((fa.at(i, j) - fb.at(a.0, a.1)).abs() < 1e-12);
    }

    #[test]
    fn reference_meshes_are_consistently_oriented(r in 0.5f64..3.0) {
        let g = ParamGrid::new(-1.0, 1.0, 0.5, 2.5, 15, 17).unwrap();
        for kind in [ReferenceKind::Cylinder, ReferenceKind::Sphere] {
            let m = build_reference(kind, r, g).unwrap();
            prop_assert!(m.orientation_consistent());
        }
    }

    #[test]
    fn gauss_residual_small_on_random_sphere(r in 0.5f64..2.0) {
        let g = ParamGrid::new(0.0, 1.0, 1.0, 2.0, 33, 33).unwrap();
        let m = build_reference(ReferenceKind::Sphere, r, g).unwrap();
        let (_, sh) = compute_forms_and_shape(&m).unwrap();
        // interior residual bounded by c h^2 with a shared constant
        let h = g.max_spacing();
        prop_assert!(sh.gauss_residual_max(2) < 30.0 * h * h / (r * r));
    }
}
