//! End-to-end solver properties at sub-default resolution.

use helimorph::grid::ParamGrid;
use helimorph::mesh::build_helicoid;
use helimorph::multigraph::{detect, LADDER_RATIO};
use helimorph::operators::{jacobi_apply, remainder_q, OperatorContext};
use helimorph::rescale::rescale_mesh;
use helimorph::solver::{successive_approximation, SolverConfig};

fn patch_config(n_s: usize, n_t: usize, h_target: f64) -> SolverConfig {
    SolverConfig {
        h_target,
        grid: ParamGrid::new(
            -2.0,
            2.0,
            -2.0 * std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
            n_s,
            n_t,
        )
        .unwrap(),
        ..SolverConfig::default()
    }
}

#[test]
fn fixed_point_consistency_at_convergence() {
    let cfg = patch_config(81, 121, 1e-2);
    let mesh = build_helicoid(cfg.grid).unwrap();
    let (u, report) = successive_approximation(&mesh, &cfg).unwrap();
    assert!(report.converged, "report: {report:?}");

    let ctx = OperatorContext::from_mesh(&mesh).unwrap();
    let lu = jacobi_apply(&ctx, &u).unwrap();
    let q = remainder_q(&ctx, &mesh, &u).unwrap();
    let g = cfg.grid;
    let mut defect = 0.0f64;
    for (i, j) in g.interior_nodes() {
        defect = defect.max((lu.at(i, j) - cfg.h_target - q.at(i, j)).abs());
    }
    assert!(defect <= 10.0 * cfg.step_tol, "fixed-point defect {defect}");
}

#[test]
fn solver_is_deterministic() {
    let cfg = patch_config(41, 61, 5e-3);
    let mesh = build_helicoid(cfg.grid).unwrap();
    let (u1, r1) = successive_approximation(&mesh, &cfg).unwrap();
    let (u2, r2) = successive_approximation(&mesh, &cfg).unwrap();
    assert_eq!(u1.values(), u2.values());
    assert_eq!(
        serde_json::to_string(&r1).unwrap(),
        serde_json::to_string(&r2).unwrap()
    );
}

#[test]
fn contraction_and_ladder_hold() {
    let cfg = patch_config(41, 61, 1e-2);
    let mesh = build_helicoid(cfg.grid).unwrap();
    let (_, report) = successive_approximation(&mesh, &cfg).unwrap();
    for rec in &report.iterations {
        if let Some(eps) = rec.contraction {
            assert!(eps < 1.0, "contraction factor {eps} at n = {}", rec.n);
        }
    }
    assert!(report.norm_ladder_ok);
    assert!(report.embedded);
    let f = report.linearization_factor.unwrap();
    assert!((f - 1.0).abs() < 0.05, "linearization factor {f}");
}

#[test]
fn certificate_transport_under_rescaling() {
    let t3 = 3.0 * std::f64::consts::PI;
    let g = ParamGrid::new(-5.0, 5.0, -t3, t3, 101, 181).unwrap();
    let mesh = build_helicoid(g).unwrap();
    let cert = detect(&mesh, 2, 2.0, 0.5).unwrap().expect("certificate on the base mesh");

    let r = 2.0;
    let scaled = rescale_mesh(&mesh, r).unwrap();
    let cert_r = detect(&scaled, 2, 2.0, 0.5).unwrap().expect("certificate on the scaled mesh");

    // same N and omega; inner radius within one ladder step of R * r_bar
    assert_eq!(cert_r.n, cert.n);
    assert_eq!(cert_r.omega, cert.omega);
    let ratio = cert_r.r_bar / (r * cert.r_bar);
    assert!(
        (1.0 / LADDER_RATIO - 1e-9..=LADDER_RATIO + 1e-9).contains(&ratio),
        "r_bar {} vs {} x {}",
        cert_r.r_bar,
        r,
        cert.r_bar
    );
}
