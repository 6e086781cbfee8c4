//! Discrete differential geometry toolkit for constant-mean-curvature
//! normal perturbations of the helicoid.
//!
//! The pipeline: build a structured parametric mesh ([`mesh`]), compute
//! fundamental forms and curvatures ([`forms`]), assemble the
//! linearized mean-curvature operator ([`operators`]) and solve the
//! successive-approximation fixed point for a target constant mean
//! curvature ([`solver`]). Verification layers: spectral stability
//! certificates ([`stability`]), intrinsic-distance and area bounds
//! ([`geodesic`], [`stability`]), multi-valued graph detection
//! ([`multigraph`]), and homothety transformation laws ([`rescale`]).

pub mod band;
pub mod dirichlet;
pub mod eigen;
pub mod error;
pub mod export;
pub mod fd;
pub mod forms;
pub mod geodesic;
pub mod grid;
pub mod mesh;
pub mod multigraph;
pub mod operators;
pub mod rescale;
pub mod solver;
pub mod stability;
pub mod vec3;

pub use error::{Error, Result};
pub use forms::{compute_forms_and_shape, FundamentalForms, ShapeData};
pub use grid::{ParamGrid, ScalarField};
pub use mesh::{build_catenoid, build_helicoid, build_reference, ReferenceKind, SurfaceMesh};
pub use multigraph::{detect, unwrap_to_cover, verify_certificate, MultigraphCertificate};
pub use operators::OperatorContext;
pub use solver::{successive_approximation, SolveReport, SolverConfig};
pub use stability::{bishop_check, delta_stability_test, local_flatness_checks, StabilityReport};
