//! Run configuration. Every field has an explicit default and unknown
//! keys are rejected, so the emitted resolved copy is a complete,
//! reusable schema.

use helimorph::mesh::ReferenceKind;
use helimorph::solver::SolverConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    /// Grid, H target and iteration controls; the grid also defines the
    /// surface patch for every other command.
    pub solver: SolverConfig,
    pub analyze: AnalyzeSpec,
    pub stability: StabilityScanSpec,
    pub multigraph: MultigraphSpec,
    pub rescale: RescaleSpec,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            surface: SurfaceSpec::Helicoid,
            solver: SolverConfig::default(),
            analyze: AnalyzeSpec::default(),
            stability: StabilityScanSpec::default(),
            multigraph: MultigraphSpec::default(),
            rescale: RescaleSpec::default(),
            output_dir: "out".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceSpec {
    Helicoid,
    Catenoid,
    Reference { kind: ReferenceKind, radius: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeSpec {
    /// Verdict bound on the max interior Gauss residual.
    pub gauss_tol: f64,
}

impl Default for AnalyzeSpec {
    fn default() -> Self {
        Self { gauss_tol: 1e-2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityScanSpec {
    pub deltas: Vec<f64>,
    /// Geodesic ball radii; balls are centered at `center` (grid
    /// indices), defaulting to the middle node.
    pub radii: Vec<f64>,
    pub center: Option<(usize, usize)>,
}

impl Default for StabilityScanSpec {
    fn default() -> Self {
        Self { deltas: vec![0.0, 0.5, 0.9], radii: vec![0.25, 0.5, 1.0], center: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultigraphSpec {
    pub n: usize,
    pub omega: f64,
    pub epsilon: f64,
    /// Detect on the CMC perturbation of the surface instead of the
    /// surface itself.
    pub perturb_first: bool,
}

impl Default for MultigraphSpec {
    fn default() -> Self {
        Self { n: 2, omega: 2.0, epsilon: 0.5, perturb_first: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RescaleSpec {
    pub factor: f64,
    /// Verdict bound on the scaled curvature-law error, in units of
    /// `h^2`.
    pub law_tol_h2: f64,
}

impl Default for RescaleSpec {
    fn default() -> Self {
        Self { factor: 2.0, law_tol_h2: 1.0 }
    }
}

pub fn load(path: Option<&std::path::Path>) -> Result<RunConfig, String> {
    let cfg: RunConfig = match path {
        None => RunConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", p.display()))?
        }
    };
    cfg.solver.validate().map_err(|e| format!("invalid solver block: {e}"))?;
    Ok(cfg)
}
