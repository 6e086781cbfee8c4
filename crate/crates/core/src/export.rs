//! File emission: Wavefront-style meshes and per-node CSV sidecars.
//!
//! Numbers are printed with 17 significant digits so round-trips are
//! exact for f64.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::forms::ShapeData;
use crate::grid::ScalarField;
use crate::mesh::SurfaceMesh;
use crate::multigraph::SheetSamples;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Wavefront-style text: one `v` line per node (row-major, `i` fastest)
/// and `f` quads over the grid cells, counterclockwise in `(s, t)`.
pub fn obj_string(mesh: &SurfaceMesh) -> String {
    let g = mesh.grid;
    let mut out = String::new();
    for (i, j) in g.nodes() {
        let p = mesh.position(i, j);
        out.push_str(&format!("v {} {} {}\n", fmt(p[0]), fmt(p[1]), fmt(p[2])));
    }
    for j in 0..g.n_t - 1 {
        for i in 0..g.n_s - 1 {
            // 1-based vertex indices
            let a = g.idx(i, j) + 1;
            let b = g.idx(i + 1, j) + 1;
            let c = g.idx(i + 1, j + 1) + 1;
            let d = g.idx(i, j + 1) + 1;
            out.push_str(&format!("f {a} {b} {c} {d}\n"));
        }
    }
    out
}

pub fn write_obj(path: &Path, mesh: &SurfaceMesh) -> Result<()> {
    std::fs::write(path, obj_string(mesh))?;
    Ok(())
}

/// Per-node CSV with columns `i,j,s,t,H,K,A2,u`; `u` is zero when no
/// perturbation field is given.
pub fn node_csv_string(mesh: &SurfaceMesh, shape: &ShapeData, u: Option<&ScalarField>) -> String {
    let g = mesh.grid;
    let mut out = String::from("i,j,s,t,H,K,A2,u\n");
    for (i, j) in g.nodes() {
        let k = g.idx(i, j);
        let uv = u.map_or(0.0, |f| f.at(i, j));
        out.push_str(&format!(
            "{i},{j},{},{},{},{},{},{}\n",
            fmt(g.s_at(i)),
            fmt(g.t_at(j)),
            fmt(shape.h[k]),
            fmt(shape.k[k]),
            fmt(shape.a2[k]),
            fmt(uv)
        ));
    }
    out
}

pub fn write_node_csv(
    path: &Path,
    mesh: &SurfaceMesh,
    shape: &ShapeData,
    u: Option<&ScalarField>,
) -> Result<()> {
    std::fs::write(path, node_csv_string(mesh, shape, u))?;
    Ok(())
}

/// Sheet-sample CSV with columns `rho,theta,u`.
pub fn sheet_csv_string(samples: &SheetSamples) -> String {
    let mut out = String::from("rho,theta,u\n");
    for t in 0..samples.n_theta {
        for r in 0..samples.n_rho {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt(samples.rho_at(r)),
                fmt(samples.theta_at(t)),
                fmt(samples.at(r, t))
            ));
        }
    }
    out
}

pub fn write_sheet_csv(path: &Path, samples: &SheetSamples) -> Result<()> {
    std::fs::write(path, sheet_csv_string(samples))?;
    Ok(())
}

/// Per-iteration CSV for a solve report.
pub fn iteration_csv_string(records: &[crate::solver::IterationRecord]) -> String {
    let mut out = String::from("n,sup_u,sup_grad,c2_norm,step,contraction\n");
    for r in records {
        let c = r.contraction.map_or(String::from(""), fmt);
        out.push_str(&format!(
            "{},{},{},{},{},{c}\n",
            r.n,
            fmt(r.sup_u),
            fmt(r.sup_grad),
            fmt(r.c2_norm),
            fmt(r.step)
        ));
    }
    out
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)
        .map_err(|e| crate::error::Error::Io(std::io::Error::other(e)))?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::compute_forms_and_shape;
    use crate::grid::ParamGrid;
    use crate::mesh::build_helicoid;

    #[test]
    fn obj_counts_match_grid() {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 6, 9).unwrap();
        let m = build_helicoid(g).unwrap();
        let s = obj_string(&m);
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 54);
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 40);
    }

    #[test]
    fn node_csv_round_trips_f64() {
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 6, 6).unwrap();
        let m = build_helicoid(g).unwrap();
        let (_, shape) = compute_forms_and_shape(&m).unwrap();
        let s = node_csv_string(&m, &shape, None);
        let line = s.lines().nth(1).unwrap();
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8);
        let h: f64 = cols[4].parse().unwrap();
        assert_eq!(h, shape.h[0]);
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let g = ParamGrid::new(-1.0, 1.0, -1.0, 1.0, 6, 6).unwrap();
        let m = build_helicoid(g).unwrap();
        let p = dir.path().join("mesh.obj");
        write_obj(&p, &m).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("v "));
    }
}
