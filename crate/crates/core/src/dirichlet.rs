//! Dirichlet restrictions of `c0 * Laplacian + c1 * |A|^2` to a node
//! mask, assembled as banded systems.
//!
//! The matrix rows reuse [`OperatorContext::stencil_at`] verbatim, so a
//! factored solve satisfies `jacobi_apply(ctx, u) = w` at the unknown
//! nodes up to the factorization's rounding, with no separate
//! discretization gap. Unknowns are ordered grid-major; couplings reach
//! at most one grid row away, so the bandwidth is at most `n_s + 1`.

use crate::band::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::grid::{ParamGrid, ScalarField};
use crate::operators::{OperatorContext, STENCIL_OFFSETS};

/// Mask selecting every interior node.
pub fn interior_mask(grid: &ParamGrid) -> Vec<bool> {
    grid.nodes().map(|(i, j)| !grid.is_boundary(i, j)).collect()
}

/// True iff the masked nodes form one 4-connected component.
pub fn mask_connected(grid: &ParamGrid, mask: &[bool]) -> bool {
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return false;
    }
    let start = mask.iter().position(|&m| m).unwrap();
    let mut seen = vec![false; mask.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0usize;
    while let Some(k) = stack.pop() {
        reached += 1;
        let (i, j) = grid.ij(k);
        let mut push = |ii: usize, jj: usize| {
            let kk = grid.idx(ii, jj);
            if mask[kk] && !seen[kk] {
                seen[kk] = true;
                stack.push(kk);
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if i + 1 < grid.n_s {
            push(i + 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if j + 1 < grid.n_t {
            push(i, j + 1);
        }
    }
    reached == count
}

/// Unknown numbering for a masked Dirichlet problem.
#[derive(Debug, Clone)]
pub struct DirichletIndex {
    pub grid: ParamGrid,
    /// Linear grid indices of the unknowns, in grid order.
    pub nodes: Vec<usize>,
    /// Grid index -> unknown rank.
    pub rank: Vec<Option<usize>>,
}

impl DirichletIndex {
    pub fn new(grid: ParamGrid, mask: &[bool]) -> Result<Self> {
        if mask.len() != grid.node_count() {
            return Err(Error::GridMismatch);
        }
        let mut nodes = Vec::new();
        let mut rank = vec![None; mask.len()];
        for k in 0..mask.len() {
            if mask[k] {
                let (i, j) = grid.ij(k);
                if grid.is_boundary(i, j) {
                    return Err(Error::InvalidDomain(format!(
                        "mask includes boundary node ({i}, {j})"
                    )));
                }
                rank[k] = Some(nodes.len());
                nodes.push(k);
            }
        }
        if nodes.is_empty() {
            return Err(Error::InvalidDomain("empty node mask".into()));
        }
        Ok(Self { grid, nodes, rank })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Scatter an unknown vector into a full field (zero elsewhere).
    pub fn scatter(&self, x: &[f64]) -> ScalarField {
        let mut f = ScalarField::zeros(self.grid);
        for (r, &k) in self.nodes.iter().enumerate() {
            let (i, j) = self.grid.ij(k);
            f.set(i, j, x[r]);
        }
        f
    }

    /// Gather a full field onto the unknowns.
    pub fn gather(&self, f: &ScalarField) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|&k| {
                let (i, j) = self.grid.ij(k);
                f.at(i, j)
            })
            .collect()
    }
}

/// Assemble `c0 * Laplacian + c1 * |A|^2 - sigma * I` over the masked
/// unknowns with Dirichlet zero outside.
pub fn assemble(
    ctx: &OperatorContext,
    index: &DirichletIndex,
    c0: f64,
    c1: f64,
    sigma: f64,
) -> BandMatrix {
    let g = ctx.grid;
    // actual bandwidth of this mask's numbering
    let mut band = 0usize;
    for (r, &k) in index.nodes.iter().enumerate() {
        let (i, j) = g.ij(k);
        for (di, dj) in STENCIL_OFFSETS {
            let ii = (i as isize + di) as usize;
            let jj = (j as isize + dj) as usize;
            if let Some(c) = index.rank[g.idx(ii, jj)] {
                band = band.max(r.abs_diff(c));
            }
        }
    }
    let mut m = BandMatrix::new(index.n(), band, band);
    for (r, &k) in index.nodes.iter().enumerate() {
        let (i, j) = g.ij(k);
        let cf = ctx.stencil_at(i, j);
        for (s, (di, dj)) in STENCIL_OFFSETS.iter().enumerate() {
            let ii = (i as isize + di) as usize;
            let jj = (j as isize + dj) as usize;
            if let Some(c) = index.rank[g.idx(ii, jj)] {
                m.add(r, c, c0 * cf[s]);
            }
        }
        m.add(r, r, c1 * ctx.shape.a2[k] - sigma);
    }
    m
}

/// Factored Dirichlet operator ready for repeated solves.
pub struct DirichletSolver {
    pub index: DirichletIndex,
    lu: BandLu,
}

impl DirichletSolver {
    /// Factor `c0 * Laplacian + c1 * |A|^2 - sigma * I` on the mask.
    pub fn new(
        ctx: &OperatorContext,
        mask: &[bool],
        c0: f64,
        c1: f64,
        sigma: f64,
    ) -> Result<Self> {
        let index = DirichletIndex::new(ctx.grid, mask)?;
        let lu = assemble(ctx, &index, c0, c1, sigma).factor()?;
        Ok(Self { index, lu })
    }

    /// Solve with right-hand side `w` restricted to the unknowns; the
    /// result is zero outside the mask.
    pub fn solve_field(&self, w: &ScalarField) -> Result<ScalarField> {
        if !w.grid.compatible(&self.index.grid) {
            return Err(Error::GridMismatch);
        }
        let mut b = self.index.gather(w);
        self.lu.solve_in_place(&mut b);
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::SolveFailure("non-finite solution component".into()));
        }
        Ok(self.index.scatter(&b))
    }

    pub fn solve_raw(&self, b: &[f64]) -> Vec<f64> {
        self.lu.solve(b)
    }
}
