//! Structured parameter grids and nodal scalar fields.
//!
//! All meshes and fields in this crate live on a rectangular `(s, t)`
//! parameter grid with nodes at uniform spacing. Node `(i, j)` maps to the
//! linear index `j * n_s + i` (the `s` index varies fastest).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular parameter-domain grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_s: usize,
    pub n_t: usize,
}

impl ParamGrid {
    pub const MIN_NODES: usize = 5;

    pub fn new(s_min: f64, s_max: f64, t_min: f64, t_max: f64, n_s: usize, n_t: usize) -> Result<Self> {
        let grid = Self { s_min, s_max, t_min, t_max, n_s, n_t };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s < Self::MIN_NODES || self.n_t < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {} nodes per axis, got {}x{}",
                Self::MIN_NODES,
                self.n_s,
                self.n_t
            )));
        }
        if !(self.s_max > self.s_min) || !(self.t_max > self.t_min) {
            return Err(Error::InvalidGrid(format!(
                "degenerate parameter bounds s=[{}, {}], t=[{}, {}]",
                self.s_min, self.s_max, self.t_min, self.t_max
            )));
        }
        if ![self.s_min, self.s_max, self.t_min, self.t_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn h_s(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n_s - 1) as f64
    }

    #[inline]
    pub fn h_t(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    /// Largest grid spacing; the `h` of all O(h^2) statements.
    #[inline]
    pub fn max_spacing(&self) -> f64 {
        self.h_s().max(self.h_t())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n_s * self.n_t
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_s && j < self.n_t);
        j * self.n_s + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.n_s, idx / self.n_s)
    }

    #[inline]
    pub fn s_at(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.h_s()
    }

    #[inline]
    pub fn t_at(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.h_t()
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n_s - 1 || j == self.n_t - 1
    }

    /// Minimum number of grid steps to the boundary.
    #[inline]
    pub fn boundary_depth(&self, i: usize, j: usize) -> usize {
        i.min(self.n_s - 1 - i).min(j).min(self.n_t - 1 - j)
    }

    /// All `(i, j)` pairs in index order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n_s = self.n_s;
        (0..self.node_count()).map(move |k| (k % n_s, k / n_s))
    }

    /// Nodes at boundary depth >= `depth`.
    pub fn nodes_at_depth(&self, depth: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes().filter(move |&(i, j)| self.boundary_depth(i, j) >= depth)
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes_at_depth(1)
    }

    /// Grids agree on node layout (bounds may differ after rescaling).
    pub fn same_shape(&self, other: &ParamGrid) -> bool {
        self.n_s == other.n_s && self.n_t == other.n_t
    }

    pub fn compatible(&self, other: &ParamGrid) -> bool {
        self == other
    }
}

/// A function sampled on the nodes of a [`ParamGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: ParamGrid,
    value: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: ParamGrid) -> Self {
        Self { grid, value: vec![0.0; grid.node_count()] }
    }

    pub fn constant(grid: ParamGrid, c: f64) -> Self {
        Self { grid, value: vec![c; grid.node_count()] }
    }

    pub fn from_fn(grid: ParamGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut value = Vec::with_capacity(grid.node_count());
        for (i, j) in grid.nodes() {
            value.push(f(grid.s_at(i), grid.t_at(j)));
        }
        Self { grid, value }
    }

    pub fn from_values(grid: ParamGrid, value: Vec<f64>) -> Result<Self> {
        if value.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid {}x{}",
                value.len(),
                grid.n_s,
                grid.n_t
            )));
        }
        if !value.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite field value".into()));
        }
        Ok(Self { grid, value })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.value[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.value[k] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.value
    }

    pub fn sup_norm(&self) -> f64 {
        self.value.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup norm over nodes at boundary depth >= `depth`.
    pub fn sup_norm_at_depth(&self, depth: usize) -> f64 {
        self.grid
            .nodes_at_depth(depth)
            .fold(0.0, |m: f64, (i, j)| m.max(self.at(i, j).abs()))
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField { grid: self.grid, value: self.value.iter().map(|v| c * v).collect() }
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        assert!(self.grid.same_shape(&other.grid));
        ScalarField {
            grid: self.grid,
            value: self.value.iter().zip(&other.value).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        assert!(self.grid.same_shape(&other.grid));
        ScalarField {
            grid: self.grid,
            value: self.value.iter().zip(&other.value).map(|(a, b)| a + b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grid() {
        assert!(ParamGrid::new(0.0, 1.0, 0.0, 1.0, 4, 9).is_err());
        assert!(ParamGrid::new(0.0, 1.0, 0.0, 1.0, 9, 4).is_err());
        assert!(ParamGrid::new(1.0, 1.0, 0.0, 1.0, 9, 9).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = ParamGrid::new(-1.0, 1.0, 0.0, 2.0, 7, 9).unwrap();
        for (i, j) in g.nodes() {
            assert_eq!(g.ij(g.idx(i, j)), (i, j));
        }
        assert_eq!(g.node_count(), 63);
    }

    #[test]
    fn boundary_depth() {
        let g = ParamGrid::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        assert_eq!(g.boundary_depth(0, 3), 0);
        assert_eq!(g.boundary_depth(2, 2), 2);
        assert!(g.is_boundary(4, 2));
        assert!(!g.is_boundary(3, 2));
    }

    #[test]
    fn field_from_fn_samples_nodes() {
        let g = ParamGrid::new(0.0, 1.0, 0.0, 2.0, 5, 5).unwrap();
        let f = ScalarField::from_fn(g, |s, t| s + 10.0 * t);
        assert!((f.at(2, 1) - (0.5 + 5.0)).abs() < 1e-14);
        assert!((f.sup_norm() - 21.0).abs() < 1e-14);
    }

    #[test]
    fn from_values_rejects_bad_input() {
        let g = ParamGrid::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        assert!(ScalarField::from_values(g, vec![0.0; 24]).is_err());
        assert!(ScalarField::from_values(g, vec![f64::NAN; 25]).is_err());
    }
}
