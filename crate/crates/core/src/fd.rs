//! Second-order finite differences on structured grids.
//!
//! Central stencils at interior nodes, second-order one-sided stencils on
//! the boundary ring, so every derivative field is O(h^2) accurate up to
//! the edge of the grid.

use crate::grid::ParamGrid;

/// First derivative along `s` of a nodal quantity.
pub fn d_s(grid: &ParamGrid, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let h = grid.h_s();
    let n = grid.n_s;
    let mut out = vec![0.0; grid.node_count()];
    for (i, j) in grid.nodes() {
        let v = if i == 0 {
            (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2.0 * h)
        } else {
            (f(i + 1, j) - f(i - 1, j)) / (2.0 * h)
        };
        out[grid.idx(i, j)] = v;
    }
    out
}

/// First derivative along `t` of a nodal quantity.
pub fn d_t(grid: &ParamGrid, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let h = grid.h_t();
    let n = grid.n_t;
    let mut out = vec![0.0; grid.node_count()];
    for (i, j) in grid.nodes() {
        let v = if j == 0 {
            (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * h)
        } else if j == n - 1 {
            (3.0 * f(i, n - 1) - 4.0 * f(i, n - 2) + f(i, n - 3)) / (2.0 * h)
        } else {
            (f(i, j + 1) - f(i, j - 1)) / (2.0 * h)
        };
        out[grid.idx(i, j)] = v;
    }
    out
}

/// Second derivative along `s`.
pub fn d_ss(grid: &ParamGrid, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let h2 = grid.h_s() * grid.h_s();
    let n = grid.n_s;
    let mut out = vec![0.0; grid.node_count()];
    for (i, j) in grid.nodes() {
        let v = if i == 0 {
            (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) / h2
        } else if i == n - 1 {
            (2.0 * f(n - 1, j) - 5.0 * f(n - 2, j) + 4.0 * f(n - 3, j) - f(n - 4, j)) / h2
        } else {
            (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / h2
        };
        out[grid.idx(i, j)] = v;
    }
    out
}

/// Second derivative along `t`.
pub fn d_tt(grid: &ParamGrid, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let h2 = grid.h_t() * grid.h_t();
    let n = grid.n_t;
    let mut out = vec![0.0; grid.node_count()];
    for (i, j) in grid.nodes() {
        let v = if j == 0 {
            (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) / h2
        } else if j == n - 1 {
            (2.0 * f(i, n - 1) - 5.0 * f(i, n - 2) + 4.0 * f(i, n - 3) - f(i, n - 4)) / h2
        } else {
            (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / h2
        };
        out[grid.idx(i, j)] = v;
    }
    out
}

/// Mixed derivative: `t`-derivative of the `s`-derivative field.
pub fn d_st(grid: &ParamGrid, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let fs = d_s(grid, f);
    d_t(grid, |i, j| fs[grid.idx(i, j)])
}
