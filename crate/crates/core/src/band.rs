//! Banded linear systems with partial-pivoting LU.
//!
//! Storage follows the LAPACK band layout: entry `(i, j)` lives at row
//! `kl + ku + i - j` of column `j`, and the leading `kl` rows hold the
//! fill-in produced by row pivoting, for `2 kl + ku + 1` stored rows in
//! total. Factor once, then reuse the factorization across many
//! right-hand sides.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` superdiagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self { n, kl, ku, ld, ab: vec![0.0; n * ld] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "({i},{j}) outside band");
        (self.kl + self.ku + i - j) + j * self.ld
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.ab[s] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku < j || j + self.kl < i {
            return 0.0;
        }
        self.ab[self.slot(i, j)]
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                y[i] += self.ab[self.slot(i, j)] * x[j];
            }
        }
        y
    }

    /// In-place LU with partial pivoting (band variant of `getrf`).
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let kv = kl + ku;
        let ab = &mut self.ab;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0usize;
            let mut amax = 0.0f64;
            for k in 0..=km {
                let v = ab[kv + k + j * ld].abs();
                if v > amax {
                    amax = v;
                    jp = k;
                }
            }
            ipiv[j] = j + jp;
            if amax == 0.0 || !amax.is_finite() {
                return Err(Error::SpectralDegeneracy(format!(
                    "zero pivot in banded LU at column {j}"
                )));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for col in j..=ju {
                    ab.swap(kv + j - col + col * ld, kv + j + jp - col + col * ld);
                }
            }
            if km > 0 {
                let piv = ab[kv + j * ld];
                for k in 1..=km {
                    ab[kv + k + j * ld] /= piv;
                }
                for col in j + 1..=ju {
                    let f = ab[kv + j - col + col * ld];
                    if f != 0.0 {
                        for k in 1..=km {
                            ab[kv + j + k - col + col * ld] -= ab[kv + k + j * ld] * f;
                        }
                    }
                }
            }
        }
        Ok(BandLu { n, kl, ku, ld, ab: self.ab, ipiv })
    }
}

/// Factored band matrix; `solve` works on a right-hand side in place.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (kl, ku, ld) = (self.kl, self.ku, self.ld);
        let kv = kl + ku;
        for j in 0..self.n.saturating_sub(1) {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(self.n - 1 - j);
            for k in 1..=km {
                b[j + k] -= self.ab[kv + k + j * ld] * b[j];
            }
        }
        for j in (0..self.n).rev() {
            b[j] /= self.ab[kv + j * ld];
            let lm = (kl + ku).min(j);
            for k in 1..=lm {
                b[j - k] -= self.ab[kv - k + j * ld] * b[j];
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tridiagonal_poisson() {
        // -u'' = 1 on (0,1), u(0) = u(1) = 0, n interior nodes
        let n = 99;
        let h = 1.0 / (n + 1) as f64;
        let mut m = BandMatrix::new(n, 1, 1);
        for i in 0..n {
            m.set(i, i, 2.0 / (h * h));
            if i > 0 {
                m.set(i, i - 1, -1.0 / (h * h));
            }
            if i + 1 < n {
                m.set(i, i + 1, -1.0 / (h * h));
            }
        }
        let lu = m.factor().unwrap();
        let x = lu.solve(&vec![1.0; n]);
        for (i, xi) in x.iter().enumerate() {
            let s = (i + 1) as f64 * h;
            assert!((xi - 0.5 * s * (1.0 - s)).abs() < 1e-12);
        }
    }

    #[test]
    fn random_band_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(12usize, 3usize, 2usize), (40, 5, 5), (25, 1, 4)] {
            let mut m = BandMatrix::new(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    m.set(i, j, rng.gen_range(-1.0..1.0));
                }
                m.add(i, i, 5.0);
            }
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = m.mat_vec(&x_true);
            let x = m.clone().factor().unwrap().solve(&b);
            for k in 0..n {
                assert!((x[k] - x_true[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]] requires a row swap
        let mut m = BandMatrix::new(2, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let lu = m.factor().unwrap();
        let x = lu.solve(&[3.0, 4.0]);
        assert!((x[0] - 4.0).abs() < 1e-14 && (x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut m = BandMatrix::new(3, 1, 1);
        m.set(0, 0, 1.0);
        m.set(1, 1, 1.0);
        // row 2 left zero
        assert!(m.factor().is_err());
    }
}
