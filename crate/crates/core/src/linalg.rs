//! Sparse symmetric positive-definite solves for the stitching normal
//! equations.
//!
//! The matrix is reordered with reverse Cuthill–McKee and factored as
//! `L Lᵀ` in row-envelope (skyline) storage. Mesh Laplacians reorder to a
//! narrow band, so the envelope stays small for panel-sized problems.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("non-positive pivot {value:e} at row {pivot}")]
pub struct FactorizationError {
    pub pivot: usize,
    pub value: f64,
}

/// Accumulates the lower triangle of a symmetric matrix.
#[derive(Debug, Clone, Default)]
pub struct SymmetricBuilder {
    n: usize,
    lower: HashMap<(usize, usize), f64>,
}

impl SymmetricBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            lower: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `value` at `(i, j)` and, implicitly, at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let key = if i >= j { (i, j) } else { (j, i) };
        *self.lower.entry(key).or_insert(0.0) += value;
    }

    /// Adds `weight · a aᵀ` for a sparse row `a`.
    pub fn add_outer(&mut self, row: &[(usize, f64)], weight: f64) {
        for (p, &(i, vi)) in row.iter().enumerate() {
            for &(j, vj) in &row[..p] {
                if i == j {
                    // merged duplicate: contributes 2·vi·vj on the diagonal
                    self.add(i, i, 2.0 * weight * vi * vj);
                } else {
                    self.add(i, j, weight * vi * vj);
                }
            }
            self.add(i, i, weight * vi * vi);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i >= j { (i, j) } else { (j, i) };
        self.lower.get(&key).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (&(i, j), &v) in &self.lower {
            out[i][j] = v;
            out[j][i] = v;
        }
        out
    }

    pub fn factor(&self) -> Result<EnvelopeCholesky, FactorizationError> {
        EnvelopeCholesky::factor(self)
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn reverse_cuthill_mckee(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    row_start: Vec<usize>,
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(matrix: &SymmetricBuilder) -> Result<Self, FactorizationError> {
        let n = matrix.n;
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in matrix.lower.keys() {
            if i != j {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let perm = reverse_cuthill_mckee(n, &adjacency);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for &(i, j) in matrix.lower.keys() {
            let (a, b) = (inv[i], inv[j]);
            let (r, c) = if a >= b { (a, b) } else { (b, a) };
            first[r] = first[r].min(c);
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            row_start.push(total);
            total += i - first[i] + 1;
        }
        row_start.push(total);

        let mut values = vec![0.0; total];
        for (&(i, j), &v) in &matrix.lower {
            let (a, b) = (inv[i], inv[j]);
            let (r, c) = if a >= b { (a, b) } else { (b, a) };
            values[row_start[r] + c - first[r]] += v;
        }

        let mut chol = Self {
            n,
            perm,
            first,
            row_start,
            values,
        };
        chol.factor_in_place()?;
        Ok(chol)
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.row_start[i] + j - self.first[i]]
    }

    fn factor_in_place(&mut self) -> Result<(), FactorizationError> {
        for i in 0..self.n {
            let fi = self.first[i];
            for j in fi..i {
                let fj = self.first[j];
                let lo = fi.max(fj);
                let mut s = self.at(i, j);
                for k in lo..j {
                    s -= self.at(i, k) * self.at(j, k);
                }
                let idx = self.row_start[i] + j - fi;
                self.values[idx] = s / self.at(j, j);
            }
            let mut d = self.at(i, i);
            for k in fi..i {
                let l = self.at(i, k);
                d -= l * l;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(FactorizationError { pivot: i, value: d });
            }
            let idx = self.row_start[i] + i - fi;
            self.values[idx] = d.sqrt();
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Envelope size (stored lower-triangle entries).
    pub fn envelope(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.at(i, k) * y[k];
            }
            y[i] = s / self.at(i, i);
        }
        for i in (0..n).rev() {
            let xi = y[i] / self.at(i, i);
            y[i] = xi;
            for k in self.first[i]..i {
                y[k] -= self.at(i, k) * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_spd_against_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let n = 5 + trial * 3;
            let mut b = SymmetricBuilder::new(n);
            // sparse random rows -> AᵀA + I is SPD
            for _ in 0..3 * n {
                let k = rng.random_range(1..4);
                let row: Vec<(usize, f64)> = (0..k)
                    .map(|_| (rng.random_range(0..n), rng.random_range(-2.0..2.0)))
                    .collect();
                b.add_outer(&row, rng.random_range(0.1..3.0));
            }
            for i in 0..n {
                b.add(i, i, 1.0);
            }
            let dense = b.to_dense();
            let a = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x = b.factor().unwrap().solve(&rhs);
            let expected = a.clone().lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
            for i in 0..n {
                assert!((x[i] - expected[i]).abs() < 1e-9 * (1.0 + expected[i].abs()));
            }
        }
    }

    #[test]
    fn duplicate_indices_in_row_merge() {
        let mut b = SymmetricBuilder::new(2);
        b.add_outer(&[(0, 1.0), (0, 2.0), (1, 1.0)], 1.0);
        // row is effectively (3, 1)
        assert_eq!(b.get(0, 0), 9.0);
        assert_eq!(b.get(1, 0), 3.0);
        assert_eq!(b.get(1, 1), 1.0);
    }

    #[test]
    fn singular_matrix_fails() {
        let mut b = SymmetricBuilder::new(2);
        b.add_outer(&[(0, 1.0), (1, -1.0)], 1.0);
        assert!(b.factor().is_err());
    }

    #[test]
    fn rcm_is_a_permutation() {
        let adjacency = vec![vec![3], vec![2], vec![1, 3], vec![0, 2], vec![]];
        let mut perm = reverse_cuthill_mckee(5, &adjacency);
        perm.sort_unstable();
        assert_eq!(perm, vec![0, 1, 2, 3, 4]);
    }
}
