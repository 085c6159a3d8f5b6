use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng::stream_rng;

/// Symmetric real matrix with zero diagonal, stored as one weight per
/// unordered pair `{u, v}`. Read as the adjacency matrix of a weighted graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SymWeightedMatrix {
    n: usize,
    // (u, v, w) with u < v, sorted, w != 0
    entries: Vec<(usize, usize, f64)>,
}

impl SymWeightedMatrix {
    pub fn empty(n: usize) -> Self {
        SymWeightedMatrix { n, entries: Vec::new() }
    }

    /// Builds from `(u, v, w)` triples in any orientation. Zero weights are
    /// dropped; a pair listed twice is an error.
    pub fn from_entries(n: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut entries = Vec::new();
        for (u, v, w) in triples {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("entry ({u},{v}) out of range for n={n}")));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("edge weight"));
            }
            if w == 0.0 {
                continue;
            }
            if u == v {
                return Err(Error::DiagonalEntry { index: u });
            }
            entries.push((u.min(v), u.max(v), w));
        }
        entries.sort_by_key(|&(u, v, _)| (u, v));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::invalid(format!("pair ({},{}) given twice", w[0].0, w[0].1)));
        }
        Ok(SymWeightedMatrix { n, entries })
    }

    /// Reads a dense matrix, requiring an exactly zero diagonal and symmetry
    /// within `tol`. The upper triangle supplies the weights.
    pub fn from_dense(m: &DenseMatrix, tol: f64) -> Result<Self> {
        let n = m.require_square()?;
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::DiagonalEntry { index: i });
            }
        }
        let dev = m.asymmetry();
        if dev > tol {
            return Err(Error::Asymmetric { max_dev: dev, tol });
        }
        let mut entries = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let w = m[(u, v)];
                if w != 0.0 {
                    entries.push((u, v, w));
                }
            }
        }
        Ok(SymWeightedMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges (half the number of nonzero entries).
    pub fn edge_count(&self) -> usize {
        self.entries.len()
    }

    /// Edges `(u, v, w)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        let key = (u.min(v), u.max(v));
        self.entries
            .binary_search_by_key(&key, |&(a, b, _)| (a, b))
            .map_or(0.0, |i| self.entries[i].2)
    }

    pub fn negated(&self) -> Self {
        SymWeightedMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&(u, v, w)| (u, v, -w)).collect(),
        }
    }

    /// `D_uu = sum_w |A_uw|`.
    pub fn abs_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(u, v, w) in &self.entries {
            d[u] += w.abs();
            d[v] += w.abs();
        }
        d
    }

    /// Each pair `u < v` is present with probability `density`, with a weight
    /// uniform in `[−max_weight, max_weight]`. Pair number `r` draws from
    /// stream `r` of `seed`.
    pub fn random(n: usize, density: f64, max_weight: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) || !(max_weight.is_finite() && max_weight > 0.0) {
            return Err(Error::invalid(format!("density {density} or weight range {max_weight} out of range")));
        }
        let mut triples = Vec::new();
        let mut rank = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                let mut rng = stream_rng(seed, rank);
                rank += 1;
                if rng.random::<f64>() < density {
                    triples.push((u, v, rng.random_range(-max_weight..=max_weight)));
                }
            }
        }
        Self::from_entries(n, triples)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.entries {
            m[(u, v)] = w;
            m[(v, u)] = w;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip() {
        let a = SymWeightedMatrix::from_entries(3, [(2, 0, 1.5), (1, 2, -1.0)]).unwrap();
        assert_eq!(a.edges(), &[(0, 2, 1.5), (1, 2, -1.0)]);
        let b = SymWeightedMatrix::from_dense(&a.to_dense(), 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(2, 1), -1.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.abs_degrees(), vec![1.5, 1.0, 2.5]);
    }

    #[test]
    fn random_matrices() {
        let a = SymWeightedMatrix::random(8, 0.5, 2.0, 3).unwrap();
        assert_eq!(a, SymWeightedMatrix::random(8, 0.5, 2.0, 3).unwrap());
        assert!(a.edges().iter().all(|&(_, _, w)| w.abs() <= 2.0));
        assert_eq!(SymWeightedMatrix::random(8, 1.0, 1.0, 0).unwrap().edge_count(), 28);
        assert!(SymWeightedMatrix::random(8, 1.5, 1.0, 0).is_err());
    }

    #[test]
    fn rejects_diagonal_and_duplicates() {
        assert!(matches!(
            SymWeightedMatrix::from_entries(3, [(1, 1, 2.0)]),
            Err(Error::DiagonalEntry { index: 1 })
        ));
        assert!(SymWeightedMatrix::from_entries(3, [(0, 1, 2.0), (1, 0, 1.0)]).is_err());
        let mut d = DenseMatrix::zeros(2, 2);
        d[(1, 1)] = 1.0;
        assert!(matches!(SymWeightedMatrix::from_dense(&d, 0.0), Err(Error::DiagonalEntry { index: 1 })));
        d[(1, 1)] = 0.0;
        d[(0, 1)] = 1.0;
        assert!(matches!(SymWeightedMatrix::from_dense(&d, 1e-10), Err(Error::Asymmetric { .. })));
    }
}
