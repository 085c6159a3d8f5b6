//! Source, target and weighted non-backtracking matrices of a symmetric
//! zero-diagonal matrix, and the determinant identity that ties the
//! non-backtracking operator to a quadratic pencil on the vertices.

use crate::error::{Error, Result};
use crate::linalg::{det, DenseMatrix, SymWeightedMatrix};

/// Largest edge-space dimension `2m` for which the dense bundle is built.
pub const EDGE_DIM_CAP: usize = 6000;

/// The `2m` oriented edges of a weighted graph.
///
/// Ids `0..m` are the edges `(u, v)` with `u < v` in lexicographic order;
/// id `e + m` is the reversal of `e`. The reversal map is therefore a swap of
/// the two halves.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedEdgeIndex {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl OrientedEdgeIndex {
    pub fn new(a: &SymWeightedMatrix) -> Self {
        let m = a.edge_count();
        let mut edges = Vec::with_capacity(2 * m);
        let mut weights = Vec::with_capacity(2 * m);
        for &(u, v, w) in a.edges() {
            edges.push((u, v));
            weights.push(w);
        }
        for i in 0..m {
            let (u, v) = edges[i];
            edges.push((v, u));
            weights.push(weights[i]);
        }
        OrientedEdgeIndex { n: a.n(), edges, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn target(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// `A_e`, the same for both orientations.
    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn inverse_of(&self, e: usize) -> usize {
        let m = self.m();
        if e < m {
            e + m
        } else {
            e - m
        }
    }

    pub fn pair_id(&self, e: usize) -> usize {
        e % self.m()
    }

    /// Id of the oriented edge `(u, v)`, if present.
    pub fn find(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        let i = self.edges[..self.m()].binary_search(&key).ok()?;
        Some(if u < v { i } else { i + self.m() })
    }

    /// Oriented edges leaving each vertex, in id order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (e, &(u, _)) in self.edges.iter().enumerate() {
            out[u].push(e);
        }
        out
    }

    /// Signed square-root factor of edge `e` at its source: `σ√|A_e|` when
    /// `s(e) < t(e)`, else `√|A_e|`.
    pub fn source_factor(&self, e: usize) -> f64 {
        let (u, v) = self.edges[e];
        let w = self.weights[e];
        if u < v {
            w.signum() * w.abs().sqrt()
        } else {
            w.abs().sqrt()
        }
    }

    /// Signed square-root factor of edge `e` at its target: `σ√|A_e|` when
    /// `t(e) < s(e)`, else `√|A_e|`.
    pub fn target_factor(&self, e: usize) -> f64 {
        let (u, v) = self.edges[e];
        let w = self.weights[e];
        if v < u {
            w.signum() * w.abs().sqrt()
        } else {
            w.abs().sqrt()
        }
    }

    /// Non-backtracking weight `B_ef`; zero unless `t(e) = s(f)` and `f ≠ e⁻¹`.
    pub fn b_entry(&self, e: usize, f: usize) -> f64 {
        if self.target(e) != self.source(f) || f == self.inverse_of(e) {
            0.0
        } else {
            self.target_factor(e) * self.source_factor(f)
        }
    }
}

/// Dense matrices `S, T` (n×2m), `Q` (m×m), `J, L, B` (2m×2m), `D` (n×n).
#[derive(Clone, Debug)]
pub struct GraphMatrices {
    pub s: DenseMatrix,
    pub t: DenseMatrix,
    pub q: DenseMatrix,
    pub j: DenseMatrix,
    pub l: DenseMatrix,
    pub b: DenseMatrix,
    pub d: DenseMatrix,
    pub index: OrientedEdgeIndex,
}

impl GraphMatrices {
    /// `B + L − J`, the operator whose real spectrum drives the Löwner bound.
    pub fn b_plus_l_minus_j(&self) -> DenseMatrix {
        let two_m = self.index.len();
        DenseMatrix::from_fn(two_m, two_m, |e, f| self.b[(e, f)] + self.l[(e, f)] - self.j[(e, f)])
    }
}

pub fn build(a: &SymWeightedMatrix) -> Result<GraphMatrices> {
    let index = OrientedEdgeIndex::new(a);
    let (n, m, two_m) = (a.n(), index.m(), index.len());
    if two_m > EDGE_DIM_CAP {
        return Err(Error::TooLarge { what: "oriented edge count", size: two_m, cap: EDGE_DIM_CAP });
    }
    let mut s = DenseMatrix::zeros(n, two_m);
    let mut t = DenseMatrix::zeros(n, two_m);
    let mut j = DenseMatrix::zeros(two_m, two_m);
    let mut l = DenseMatrix::zeros(two_m, two_m);
    for e in 0..two_m {
        let (u, v) = index.edge(e);
        s[(u, e)] = index.source_factor(e);
        t[(v, e)] = index.target_factor(e);
        let inv = index.inverse_of(e);
        j[(e, inv)] = 1.0;
        l[(e, inv)] = index.weight(e).abs();
    }
    let q = DenseMatrix::from_fn(m, m, |x, y| if x == y { index.weight(x).abs() } else { 0.0 });
    let out = index.out_edges();
    let mut b = DenseMatrix::zeros(two_m, two_m);
    for e in 0..two_m {
        for &f in &out[index.target(e)] {
            b[(e, f)] = index.b_entry(e, f);
        }
    }
    let d = DenseMatrix::from_diag(&a.abs_degrees());
    Ok(GraphMatrices { s, t, q, j, l, b, d, index })
}

/// [`build`] from a dense matrix; a nonzero diagonal entry is reported by index.
pub fn build_dense(a: &DenseMatrix) -> Result<GraphMatrices> {
    build(&SymWeightedMatrix::from_dense(a, 0.0)?)
}

/// `[[A, I − D], [I, 0]]`, a `2n × 2n` linearization of the vertex pencil:
/// `det(I − uC) = det(I − uA + u²(D − I))`, so the characteristic polynomial
/// of `B + L − J` is `(x² − 1)^{m−n}` times that of this matrix.
pub fn companion(a: &SymWeightedMatrix) -> DenseMatrix {
    let n = a.n();
    let deg = a.abs_degrees();
    let mut c = DenseMatrix::zeros(2 * n, 2 * n);
    for &(u, v, w) in a.edges() {
        c[(u, v)] = w;
        c[(v, u)] = w;
    }
    for u in 0..n {
        c[(u, n + u)] = 1.0 - deg[u];
        c[(n + u, u)] = 1.0;
    }
    c
}

/// Both sides of the identity
/// `det(I − u(B + L − J)) = (1 − u²)^{m−n} det(I − uA + u²D − u²I)`.
pub fn ihara_bass_sides(a: &SymWeightedMatrix, u: f64) -> Result<(f64, f64)> {
    if u.abs() == 1.0 {
        return Err(Error::IdentitySingular { u });
    }
    let g = build(a)?;
    let two_m = g.index.len();
    let mut lhs_m = g.b_plus_l_minus_j().scaled(-u);
    for e in 0..two_m {
        lhs_m[(e, e)] += 1.0;
    }
    let lhs = det(&lhs_m)?;
    let n = a.n();
    let deg = a.abs_degrees();
    let mut vm = a.to_dense().scaled(-u);
    for x in 0..n {
        vm[(x, x)] += 1.0 + u * u * (deg[x] - 1.0);
    }
    let exponent = g.index.m() as i32 - n as i32;
    let rhs = (1.0 - u * u).powi(exponent) * det(&vm)?;
    Ok((lhs, rhs))
}

/// `|LHS − RHS| / max(1, |RHS|)` for the identity of [`ihara_bass_sides`].
pub fn ihara_bass_residual(a: &SymWeightedMatrix, u: f64) -> Result<f64> {
    let (lhs, rhs) = ihara_bass_sides(a, u)?;
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

/// Embeds `B` into the `2n² × 2n²` space indexed by ordered vertex pairs:
/// the oriented edge `(u, v)` sits at position `u·n + v`; rows and columns
/// `n²..2n²` and all non-edges are zero.
pub fn extend_b(g: &GraphMatrices) -> DenseMatrix {
    let n = g.index.n();
    let mut out = DenseMatrix::zeros(2 * n * n, 2 * n * n);
    let pos: Vec<usize> = g.index.edges().iter().map(|&(u, v)| u * n + v).collect();
    for (e, &pe) in pos.iter().enumerate() {
        for (f, &pf) in pos.iter().enumerate() {
            out[(pe, pf)] = g.b[(e, f)];
        }
    }
    out
}
