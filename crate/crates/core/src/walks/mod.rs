//! Walk combinatorics behind the trace method: non-backtracking walks and
//! their weighted sums, block walks, tangle-freeness, canonical-walk counts,
//! random sparse signed graphs and hyper-walk reveal classification.

mod canonical;
mod gamma;
mod hyper;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::SymWeightedMatrix;

pub use canonical::{canonical_histogram, count_canonical, lemma_bound, CANONICAL_NODE_CAP};
pub use gamma::{rho_b, rho_b_experiment, sample_gamma_graph, RhoRecord, RhoReport};
pub use hyper::{classify_reveals, is_hyper_tangle_free, Conditions, HyperBlock, HyperWalk, Reveal, RevealReport};

/// Largest number of complete walks an enumeration may visit.
pub const WALK_CAP: u64 = 10_000_000;

/// An oriented edge `(source, target)`.
pub type Edge = (usize, usize);

fn undirected((u, v): Edge) -> Edge {
    (u.min(v), u.max(v))
}

/// A walk `v₁ … v_{z+1}` with consecutive vertices distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    vertices: Vec<usize>,
}

impl Walk {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::MalformedWalk("a walk needs at least one edge".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedWalk(format!("{vertices:?} repeats a vertex in place")));
        }
        Ok(Walk { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of edges `z`.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn first_edge(&self) -> Edge {
        (self.vertices[0], self.vertices[1])
    }

    pub fn last_edge(&self) -> Edge {
        let z = self.len();
        (self.vertices[z - 1], self.vertices[z])
    }

    pub fn is_non_backtracking(&self) -> bool {
        self.vertices.windows(3).all(|w| w[0] != w[2])
    }

    pub fn vertex_count(&self) -> usize {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Traversal count of each undirected edge.
    pub fn multiplicities(&self) -> BTreeMap<Edge, usize> {
        let mut m = BTreeMap::new();
        for e in self.edges() {
            *m.entry(undirected(e)).or_insert(0) += 1;
        }
        m
    }

    pub fn edge_count(&self) -> usize {
        self.multiplicities().len()
    }
}

/// `|V(W)| ≥ |E(W)| − t + 1`, with `E(W)` the distinct undirected edges.
pub fn is_tangle_free(w: &Walk, t: usize) -> bool {
    w.vertex_count() + t > w.edge_count()
}

/// A closed chain of `2q` non-backtracking walks of a common length `z`,
/// where each block starts by reversing the last edge of the previous one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockWalk {
    blocks: Vec<Walk>,
}

impl BlockWalk {
    pub fn new(blocks: Vec<Walk>) -> Result<Self> {
        if blocks.is_empty() || blocks.len() % 2 != 0 {
            return Err(Error::MalformedWalk(format!("{} blocks; need a positive even count", blocks.len())));
        }
        let z = blocks[0].len();
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != z {
                return Err(Error::MalformedWalk(format!("block {i} has length {}, expected {z}", b.len())));
            }
            if !b.is_non_backtracking() {
                return Err(Error::MalformedWalk(format!("block {i} backtracks")));
            }
            let next = &blocks[(i + 1) % blocks.len()];
            let (a, c) = b.last_edge();
            if next.first_edge() != (c, a) {
                return Err(Error::MalformedWalk(format!("block {i} is not linked to the next block")));
            }
        }
        Ok(BlockWalk { blocks })
    }

    pub fn blocks(&self) -> &[Walk] {
        &self.blocks
    }

    pub fn q(&self) -> usize {
        self.blocks.len() / 2
    }

    pub fn z(&self) -> usize {
        self.blocks[0].len()
    }

    fn all_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().flat_map(|b| b.vertices.iter().copied())
    }

    pub fn vertex_count(&self) -> usize {
        let mut v: Vec<usize> = self.all_vertices().collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Traversal counts summed over blocks.
    pub fn multiplicities(&self) -> BTreeMap<Edge, usize> {
        let mut m = BTreeMap::new();
        for e in self.blocks.iter().flat_map(Walk::edges) {
            *m.entry(undirected(e)).or_insert(0) += 1;
        }
        m
    }

    pub fn edge_count(&self) -> usize {
        self.multiplicities().len()
    }

    /// Every edge traversed at least twice.
    pub fn is_interesting(&self) -> bool {
        self.multiplicities().values().all(|&c| c >= 2)
    }

    /// Every block is `t`-tangle-free.
    pub fn is_tangle_free(&self, t: usize) -> bool {
        self.blocks.iter().all(|b| is_tangle_free(b, t))
    }

    /// Vertices are labelled `0, 1, 2, …` in order of first visit.
    pub fn is_canonical(&self) -> bool {
        let mut next = 0;
        for v in self.all_vertices() {
            if v == next {
                next += 1;
            } else if v > next {
                return false;
            }
        }
        true
    }
}

struct Adjacency {
    nbrs: Vec<Vec<usize>>,
}

impl Adjacency {
    fn new(a: &SymWeightedMatrix) -> Self {
        let mut nbrs = vec![Vec::new(); a.n()];
        for &(u, v, _) in a.edges() {
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        for list in &mut nbrs {
            list.sort_unstable();
        }
        Adjacency { nbrs }
    }

    fn check_edge(&self, a: &SymWeightedMatrix, (u, v): Edge) -> Result<f64> {
        let w = if u < a.n() && v < a.n() && u != v { a.get(u, v) } else { 0.0 };
        if w == 0.0 {
            return Err(Error::invalid(format!("({u}, {v}) is not an edge of the graph")));
        }
        Ok(w)
    }
}

/// Visits every length-`z` non-backtracking walk starting with `e` and
/// ending with `f`, in lexicographic order of vertex sequences.
pub fn for_each_nbw(a: &SymWeightedMatrix, e: Edge, f: Edge, z: usize, mut visit: impl FnMut(&[usize])) -> Result<()> {
    if z == 0 {
        return Err(Error::invalid("walk length z must be at least 1"));
    }
    let adj = Adjacency::new(a);
    adj.check_edge(a, e)?;
    adj.check_edge(a, f)?;
    if z == 1 {
        if e == f {
            visit(&[e.0, e.1]);
        }
        return Ok(());
    }
    let mut path = vec![e.0, e.1];
    let mut nodes = 0u64;
    dfs(&adj, &mut path, z + 1, f, &mut nodes, &mut visit)
}

fn dfs(adj: &Adjacency, path: &mut Vec<usize>, len: usize, f: Edge, nodes: &mut u64, visit: &mut impl FnMut(&[usize])) -> Result<()> {
    let k = path.len();
    if k == len {
        *nodes += 1;
        if *nodes > WALK_CAP {
            return Err(Error::TooLarge { what: "walk enumeration", size: *nodes as usize, cap: WALK_CAP as usize });
        }
        if (path[k - 2], path[k - 1]) == f {
            visit(path);
        }
        return Ok(());
    }
    let (prev, cur) = (path[k - 2], path[k - 1]);
    // The final step must enter f's target from f's source.
    let last = k + 1 == len;
    for &next in &adj.nbrs[cur] {
        if next == prev || (last && (cur, next) != f) {
            continue;
        }
        path.push(next);
        dfs(adj, path, len, f, nodes, visit)?;
        path.pop();
    }
    Ok(())
}

pub fn enumerate_nbw(a: &SymWeightedMatrix, e: Edge, f: Edge, z: usize) -> Result<Vec<Walk>> {
    let mut out = Vec::new();
    for_each_nbw(a, e, f, z, |p| out.push(Walk { vertices: p.to_vec() }))?;
    Ok(out)
}

/// `σ√|A_e|` when the factor's endpoint test holds, `√|A_e|` otherwise.
fn signed_root(w: f64, flip: bool) -> f64 {
    let r = w.abs().sqrt();
    if flip {
        w.signum() * r
    } else {
        r
    }
}

/// Weight of one block: `σ̃_{e₁} σ̃_{e_z} √|A_{e₁} A_{e_z}| Π_{s=2}^{z−1} A_{e_s}`,
/// where the first edge carries its sign when it runs downward and the last
/// when it runs upward.
fn walk_weight(a: &SymWeightedMatrix, w: &[usize]) -> f64 {
    let z = w.len() - 1;
    let first = signed_root(a.get(w[0], w[1]), w[1] < w[0]);
    let last = signed_root(a.get(w[z - 1], w[z]), w[z - 1] < w[z]);
    let inner: f64 = (1..z - 1).map(|s| a.get(w[s], w[s + 1])).product();
    first * last * inner
}

/// `(B^{z−1})_{ef}` as a sum over non-backtracking walks. For `z = 1` this is
/// the identity entry.
pub fn nbw_power_entry(a: &SymWeightedMatrix, e: Edge, f: Edge, z: usize) -> Result<f64> {
    if z == 1 {
        let adj = Adjacency::new(a);
        adj.check_edge(a, e)?;
        adj.check_edge(a, f)?;
        return Ok(if e == f { 1.0 } else { 0.0 });
    }
    let mut sum = 0.0;
    for_each_nbw(a, e, f, z, |w| sum += walk_weight(a, w))?;
    Ok(sum)
}

/// `Tr[(B^{z−1}(B^{z−1})ᵀ)^q]` as a sum over block walks with `2q` blocks of
/// length `z`. The sign factors at each link cancel, so a block walk weighs
/// `Π_i √|A_{e₁(W_i)} A_{e_z(W_i)}| Π_{s=2}^{z−1} A_{e_s(W_i)}`.
pub fn trace_walk_sum(a: &SymWeightedMatrix, q: usize, z: usize) -> Result<f64> {
    if q == 0 || z < 2 {
        return Err(Error::invalid(format!("trace walk sum needs q ≥ 1 and z ≥ 2, got q={q}, z={z}")));
    }
    let adj = Adjacency::new(a);
    let mut st = TraceState { adj: &adj, a, blocks: 2 * q, z, nodes: 0, sum: 0.0 };
    for &(u, v, _) in a.edges() {
        for start in [(u, v), (v, u)] {
            let mut path = vec![start.0, start.1];
            st.block(0, &mut path, start, 1.0)?;
        }
    }
    Ok(st.sum)
}

struct TraceState<'a> {
    adj: &'a Adjacency,
    a: &'a SymWeightedMatrix,
    blocks: usize,
    z: usize,
    nodes: u64,
    sum: f64,
}

impl TraceState<'_> {
    fn block(&mut self, i: usize, path: &mut Vec<usize>, start: Edge, acc: f64) -> Result<()> {
        let k = path.len();
        if k == self.z + 1 {
            self.nodes += 1;
            if self.nodes > WALK_CAP {
                return Err(Error::TooLarge { what: "block walk enumeration", size: self.nodes as usize, cap: WALK_CAP as usize });
            }
            let a = self.a;
            let ends = (a.get(path[0], path[1]) * a.get(path[k - 2], path[k - 1])).abs().sqrt();
            let inner: f64 = (1..self.z - 1).map(|s| a.get(path[s], path[s + 1])).product();
            let acc = acc * ends * inner;
            let (p, c) = (path[k - 2], path[k - 1]);
            if i + 1 == self.blocks {
                if (c, p) == start {
                    self.sum += acc;
                }
                return Ok(());
            }
            let mut next = vec![c, p];
            return self.block(i + 1, &mut next, start, acc);
        }
        let (prev, cur) = (path[k - 2], path[k - 1]);
        // The last block must close on the reverse of the starting edge.
        let closing = i + 1 == self.blocks && k == self.z;
        if closing && cur != start.1 {
            return Ok(());
        }
        for idx in 0..self.adj.nbrs[cur].len() {
            let next = self.adj.nbrs[cur][idx];
            if next == prev || (closing && next != start.0) {
                continue;
            }
            path.push(next);
            self.block(i, path, start, acc)?;
            path.pop();
        }
        Ok(())
    }
}
