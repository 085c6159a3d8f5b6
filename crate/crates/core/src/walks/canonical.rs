use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest number of DFS nodes a canonical-walk count may visit.
pub const CANONICAL_NODE_CAP: u64 = 500_000_000;

const MAX_LABELS: usize = 8;

/// `z^{4tq} (2zq)^{6tq(e−v+1)}`, the bound on canonical walks with `v`
/// vertices and `e` distinct edges.
pub fn lemma_bound(q: usize, z: usize, v: usize, e: usize, t: usize) -> f64 {
    let excess = e as f64 - v as f64 + 1.0;
    let tq = (t * q) as f64;
    (z as f64).powf(4.0 * tq) * ((2 * z * q) as f64).powf(6.0 * tq * excess)
}

#[derive(Clone, Copy)]
struct State {
    labels: usize,
    mult: [[u8; MAX_LABELS]; MAX_LABELS],
    distinct: usize,
    /// Edges traversed exactly once so far.
    singles: usize,
    block_vertices: u8,
    block_edges: u64,
}

impl State {
    fn traverse(&mut self, a: usize, b: usize) {
        let (u, v) = (a.min(b), a.max(b));
        let c = &mut self.mult[u][v];
        *c = c.saturating_add(1);
        match *c {
            1 => {
                self.distinct += 1;
                self.singles += 1;
            }
            2 => self.singles -= 1,
            _ => {}
        }
        self.block_vertices |= 1 << a | 1 << b;
        self.block_edges |= 1 << (u * MAX_LABELS + v);
    }

    fn block_excess(&self) -> usize {
        (self.block_edges.count_ones() + 1).saturating_sub(self.block_vertices.count_ones()) as usize
    }

    fn start_block(&mut self, a: usize, b: usize) {
        self.block_vertices = 0;
        self.block_edges = 0;
        self.traverse(a, b);
    }
}

struct Search {
    blocks: usize,
    z: usize,
    t: usize,
    max_labels: usize,
    max_edges: usize,
    nodes: u64,
    counts: BTreeMap<(usize, usize), u64>,
}

impl Search {
    /// Remaining edge traversals after the current one, counting the
    /// re-traversal of each link edge.
    fn remaining(&self, block: usize, walked: usize) -> usize {
        (self.blocks - 1 - block) * self.z + (self.z - walked)
    }

    fn extend(&mut self, st: State, block: usize, walked: usize, prev: usize, cur: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > CANONICAL_NODE_CAP {
            return Err(Error::TooLarge {
                what: "canonical walk enumeration nodes",
                size: self.nodes as usize,
                cap: CANONICAL_NODE_CAP as usize,
            });
        }
        if st.distinct > self.max_edges || st.block_excess() > self.t || st.singles > self.remaining(block, walked) {
            return Ok(());
        }
        if walked == self.z {
            if block + 1 == self.blocks {
                // The chain closes on the reverse of the first edge (0, 1).
                if (prev, cur) == (1, 0) && st.singles == 0 {
                    *self.counts.entry((st.labels, st.distinct)).or_insert(0) += 1;
                }
                return Ok(());
            }
            let mut next = st;
            next.start_block(cur, prev);
            return self.extend(next, block + 1, 1, cur, prev);
        }
        let top = st.labels.min(self.max_labels - 1);
        for v in 0..=top {
            if v == cur || v == prev {
                continue;
            }
            let mut next = st;
            if v == st.labels {
                next.labels += 1;
            }
            next.traverse(cur, v);
            self.extend(next, block, walked + 1, cur, v)?;
        }
        Ok(())
    }
}

/// Counts canonical, interesting block walks (`2q` blocks of length `z`,
/// each block `t`-tangle-free) by `(vertex count, distinct edge count)`,
/// restricted to at most `max_labels` vertices and `max_edges` edges.
pub fn canonical_histogram(
    q: usize,
    z: usize,
    t: usize,
    max_labels: usize,
    max_edges: usize,
) -> Result<BTreeMap<(usize, usize), u64>> {
    if q == 0 || z == 0 {
        return Err(Error::invalid(format!("canonical walks need q, z ≥ 1, got q={q}, z={z}")));
    }
    if max_labels > MAX_LABELS {
        return Err(Error::TooLarge { what: "canonical walk vertex count", size: max_labels, cap: MAX_LABELS });
    }
    let mut search =
        Search { blocks: 2 * q, z, t, max_labels, max_edges, nodes: 0, counts: BTreeMap::new() };
    if max_labels < 2 || max_edges == 0 {
        return Ok(search.counts);
    }
    let mut st =
        State { labels: 2, mult: [[0; MAX_LABELS]; MAX_LABELS], distinct: 0, singles: 0, block_vertices: 0, block_edges: 0 };
    st.start_block(0, 1);
    search.extend(st, 0, 1, 0, 1)?;
    Ok(search.counts)
}

/// Number of canonical, interesting block walks with exactly `v` vertices
/// and `e` distinct edges whose blocks are all `t`-tangle-free.
pub fn count_canonical(q: usize, z: usize, v: usize, e: usize, t: usize) -> Result<u64> {
    if e + 1 < v {
        return Ok(0);
    }
    Ok(canonical_histogram(q, z, t, v, e)?.get(&(v, e)).copied().unwrap_or(0))
}
