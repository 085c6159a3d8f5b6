use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// One subsequence `α₁ β₁ ℓ₁ α₂ β₂ … ℓ_z α_{z+1} β_{z+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperBlock {
    pub alpha: Vec<Vec<usize>>,
    pub beta: Vec<Vec<usize>>,
    pub ell: Vec<usize>,
}

impl HyperBlock {
    fn z(&self) -> usize {
        self.ell.len()
    }

    /// The two hyper-edges `S(α_j α_{j+1} ℓ_j)` and `S(β_j β_{j+1} ℓ_j)` of
    /// step `j` (0-based), as sorted multisets.
    fn step_edges(&self, j: usize) -> [Vec<usize>; 2] {
        let edge = |x: &[Vec<usize>]| {
            let mut e: Vec<usize> = x[j].iter().chain(&x[j + 1]).copied().chain([self.ell[j]]).collect();
            e.sort_unstable();
            e
        };
        [edge(&self.alpha), edge(&self.beta)]
    }

    /// Indices revealed at step `j`: `ℓ_j α_{j+1} β_{j+1}`.
    fn reveal(&self, j: usize) -> Vec<usize> {
        std::iter::once(self.ell[j]).chain(self.alpha[j + 1].iter().copied()).chain(self.beta[j + 1].iter().copied()).collect()
    }
}

/// A sequence of hyper-walk blocks over multi-indices of arity `(k−1)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperWalk {
    k: usize,
    blocks: Vec<HyperBlock>,
}

impl HyperWalk {
    pub fn new(k: usize, blocks: Vec<HyperBlock>) -> Result<Self> {
        if k < 3 || k % 2 == 0 {
            return Err(Error::MalformedWalk(format!("hyper-walks need odd k ≥ 3, got {k}")));
        }
        let h = (k - 1) / 2;
        let Some(z) = blocks.first().map(HyperBlock::z) else {
            return Err(Error::MalformedWalk("a hyper-walk needs at least one block".into()));
        };
        if z == 0 {
            return Err(Error::MalformedWalk("blocks need at least one step".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.z() != z || b.alpha.len() != z + 1 || b.beta.len() != z + 1 {
                return Err(Error::MalformedWalk(format!("block {i} does not have {z} steps")));
            }
            if b.alpha.iter().chain(&b.beta).any(|m| m.len() != h) {
                return Err(Error::MalformedWalk(format!("block {i} has a multi-index of arity other than {h}")));
            }
        }
        Ok(HyperWalk { k, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[HyperBlock] {
        &self.blocks
    }

    /// Hyper-edge multiplicities of the underlying multi-hypergraph.
    pub fn hyperedges(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut m = BTreeMap::new();
        for b in &self.blocks {
            for j in 0..b.z() {
                for e in b.step_edges(j) {
                    *m.entry(e).or_insert(0) += 1;
                }
            }
        }
        m
    }

    /// Which groups of the hyper-walk conditions hold. The pre-processing
    /// test uses the same `≤ (k−3)/2` threshold as the flattening split.
    pub fn conditions(&self) -> Conditions {
        let cap = (self.k - 3) / 2;
        let mut c = Conditions { preprocessing: true, distinct: true, block: true, non_backtracking: true };
        let nb = self.blocks.len();
        for (i, b) in self.blocks.iter().enumerate() {
            let z = b.z();
            for j in 0..z {
                let a: Vec<usize> = b.alpha[j].iter().chain(&b.alpha[j + 1]).copied().collect();
                let be: Vec<usize> = b.beta[j].iter().chain(&b.beta[j + 1]).copied().collect();
                c.preprocessing &= multiset_overlap(&a, &be) <= cap;
                for mut side in [a, be] {
                    side.push(b.ell[j]);
                    side.sort_unstable();
                    c.distinct &= side.windows(2).all(|p| p[0] != p[1]);
                }
            }
            for j in 0..z.saturating_sub(1) {
                c.non_backtracking &= b.alpha[j] != b.alpha[j + 2] || b.beta[j] != b.beta[j + 2];
            }
            let next = &self.blocks[(i + 1) % nb];
            c.block &= b.alpha[z - 1] == next.alpha[1]
                && b.alpha[z] == next.alpha[0]
                && b.beta[z] == next.beta[0]
                && b.beta[z - 1] == next.beta[1];
        }
        c
    }

    /// The extra conditions singling out the absolute-value terms: each
    /// block's last `ℓ` equals the next block's first, and every hyper-edge
    /// of odd multiplicity shares at least `k−1` indices with a first-step
    /// hyper-edge of some block.
    pub fn satisfies_star(&self) -> bool {
        if !self.conditions().all() {
            return false;
        }
        let nb = self.blocks.len();
        let linked =
            (0..nb).all(|i| self.blocks[i].ell[self.blocks[i].z() - 1] == self.blocks[(i + 1) % nb].ell[0]);
        let firsts: Vec<Vec<usize>> = self.blocks.iter().flat_map(|b| b.step_edges(0)).collect();
        let odd_ok = self
            .hyperedges()
            .iter()
            .filter(|(_, &m)| m % 2 == 1)
            .all(|(e, _)| firsts.iter().any(|f| multiset_overlap(e, f) >= self.k - 1));
        linked && odd_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conditions {
    pub preprocessing: bool,
    pub distinct: bool,
    pub block: bool,
    pub non_backtracking: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.preprocessing && self.distinct && self.block && self.non_backtracking
    }
}

fn multiset_overlap(a: &[usize], b: &[usize]) -> usize {
    let mut count = BTreeMap::new();
    for &x in a {
        *count.entry(x).or_insert(0usize) += 1;
    }
    b.iter()
        .filter(|x| match count.get_mut(*x) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count()
}

/// Classification of the reveal `R_{ij}` at step `step` of block `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reveal {
    pub block: usize,
    pub step: usize,
    /// `s` with `R_{ij} ∈ 𝒢_s`: distinct indices not seen earlier in the sequence.
    pub new_indices: usize,
    /// `s` with `R_{ij} ∈ 𝒫_s`: distinct hyper-edges not present earlier.
    pub new_edges: usize,
}

impl Reveal {
    /// Reuses only known indices but adds a hyper-edge.
    pub fn is_tangle(&self) -> bool {
        self.new_indices == 0 && self.new_edges >= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealReport {
    pub reveals: Vec<Reveal>,
    /// `|𝒢_s|` for `s = 0..=k`.
    pub g_sizes: Vec<usize>,
    /// `|𝒫_s|` for `s = 0..=2`.
    pub p_sizes: [usize; 3],
    /// `|𝒯_i|` per block.
    pub tangles: Vec<usize>,
}

/// Reveals the blocks in order. The first block's `α₁, β₁` count as known.
pub fn classify_reveals(zw: &HyperWalk) -> RevealReport {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut reveals = Vec::new();
    let mut g_sizes = vec![0; zw.k + 1];
    let mut p_sizes = [0; 3];
    let mut tangles = vec![0; zw.blocks.len()];
    for (i, b) in zw.blocks.iter().enumerate() {
        seen.extend(b.alpha[0].iter().chain(&b.beta[0]).copied());
        for j in 0..b.z() {
            let fresh: BTreeSet<usize> = b.reveal(j).into_iter().filter(|x| !seen.contains(x)).collect();
            let step: BTreeSet<Vec<usize>> = b.step_edges(j).into_iter().collect();
            let new_edges = step.iter().filter(|e| !edges.contains(*e)).count();
            let r = Reveal { block: i, step: j, new_indices: fresh.len(), new_edges };
            g_sizes[r.new_indices] += 1;
            p_sizes[r.new_edges] += 1;
            if r.is_tangle() {
                tangles[i] += 1;
            }
            seen.extend(fresh);
            edges.extend(step);
            reveals.push(r);
        }
    }
    RevealReport { reveals, g_sizes, p_sizes, tangles }
}

/// Every block has at most `t` tangle reveals.
pub fn is_hyper_tangle_free(zw: &HyperWalk, t: usize) -> bool {
    classify_reveals(zw).tangles.iter().all(|&c| c <= t)
}
