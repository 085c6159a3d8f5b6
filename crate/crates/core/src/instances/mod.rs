//! Random k-XOR and CSP(P) instances, their values and exhaustive optima.

mod csp;
mod fourier;
mod json;

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

pub use csp::{csp_brute_opt, csp_value, sample_csp, Constraint, CspInstance};
pub use fourier::{
    check_table, fourier_decompose, parse_predicate, row_signs, table_index, FourierExpansion, MAX_ARITY,
};
pub use json::{parse_instance, Instance};

/// Largest variable count for exhaustive optimization.
pub const BRUTE_VAR_CAP: usize = 24;

/// Sampling provenance.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
}

/// k-XOR instance: one weight per sorted support of `k` distinct variables.
#[derive(Clone, Debug, PartialEq)]
pub struct XorInstance {
    n: usize,
    k: usize,
    clauses: BTreeMap<Vec<usize>, f64>,
    pub meta: Meta,
}

impl XorInstance {
    /// Supports may be given in any order; they are sorted. Weights must
    /// satisfy `0 < |w| ≤ 1`.
    pub fn new(n: usize, k: usize, clauses: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid(format!("arity k={k} must satisfy 1 ≤ k ≤ n={n}")));
        }
        let mut map = BTreeMap::new();
        for (mut vars, w) in clauses {
            if vars.len() != k {
                return Err(Error::invalid(format!("clause {vars:?} does not have arity {k}")));
            }
            if !(w.is_finite() && w != 0.0 && w.abs() <= 1.0) {
                return Err(Error::invalid(format!("clause weight {w} outside 0 < |w| ≤ 1")));
            }
            vars.sort_unstable();
            if vars.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::invalid(format!("clause {vars:?} repeats a variable")));
            }
            if vars[k - 1] >= n {
                return Err(Error::invalid(format!("clause {vars:?} out of range for n={n}")));
            }
            if map.insert(vars.clone(), w).is_some() {
                return Err(Error::invalid(format!("support {vars:?} given twice")));
            }
        }
        Ok(XorInstance { n, k, clauses: map, meta: Meta::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.clauses.iter().map(|(v, &w)| (v.as_slice(), w))
    }

    pub fn weight(&self, support: &[usize]) -> Option<f64> {
        self.clauses.get(support).copied()
    }
}

/// Iterates the `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else { return };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Each of the `C(n, k)` supports is present independently with probability
/// `p`, with an equiprobable sign. Support number `r` (lexicographic rank)
/// draws from stream `r` of `seed`.
pub fn sample_kxor(n: usize, k: usize, p: f64, seed: u64) -> Result<XorInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability p={p} outside [0, 1]")));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("arity k={k} must satisfy 1 ≤ k ≤ n={n}")));
    }
    let mut clauses = BTreeMap::new();
    let mut rank = 0u64;
    for_each_combination(n, k, |c| {
        let mut rng = stream_rng(seed, rank);
        rank += 1;
        if rng.random::<f64>() < p {
            let w = if rng.random::<bool>() { 1.0 } else { -1.0 };
            clauses.insert(c.to_vec(), w);
        }
    });
    Ok(XorInstance { n, k, clauses, meta: Meta { p: Some(p), seed: Some(seed), predicate: None } })
}

/// Symmetric tensor entry `T_α`: zero on repeated indices, else the weight of
/// the sorted support.
pub fn tensor_entry(inst: &XorInstance, alpha: &[usize]) -> Result<f64> {
    if alpha.len() != inst.k {
        return Err(Error::invalid(format!("index of arity {} for a {}-tensor", alpha.len(), inst.k)));
    }
    if let Some(&i) = alpha.iter().find(|&&i| i >= inst.n) {
        return Err(Error::invalid(format!("index {i} out of range for n={}", inst.n)));
    }
    let mut s = alpha.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|p| p[0] == p[1]) {
        return Ok(0.0);
    }
    Ok(inst.weight(&s).unwrap_or(0.0))
}

fn check_assignment(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::invalid(format!("assignment of length {} for n={n}", x.len())));
    }
    if x.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::invalid("assignment entries must be ±1"));
    }
    Ok(())
}

/// Satisfied fraction `(1/m) Σ (1 + w x^S)/2`.
pub fn value(inst: &XorInstance, x: &[f64]) -> Result<f64> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    check_assignment(inst.n, x)?;
    let s: f64 = inst.clauses().map(|(v, w)| 0.5 * (1.0 + w * v.iter().map(|&i| x[i]).product::<f64>())).sum();
    Ok(s / inst.m() as f64)
}

/// Bit-parallel maximization over `x ∈ {±1}^n`; bit `i` of the mask set
/// means `x_i = −1`. Work is split in fixed-size blocks so the result does
/// not depend on the thread count.
pub(crate) fn brute_max(n: usize, score: impl Fn(u64) -> f64 + Sync) -> Result<f64> {
    if n > BRUTE_VAR_CAP {
        return Err(Error::OracleInfeasible { what: "variable count", size: n, cap: BRUTE_VAR_CAP });
    }
    const BLOCK: u64 = 1 << 12;
    let total = 1u64 << n;
    let blocks = total.div_ceil(BLOCK);
    let best = (0..blocks)
        .into_par_iter()
        .map(|b| (b * BLOCK..((b + 1) * BLOCK).min(total)).map(&score).fold(f64::NEG_INFINITY, f64::max))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

pub fn brute_opt(inst: &XorInstance) -> Result<f64> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    let masks: Vec<(u64, f64)> =
        inst.clauses().map(|(v, w)| (v.iter().fold(0u64, |m, &i| m | 1 << i), w)).collect();
    let m = inst.m() as f64;
    brute_max(inst.n, |x| {
        let s: f64 = masks
            .iter()
            .map(|&(c, w)| if (x & c).count_ones() % 2 == 0 { 1.0 + w } else { 1.0 - w })
            .sum();
        0.5 * s / m
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sampling_extremes_and_determinism() {
        assert_eq!(sample_kxor(8, 3, 0.0, 1).unwrap().m(), 0);
        assert_eq!(sample_kxor(8, 3, 1.0, 1).unwrap().m() as u64, binom(8, 3));
        let a = sample_kxor(30, 3, 0.1, 7).unwrap();
        let b = sample_kxor(30, 3, 0.1, 7).unwrap();
        assert_eq!(a, b);
        let mean = 0.1 * binom(30, 3) as f64;
        let sd = (mean * 0.9).sqrt();
        assert!((a.m() as f64 - mean).abs() <= 4.0 * sd, "m = {}", a.m());
        assert!(sample_kxor(2, 3, 0.5, 0).is_err());
        assert!(sample_kxor(5, 3, 1.5, 0).is_err());
    }

    #[test]
    fn tensor_entries() {
        let inst = XorInstance::new(4, 3, [(vec![1, 2, 3], 1.0)]).unwrap();
        assert_eq!(tensor_entry(&inst, &[3, 1, 2]).unwrap(), 1.0);
        assert_eq!(tensor_entry(&inst, &[1, 1, 2]).unwrap(), 0.0);
        assert_eq!(tensor_entry(&inst, &[0, 1, 2]).unwrap(), 0.0);
        assert!(tensor_entry(&inst, &[1, 2]).is_err());
    }

    #[test]
    fn values_and_optima() {
        let plus = XorInstance::new(4, 3, [(vec![1, 2, 3], 1.0)]).unwrap();
        let minus = XorInstance::new(4, 3, [(vec![1, 2, 3], -1.0)]).unwrap();
        assert_eq!(value(&plus, &[1.0; 4]).unwrap(), 1.0);
        assert_eq!(value(&minus, &[1.0; 4]).unwrap(), 0.0);
        assert_eq!(brute_opt(&plus).unwrap(), 1.0);
        let two = XorInstance::new(4, 3, [(vec![0, 1, 2], 1.0), (vec![0, 1, 3], -1.0)]).unwrap();
        assert_eq!(brute_opt(&two).unwrap(), 1.0);
        let mut k4 = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                k4.push((vec![u, v], 1.0));
            }
        }
        let complete = XorInstance::new(4, 2, k4).unwrap();
        assert_eq!(brute_opt(&complete).unwrap(), 1.0);
        assert!(matches!(value(&XorInstance::new(3, 3, []).unwrap(), &[1.0; 3]), Err(Error::NoClauses)));
    }

    #[test]
    fn construction_errors() {
        assert!(XorInstance::new(4, 3, [(vec![1, 1, 2], 1.0)]).is_err());
        assert!(XorInstance::new(4, 3, [(vec![1, 2, 4], 1.0)]).is_err());
        assert!(XorInstance::new(4, 3, [(vec![1, 2, 3], 1.5)]).is_err());
        assert!(XorInstance::new(4, 3, [(vec![1, 2, 3], 1.0), (vec![3, 2, 1], 1.0)]).is_err());
    }

    #[test]
    fn combinations_in_order() {
        let mut all = Vec::new();
        for_each_combination(4, 2, |c| all.push(c.to_vec()));
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}
