use rand::Rng;

use super::fourier::check_table;
use super::{brute_max, check_assignment, Meta};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Largest `2^k · n^k` candidate count that [`sample_csp`] will scan.
pub const CSP_CANDIDATE_CAP: u64 = 1 << 28;

/// A constraint `P(c ∘ x^α)`: scope `α` (repeats allowed) and negations `c`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Constraint {
    pub vars: Vec<usize>,
    pub neg: Vec<i8>,
}

impl Constraint {
    /// Truth-table row of `c ∘ x^α`.
    fn row(&self, x: &[f64]) -> usize {
        self.vars
            .iter()
            .zip(&self.neg)
            .fold(0, |acc, (&i, &c)| (acc << 1) | usize::from(f64::from(c) * x[i] < 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CspInstance {
    n: usize,
    k: usize,
    truth_table: Vec<u8>,
    constraints: Vec<Constraint>,
    pub meta: Meta,
}

impl CspInstance {
    pub fn new(n: usize, truth_table: Vec<u8>, constraints: Vec<Constraint>) -> Result<Self> {
        let k = check_table(&truth_table)?;
        if n == 0 {
            return Err(Error::invalid("variable count must be positive"));
        }
        for c in &constraints {
            if c.vars.len() != k || c.neg.len() != k {
                return Err(Error::invalid(format!("constraint {c:?} does not have arity {k}")));
            }
            if c.vars.iter().any(|&i| i >= n) {
                return Err(Error::invalid(format!("constraint scope {:?} out of range for n={n}", c.vars)));
            }
            if c.neg.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::invalid(format!("negation pattern {:?} is not ±1", c.neg)));
            }
        }
        Ok(CspInstance { n, k, truth_table, constraints, meta: Meta::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn truth_table(&self) -> &[u8] {
        &self.truth_table
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
}

/// Each pair `(c, α) ∈ {±1}^k × [n]^k` is present independently with
/// probability `p`. Scope number `r` (in base-`n` order) draws `2^k`
/// uniforms from stream `r`, one per negation pattern in truth-table order.
pub fn sample_csp(truth_table: &[u8], n: usize, p: f64, seed: u64) -> Result<CspInstance> {
    let k = check_table(truth_table)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability p={p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("variable count must be positive"));
    }
    let scopes = (n as u64).checked_pow(k as u32).filter(|s| s << k <= CSP_CANDIDATE_CAP).ok_or(
        Error::TooLarge { what: "CSP candidate count 2^k n^k", size: usize::MAX, cap: CSP_CANDIDATE_CAP as usize },
    )?;
    let mut constraints = Vec::new();
    for r in 0..scopes {
        let mut rng = stream_rng(seed, r);
        let mut vars = vec![0usize; k];
        let mut rest = r;
        for slot in vars.iter_mut().rev() {
            *slot = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        for pattern in 0..1usize << k {
            if rng.random::<f64>() < p {
                let neg = (0..k).map(|j| if (pattern >> (k - 1 - j)) & 1 == 1 { -1 } else { 1 }).collect();
                constraints.push(Constraint { vars: vars.clone(), neg });
            }
        }
    }
    let mut inst = CspInstance::new(n, truth_table.to_vec(), constraints)?;
    inst.meta = Meta { p: Some(p), seed: Some(seed), predicate: None };
    Ok(inst)
}

/// `(1/m) Σ P(c ∘ x^α)`.
pub fn csp_value(inst: &CspInstance, x: &[f64]) -> Result<f64> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    check_assignment(inst.n, x)?;
    let sat: u64 = inst.constraints.iter().map(|c| u64::from(inst.truth_table[c.row(x)])).sum();
    Ok(sat as f64 / inst.m() as f64)
}

pub fn csp_brute_opt(inst: &CspInstance) -> Result<f64> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    let k = inst.k;
    let m = inst.m() as f64;
    brute_max(inst.n, |mask| {
        let sat: u32 = inst
            .constraints
            .iter()
            .map(|c| {
                let row = c.vars.iter().zip(&c.neg).fold(0usize, |acc, (&i, &s)| {
                    let x_neg = (mask >> i) & 1 == 1;
                    (acc << 1) | usize::from(x_neg != (s < 0))
                });
                debug_assert!(row < 1 << k);
                u32::from(inst.truth_table[row])
            })
            .sum();
        f64::from(sat) / m
    })
}
