//! Certified upper bounds on the optimum of k-XOR and CSP(P) instances.
//!
//! The XOR chain: the ordered tensor polynomial `Σ_α T_α x^α` is at most
//! `√(n ⟨y, A y⟩)` for the flattened matrix `A` and `y = x^{⊗(k−1)}`, which
//! is at most `√(n (‖A′‖_{∞→1} + ‖A″‖_{∞→1}))`. The first norm comes from a
//! non-backtracking certificate, the second from the absolute entry sum.

use std::collections::BTreeMap;

use crate::certify::{inf_to_one_certificate, AuditReport, AuditStatus, Certificate, Method, Mode};
use crate::error::{Error, Result};
use crate::instances::{
    brute_opt, csp_brute_opt, fourier_decompose, CspInstance, FourierExpansion, Instance, XorInstance,
};
use crate::linalg::{
    abs_entry_sum, frobenius, inf_induced, norms::one_induced, spectral_radius_bound, DenseMatrix, NormKind,
    SymWeightedMatrix,
};

/// Largest flattened dimension `n^{k−1}`.
pub const FLATTEN_DIM_CAP: usize = 6400;

/// Largest Gram dimension for the Gelfand leg of [`specnorm_upper`].
pub const GRAM_DIM_CAP: usize = 1600;

/// Split rule recorded in certificate metadata.
pub const SPLIT_RULE: &str = "A' keeps entries with |S(α,α') ∩ S(β,β')| ≤ (k−3)/2 (multiset intersection)";

/// The `n^{k−1} × n^{k−1}` flattening of an odd-arity XOR tensor.
///
/// Rows and columns are indexed by pairs `(α, β)` of `(k−1)/2`-tuples,
/// encoded base `n` as the concatenation `α ++ β`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlattenedMatrix {
    pub base: DenseMatrix,
    pub n: usize,
    pub k: usize,
}

impl FlattenedMatrix {
    pub fn half(&self) -> usize {
        (self.k - 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    /// Index tuple `α ++ β` of row or column `id`.
    pub fn decode(&self, id: usize) -> Vec<usize> {
        decode(id, self.n, self.k - 1)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        encode(tuple, self.n)
    }
}

fn encode(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &i| acc * n + i)
}

fn decode(mut id: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = id % n;
        id /= n;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `A_{(α,β),(α′,β′)} = Σ_ℓ T_{(α,α′,ℓ)} T_{(β,β′,ℓ)}`.
pub fn flatten(inst: &XorInstance) -> Result<FlattenedMatrix> {
    let (n, k) = (inst.n(), inst.k());
    if k < 3 || k % 2 == 0 {
        return Err(Error::invalid(format!(
            "flattening needs odd k ≥ 3, got k={k}; even arity uses a direct flattening, which is not provided"
        )));
    }
    let dim = n.checked_pow((k - 1) as u32).filter(|&d| d <= FLATTEN_DIM_CAP).ok_or(Error::TooLarge {
        what: "flattened dimension n^(k-1)",
        size: n.saturating_pow((k - 1) as u32),
        cap: FLATTEN_DIM_CAP,
    })?;
    let half = (k - 1) / 2;
    // by_last[ℓ]: (encoded α, encoded α′, T) over ordered tuples (α, α′, ℓ)
    let mut by_last: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for (support, w) in inst.clauses() {
        for tau in permutations(support) {
            let l = tau[k - 1];
            by_last[l].push((encode(&tau[..half], n), encode(&tau[half..k - 1], n), w));
        }
    }
    let shift = n.pow(half as u32);
    let mut base = DenseMatrix::zeros(dim, dim);
    for group in &by_last {
        for &(a, a2, w1) in group {
            for &(b, b2, w2) in group {
                let (row, col) = (a * shift + b, a2 * shift + b2);
                // Each entry is accumulated once, in the upper triangle.
                if row < col {
                    base[(row, col)] += w1 * w2;
                }
            }
        }
    }
    for r in 0..dim {
        for c in r + 1..dim {
            base[(c, r)] = base[(r, c)];
        }
    }
    Ok(FlattenedMatrix { base, n, k })
}

fn multiset_intersection(mut a: Vec<usize>, mut b: Vec<usize>) -> usize {
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Whether entry `(row, col)` stays in `A′`.
pub fn keeps_entry(a: &FlattenedMatrix, row: usize, col: usize) -> bool {
    let half = a.half();
    let (r, c) = (a.decode(row), a.decode(col));
    let first: Vec<usize> = r[..half].iter().chain(&c[..half]).copied().collect();
    let second: Vec<usize> = r[half..].iter().chain(&c[half..]).copied().collect();
    multiset_intersection(first, second) <= (a.k - 3) / 2
}

/// `A = A′ + A″`, routing each entry by [`keeps_entry`].
pub fn split(a: &FlattenedMatrix) -> (DenseMatrix, DenseMatrix) {
    let dim = a.dim();
    let mut prime = DenseMatrix::zeros(dim, dim);
    let mut rest = DenseMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = a.base[(r, c)];
            if v == 0.0 {
                continue;
            }
            if keeps_entry(a, r, c) {
                prime[(r, c)] = v;
            } else {
                rest[(r, c)] = v;
            }
        }
    }
    (prime, rest)
}

/// Sound bound `‖A″‖_{∞→1} ≤ Σ |A″_ij|`.
pub fn residual_bound(rest: &DenseMatrix) -> f64 {
    abs_entry_sum(rest)
}

/// Steps bounding `N ≥ max_x Σ_α T_α x^α` over ordered `α`; returns the
/// certificate (last step is `N`) and `N`.
pub fn tensor_poly_certificate(inst: &XorInstance, mode: Mode, z: usize) -> Result<(Certificate, f64)> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    let flat = flatten(inst)?;
    let (prime, rest) = split(&flat);
    drop(flat);
    let n = inst.n();
    let mut cert = Certificate::new("tensor_poly", n);
    cert.meta.insert("split_rule".into(), SPLIT_RULE.into());
    let a_prime = SymWeightedMatrix::from_dense(&prime, 0.0)?;
    drop(prime);
    let cert1 = if a_prime.edge_count() == 0 {
        cert.push("a_prime.empty", "A′ = 0", 0.0, Method::Exact);
        0.0
    } else {
        let lambda_mode = mode.resolve(&a_prime)?;
        let c = inf_to_one_certificate(&a_prime, lambda_mode, z)?;
        cert.absorb("a_prime", &c);
        cert.meta.insert("lambda_mode".into(), serde_json::to_value(lambda_mode)?);
        c.final_bound
    };
    let cert2 = residual_bound(&rest);
    cert.push("a_double_prime", "‖A″‖_{∞→1} ≤ Σ|A″_ij|", cert2, Method::Exact);
    let total = cert1 + cert2;
    cert.push("flattened", "‖A‖_{∞→1} ≤ ‖A′‖_{∞→1} + ‖A″‖_{∞→1}", total, Method::Exact);
    let big_n = (n as f64 * total).sqrt();
    cert.push("tensor_poly", "max_x Σ_α T_α x^α ≤ √(n ‖A‖_{∞→1}) by Cauchy–Schwarz", big_n, Method::Exact);
    Ok((cert, big_n))
}

/// Certified `U ≥ opt(I)` for an odd-arity XOR instance.
pub fn refute_xor(inst: &XorInstance, mode: Mode, z: usize) -> Result<Certificate> {
    let (mut cert, big_n) = tensor_poly_certificate(inst, mode, z)?;
    cert.kind = "xor_refutation".into();
    let m = inst.m() as f64;
    let u = (0.5 + big_n / (2.0 * m * factorial(inst.k()))).min(1.0);
    cert.push("value", "opt ≤ min(1, ½ + N / (2 m k!))", u, Method::Exact);
    cert.informative = Some(u < 1.0);
    cert.meta.insert("m".into(), inst.m().into());
    cert.meta.insert("k".into(), inst.k().into());
    Ok(cert)
}

/// `M_d` with `⟨x^{⊗⌊d/2⌋}, M_d x^{⊗⌈d/2⌉}⟩ = Σ_{(c,α)} P_d(c ∘ x^α)`.
pub fn flatten_degree_d(inst: &CspInstance, d: usize, fourier: &FourierExpansion) -> Result<DenseMatrix> {
    let (n, k) = (inst.n(), inst.k());
    if fourier.k != k {
        return Err(Error::invalid("Fourier expansion arity differs from the instance"));
    }
    if d == 0 || d >= k {
        return Err(Error::invalid(format!("degree d={d} outside 1..k={k}")));
    }
    let (lo, hi) = (d / 2, d - d / 2);
    let cols = n.checked_pow(hi as u32).filter(|&c| c <= FLATTEN_DIM_CAP).ok_or(Error::TooLarge {
        what: "degree flattening width",
        size: n.saturating_pow(hi as u32),
        cap: FLATTEN_DIM_CAP,
    })?;
    let rows = n.pow(lo as u32);
    let mut m = DenseMatrix::zeros(rows, cols);
    let subsets = fourier.support_of_degree(d);
    for c in inst.constraints() {
        for &s in &subsets {
            let idx: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).collect();
            let gamma: Vec<usize> = idx.iter().map(|&i| c.vars[i]).collect();
            let sign: f64 = idx.iter().map(|&i| f64::from(c.neg[i])).product();
            let (r, col) = (encode(&gamma[..lo], n), encode(&gamma[lo..], n));
            m[(r, col)] += fourier.coefficients[s] * sign;
        }
    }
    Ok(m)
}

/// Sound spectral-norm bound: the least of the Frobenius norm,
/// `√(‖M‖₁ ‖M‖_∞)`, and a Gelfand bound on the smaller Gram matrix.
pub fn specnorm_upper(m: &DenseMatrix, z: usize) -> Result<f64> {
    let mut best = frobenius(m).min((one_induced(m) * inf_induced(m)).sqrt());
    let small = m.rows().min(m.cols());
    if best > 0.0 && small <= GRAM_DIM_CAP {
        let gram = if m.rows() <= m.cols() { m.mul(&m.transpose())? } else { m.transpose().mul(m)? };
        best = best.min(spectral_radius_bound(&gram, z, NormKind::Frobenius)?.sqrt());
    }
    Ok(best)
}

/// Certified `U ≥ opt(I)` for a CSP(P) instance with odd arity, through
/// `val = P₀ + (1/m) Σ_d S_{I,d}(x)`.
pub fn refute_csp(inst: &CspInstance, mode: Mode, z: usize) -> Result<Certificate> {
    if inst.m() == 0 {
        return Err(Error::NoClauses);
    }
    let (n, k) = (inst.n(), inst.k());
    let fourier = fourier_decompose(inst.truth_table())?;
    let top = fourier.top();
    if top != 0.0 && k % 2 == 0 {
        return Err(Error::invalid(format!("degree-{k} leg needs odd arity")));
    }
    let m = inst.m() as f64;
    let mut cert = Certificate::new("csp_refutation", n);
    let mut total = 0.0;
    cert.push("p0", "P₀ = E P", fourier.constant(), Method::Exact);
    for d in 1..k {
        if fourier.support_of_degree(d).is_empty() {
            continue;
        }
        let md = flatten_degree_d(inst, d, &fourier)?;
        let s = specnorm_upper(&md, z)?;
        cert.push(&format!("degree_{d}.specnorm"), format!("‖M_{d}‖₂ ≤ s_{d}"), s, Method::Gelfand);
        let term = (n as f64).powf(d as f64 / 2.0) * s;
        cert.push(&format!("degree_{d}.bound"), format!("|S_{{I,{d}}}(x)| ≤ n^{{{d}/2}} s_{d}"), term, Method::Exact);
        total += term;
    }
    if top != 0.0 {
        total += degree_k_leg(inst, top, mode, z, &mut cert)?;
    }
    let u = (fourier.constant() + total / m).min(1.0);
    cert.push("value", "opt ≤ min(1, P₀ + (1/m) Σ_d bound_d)", u, Method::Exact);
    cert.informative = Some(u < 1.0);
    cert.meta.insert("m".into(), inst.m().into());
    cert.meta.insert("k".into(), k.into());
    Ok(cert)
}

// Bounds ĉ_[k] Σ Π_i c_i x_{α_i}: scopes with distinct indices are grouped
// by support into a rescaled XOR instance; repeated scopes contribute at
// most |ĉ_[k]| each.
fn degree_k_leg(inst: &CspInstance, top: f64, mode: Mode, z: usize, cert: &mut Certificate) -> Result<f64> {
    let k = inst.k();
    let mut grouped: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut repeated = 0usize;
    for c in inst.constraints() {
        let mut s = c.vars.clone();
        s.sort_unstable();
        if s.windows(2).any(|p| p[0] == p[1]) {
            repeated += 1;
            continue;
        }
        let sign: f64 = c.neg.iter().map(|&v| f64::from(v)).product();
        *grouped.entry(s).or_insert(0.0) += top * sign;
    }
    grouped.retain(|_, w| *w != 0.0);
    let residual = top.abs() * repeated as f64;
    cert.push(&format!("degree_{k}.repeated_scopes"), "scopes with a repeated index contribute ≤ |ĉ_[k]| each", residual, Method::Exact);
    let wmax = grouped.values().fold(0.0f64, |a, w| a.max(w.abs()));
    if wmax == 0.0 {
        return Ok(residual);
    }
    let xor = XorInstance::new(inst.n(), k, grouped.into_iter().map(|(s, w)| (s, w / wmax)))?;
    let (leg, big_n) = tensor_poly_certificate(&xor, mode, z)?;
    cert.absorb(&format!("degree_{k}"), &leg);
    cert.push(&format!("degree_{k}.rescale"), "weights divided by w_max", wmax, Method::Exact);
    let bound = wmax * big_n / factorial(k) + residual;
    cert.push(&format!("degree_{k}.bound"), "|S_{I,k}(x)| ≤ w_max N / k! + residual", bound, Method::Exact);
    Ok(bound)
}

/// Refutes either instance kind and records the mode and `z` used, so the
/// certificate can be recomputed by [`audit_refutation`].
pub fn refute(inst: &Instance, mode: Mode, z: usize) -> Result<Certificate> {
    let mut cert = match inst {
        Instance::Xor(x) => refute_xor(x, mode, z)?,
        Instance::Csp(c) => refute_csp(c, mode, z)?,
    };
    cert.meta.insert("mode".into(), mode.to_string().into());
    cert.meta.insert("z".into(), z.into());
    Ok(cert)
}

fn refutation_kind(inst: &Instance) -> &'static str {
    match inst {
        Instance::Xor(_) => "xor_refutation",
        Instance::Csp(_) => "csp_refutation",
    }
}

/// Checks a refutation certificate against its instance: structure and
/// kind, agreement with a recomputation when the certificate records its
/// mode and `z`, and `U ≥ opt` by exhaustive search when `n` is small enough.
pub fn audit_refutation(inst: &Instance, cert: &Certificate) -> Result<AuditReport> {
    let fail = |reason: String| {
        Ok(AuditReport { status: AuditStatus::Fail, final_bound: cert.final_bound, exact: None, slack: None, reason: Some(reason) })
    };
    if let Err(e) = cert.validate() {
        return fail(e.to_string());
    }
    if cert.kind != refutation_kind(inst) || cert.n != inst.n() {
        return fail(format!("a {} certificate for n={} does not match the instance", cert.kind, cert.n));
    }
    let recorded = cert.meta.get("mode").and_then(|m| m.as_str()).zip(cert.meta.get("z").and_then(|z| z.as_u64()));
    if let Some((mode, z)) = recorded {
        let again = refute(inst, mode.parse()?, z as usize)?;
        let tol = 1e-9 * again.final_bound.abs().max(1.0);
        if (again.final_bound - cert.final_bound).abs() > tol || again.steps.len() != cert.steps.len() {
            return fail(format!("recomputation gives {} instead of {}", again.final_bound, cert.final_bound));
        }
    }
    let exact = match inst {
        Instance::Xor(x) => brute_opt(x),
        Instance::Csp(c) => csp_brute_opt(c),
    };
    match exact {
        Ok(v) => Ok(AuditReport::compare(cert.final_bound, v)),
        Err(e @ Error::OracleInfeasible { .. }) => Ok(AuditReport::not_auditable(cert.final_bound, e.to_string())),
        Err(e) => Err(e),
    }
}
