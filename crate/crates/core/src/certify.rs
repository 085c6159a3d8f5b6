//! Löwner-order and ∞→1 certificates for symmetric zero-diagonal matrices.
//!
//! For `λ ≥ 1` at least as large as the most negative real eigenvalue of
//! `B(±A) + L − J` (in absolute value), both `λI ± A + λ⁻¹(D − I)` are
//! positive semidefinite, and then `‖A‖_{∞→1} ≤ 2 Σ_u |λ + λ⁻¹(D_uu − 1)|`.

use std::collections::BTreeMap;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    brute_inf_to_one, cholesky_psd, min_eig_symmetric, min_real_eigenvalue, spectral_radius_bound, DenseMatrix,
    NormKind, SymWeightedMatrix, DEFAULT_IM_TOL,
};
use crate::nonbacktracking::{build, companion};

/// Relative inflation applied to eigensolver-derived λ.
pub const EIG_MARGIN: f64 = 1e-6;

/// Largest operator dimension for which Gelfand powers are formed.
pub const GELFAND_DIM_CAP: usize = 1600;

/// Default power count for Gelfand bounds.
pub const DEFAULT_Z: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Eigensolve,
    Gelfand,
    Cholesky,
    Brute,
}

impl Method {
    pub fn is_rigorous(self) -> bool {
        !matches!(self, Method::Eigensolve)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub claim: String,
    pub value: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub n: usize,
    pub steps: Vec<Step>,
    pub final_bound: f64,
    pub sound: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub informative: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl Certificate {
    pub fn new(kind: &str, n: usize) -> Self {
        Certificate {
            kind: kind.into(),
            n,
            steps: Vec::new(),
            final_bound: f64::NAN,
            sound: true,
            informative: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, name: &str, claim: impl Into<String>, value: f64, method: Method) {
        self.steps.push(Step { name: name.into(), claim: claim.into(), value, method });
        self.final_bound = value;
        self.sound = self.steps.iter().all(|s| s.method.is_rigorous());
    }

    /// Appends another certificate's steps with their names prefixed.
    pub fn absorb(&mut self, prefix: &str, other: &Certificate) {
        for s in &other.steps {
            self.steps.push(Step { name: format!("{prefix}.{}", s.name), ..s.clone() });
        }
        if let Some(last) = self.steps.last() {
            self.final_bound = last.value;
        }
        self.sound = self.steps.iter().all(|s| s.method.is_rigorous());
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Checks the structural invariants: nonempty, finite, final bound equal
    /// to the last step, and the soundness flag consistent with the methods.
    pub fn validate(&self) -> Result<()> {
        let last = self.steps.last().ok_or_else(|| Error::Parse("certificate has no steps".into()))?;
        if let Some(s) = self.steps.iter().find(|s| !s.value.is_finite()) {
            return Err(Error::Parse(format!("step {} has a non-finite value", s.name)));
        }
        if last.value != self.final_bound {
            return Err(Error::Parse("final_bound differs from the last step".into()));
        }
        if self.sound && !self.steps.iter().all(|s| s.method.is_rigorous()) {
            return Err(Error::Parse("marked sound but uses a non-rigorous step".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Parses and validates a certificate.
pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let c: Certificate = serde_json::from_str(text)?;
    c.validate()?;
    Ok(c)
}

/// How λ is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// Dense eigenvalues with a relative margin; not rigorous.
    Eig,
    /// Gelfand bound on the spectral radius; rigorous.
    Gelfand,
    /// Direct search for the smallest λ whose Löwner matrices factor by
    /// Cholesky; rigorous, and the only route at large dimension.
    Witness,
}

/// User-facing mode; `Sound` and `Estimate` pick a [`LambdaMode`] by size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sound,
    Estimate,
    Lambda(LambdaMode),
}

impl Mode {
    pub fn resolve(self, a: &SymWeightedMatrix) -> Result<LambdaMode> {
        let dim = operator_dim(a);
        match self {
            Mode::Sound if dim <= GELFAND_DIM_CAP => Ok(LambdaMode::Gelfand),
            Mode::Sound => Ok(LambdaMode::Witness),
            Mode::Estimate if dim <= crate::linalg::spectral::EIG_DIM_CAP => Ok(LambdaMode::Eig),
            Mode::Estimate => Err(Error::TooLarge {
                what: "eigensolve operator dimension",
                size: dim,
                cap: crate::linalg::spectral::EIG_DIM_CAP,
            }),
            Mode::Lambda(m) => Ok(m),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sound" => Ok(Mode::Sound),
            "estimate" => Ok(Mode::Estimate),
            "eig" => Ok(Mode::Lambda(LambdaMode::Eig)),
            "gelfand" => Ok(Mode::Lambda(LambdaMode::Gelfand)),
            "witness" => Ok(Mode::Lambda(LambdaMode::Witness)),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Sound => "sound",
            Mode::Estimate => "estimate",
            Mode::Lambda(LambdaMode::Eig) => "eig",
            Mode::Lambda(LambdaMode::Gelfand) => "gelfand",
            Mode::Lambda(LambdaMode::Witness) => "witness",
        })
    }
}

fn operator_dim(a: &SymWeightedMatrix) -> usize {
    (2 * a.edge_count()).min(2 * a.n())
}

/// `B + L − J` when its dimension `2m` is at most `edge_cap`, else the
/// `2n × 2n` linearization. Both have the same eigenvalues apart from extra
/// `±1`s, which the floor at 1 absorbs. `B + L − J` is closer to normal and
/// gives tighter Gelfand bounds, so it is preferred when affordable.
pub fn pencil_operator(a: &SymWeightedMatrix, edge_cap: usize) -> Result<DenseMatrix> {
    if 2 * a.edge_count() <= edge_cap {
        Ok(build(a)?.b_plus_l_minus_j())
    } else {
        Ok(companion(a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaBound {
    /// `λ` for `A` and for `−A`.
    pub per_sign: [f64; 2],
    pub value: f64,
    pub method: Method,
}

fn lambda_one_sign(a: &SymWeightedMatrix, mode: LambdaMode, z: usize) -> Result<f64> {
    match mode {
        LambdaMode::Eig => {
            let op = pencil_operator(a, 2 * a.n())?;
            let neg = min_real_eigenvalue(&op, DEFAULT_IM_TOL)?.map_or(0.0, |x| -x);
            Ok(neg.max(1.0) * (1.0 + EIG_MARGIN))
        }
        LambdaMode::Gelfand => {
            let op = pencil_operator(a, GELFAND_DIM_CAP)?;
            if op.rows() > GELFAND_DIM_CAP {
                return Err(Error::TooLarge { what: "Gelfand operator dimension", size: op.rows(), cap: GELFAND_DIM_CAP });
            }
            Ok(spectral_radius_bound(&op, z, NormKind::Frobenius)?.max(1.0))
        }
        LambdaMode::Witness => unreachable!("witness λ is searched jointly"),
    }
}

/// λ from the spectrum of `B(±A) + L − J` (Eig or Gelfand) or from the
/// Cholesky search (Witness). Always at least 1.
pub fn lambda_certificate(a: &SymWeightedMatrix, mode: LambdaMode, z: usize) -> Result<LambdaBound> {
    if a.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    match mode {
        LambdaMode::Witness => {
            let w = witness_search(a)?;
            Ok(LambdaBound { per_sign: [w.lambda, w.lambda], value: w.lambda, method: Method::Cholesky })
        }
        _ => {
            let neg = a.negated();
            let (p, m) = rayon::join(|| lambda_one_sign(a, mode, z), || lambda_one_sign(&neg, mode, z));
            let (p, m) = (p?, m?);
            let method = if mode == LambdaMode::Eig { Method::Eigensolve } else { Method::Gelfand };
            Ok(LambdaBound { per_sign: [p, m], value: p.max(m), method })
        }
    }
}

/// `λI + A + λ⁻¹(D − I)`.
pub fn lowner_matrix(a: &SymWeightedMatrix, lambda: f64) -> DenseMatrix {
    let mut w = a.to_dense();
    for (u, d) in a.abs_degrees().into_iter().enumerate() {
        w[(u, u)] = lambda + (d - 1.0) / lambda;
    }
    w
}

/// Smallest eigenvalue of `A + λI + λ⁻¹(D − I)`; nonnegative when λ is valid.
pub fn lowner_witness(a: &SymWeightedMatrix, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 1.0 {
        return Err(Error::invalid(format!("λ must be at least 1, got {lambda}")));
    }
    min_eig_symmetric(&lowner_matrix(a, lambda))
}

/// `2 Σ_u |λ + λ⁻¹(D_uu − 1)|`.
pub fn trace_bound(degrees: &[f64], lambda: f64) -> f64 {
    2.0 * degrees.iter().map(|d| (lambda + (d - 1.0) / lambda).abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessSearch {
    pub lambda: f64,
    pub cholesky_checks: usize,
}

// Relative width at which the bisection for the smallest feasible λ stops.
const WITNESS_REL_TOL: f64 = 0.02;

/// Finds λ ≥ 1 with `λI ± A + λ⁻¹(D − I) ⪰ 0` certified by Cholesky, aiming
/// for the λ that minimizes [`trace_bound`].
pub fn witness_search(a: &SymWeightedMatrix) -> Result<WitnessSearch> {
    let n = a.n();
    let deg = a.abs_degrees();
    let mut base = Mat::<f64>::zeros(n, n);
    for &(u, v, w) in a.edges() {
        base[(u, v)] = w;
        base[(v, u)] = w;
    }
    let mut checks = 0usize;
    // Try first whichever sign failed most recently; an infeasible λ then
    // usually costs one factorization instead of two.
    let mut order = [1.0, -1.0];
    let mut feasible = |s: f64| -> bool {
        for i in 0..2 {
            let sign = order[i];
            checks += 1;
            let m = Mat::from_fn(n, n, |r, c| if r == c { s + (deg[r] - 1.0) / s } else { sign * base[(r, c)] });
            if !cholesky_psd(&m) {
                order.swap(0, i);
                return false;
            }
        }
        true
    };

    // Gershgorin: the diagonal dominates row u once (s − 1)(s − D_uu + 1) ≥ 0.
    let max_deg = deg.iter().cloned().fold(0.0, f64::max);
    let s_safe = (max_deg - 1.0).max(1.0) * 1.01 + 1e-9;
    let s_opt = minimize_trace(&deg, s_safe);

    let lambda = if feasible(s_opt) {
        s_opt
    } else {
        let mut lo = s_opt;
        let mut hi = (s_opt * 1.15).min(s_safe);
        loop {
            if feasible(hi) {
                break;
            }
            if hi >= s_safe {
                return Err(Error::invalid("Cholesky failed at the diagonally dominant λ"));
            }
            lo = hi;
            hi = (hi * 1.15).min(s_safe);
        }
        while hi / lo > 1.0 + WITNESS_REL_TOL {
            let mid = (lo * hi).sqrt();
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(WitnessSearch { lambda, cholesky_checks: checks })
}

// Argmin of the trace bound over [1, hi] on a log grid refined by golden section.
fn minimize_trace(deg: &[f64], hi: f64) -> f64 {
    let f = |s: f64| trace_bound(deg, s);
    if hi <= 1.0 {
        return 1.0;
    }
    let steps = 256;
    let ratio = hi.ln() / steps as f64;
    let grid = |i: usize| (ratio * i as f64).exp();
    let best = (0..=steps).min_by(|&i, &j| f(grid(i)).total_cmp(&f(grid(j)))).unwrap();
    let (mut a, mut b) = (grid(best.saturating_sub(1)), grid((best + 1).min(steps)));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    if f(mid) <= f(grid(best)) {
        mid
    } else {
        grid(best)
    }
}

/// ‖A‖_{∞→1} certificate.
pub fn inf_to_one_certificate(a: &SymWeightedMatrix, mode: LambdaMode, z: usize) -> Result<Certificate> {
    let lam = lambda_certificate(a, mode, z)?;
    let deg = a.abs_degrees();
    let mut cert = Certificate::new("inf_to_one", a.n());
    cert.meta.insert("lambda_mode".into(), serde_json::to_value(mode)?);
    if mode != LambdaMode::Witness {
        cert.meta.insert("z".into(), z.into());
    }
    match mode {
        LambdaMode::Witness => {
            cert.push("lowner_plus", "λI + A + λ⁻¹(D − I) ⪰ 0 by Cholesky", lam.value, Method::Cholesky);
            cert.push("lowner_minus", "λI − A + λ⁻¹(D − I) ⪰ 0 by Cholesky", lam.value, Method::Cholesky);
        }
        _ => {
            cert.push("lambda_plus", "λ₊ ≥ max(1, −λ_min(B(A) + L − J))", lam.per_sign[0], lam.method);
            cert.push("lambda_minus", "λ₋ ≥ max(1, −λ_min(B(−A) + L − J))", lam.per_sign[1], lam.method);
        }
    }
    cert.push("lambda", "λ = max(λ₊, λ₋)", lam.value, Method::Exact);
    cert.push("trace", "‖A‖_{∞→1} ≤ 2 Σ_u |λ + λ⁻¹(D_uu − 1)|", trace_bound(&deg, lam.value), Method::Exact);
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Pass,
    Fail,
    NotAuditable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub status: AuditStatus,
    pub final_bound: f64,
    pub exact: Option<f64>,
    /// `final_bound / exact`; absent when not auditable or `exact = 0`.
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AuditReport {
    pub fn compare(bound: f64, exact: f64) -> Self {
        AuditReport {
            status: if bound >= exact { AuditStatus::Pass } else { AuditStatus::Fail },
            final_bound: bound,
            exact: Some(exact),
            slack: (exact != 0.0).then(|| bound / exact),
            reason: None,
        }
    }

    pub fn not_auditable(bound: f64, reason: String) -> Self {
        AuditReport { status: AuditStatus::NotAuditable, final_bound: bound, exact: None, slack: None, reason: Some(reason) }
    }
}

/// Recomputes ‖A‖_{∞→1} exhaustively and compares it with the certificate.
pub fn audit(a: &SymWeightedMatrix, cert: &Certificate) -> Result<AuditReport> {
    if a.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    match brute_inf_to_one(&a.to_dense()) {
        Ok(v) => Ok(AuditReport::compare(cert.final_bound, v)),
        Err(e @ Error::OracleInfeasible { .. }) => Ok(AuditReport::not_auditable(cert.final_bound, e.to_string())),
        Err(e) => Err(e),
    }
}
