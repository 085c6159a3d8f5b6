use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::norms::{frobenius, inf_induced};
use crate::linalg::DenseMatrix;

/// Dimension cap for dense nonsymmetric eigensolves.
pub const EIG_DIM_CAP: usize = 4000;

/// Default imaginary-part tolerance when classifying eigenvalues as real.
pub const DEFAULT_IM_TOL: f64 = 1e-9;

/// Symmetry tolerance for the symmetric eigensolver.
pub const SYM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Frobenius,
    InfInduced,
}

impl NormKind {
    fn eval(self, m: &DenseMatrix) -> f64 {
        match self {
            NormKind::Frobenius => frobenius(m),
            NormKind::InfInduced => inf_induced(m),
        }
    }
}

pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = m.require_square()?;
    if n > EIG_DIM_CAP {
        return Err(Error::TooLarge { what: "dense eigensolve dimension", size: n, cap: EIG_DIM_CAP });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .eigenvalues()
        .map(|v| v.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
        .map_err(|_| Error::NoConvergence { iterations: 0, index: 0, dim: n })
}

/// Smallest eigenvalue whose imaginary part is within `im_tol`, if any.
pub fn min_real_eigenvalue(m: &DenseMatrix, im_tol: f64) -> Result<Option<f64>> {
    Ok(eigenvalues(m)?
        .into_iter()
        .filter(|c| c.im.abs() <= im_tol)
        .map(|c| c.re)
        .reduce(f64::min))
}

pub fn spectral_radius(m: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.into_iter().map(|c| c.norm()).fold(0.0, f64::max))
}

/// Determinant via LU with partial pivoting.
pub fn det(m: &DenseMatrix) -> Result<f64> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(1.0);
    }
    Ok(m.to_faer().determinant())
}

fn check_symmetric(m: &DenseMatrix) -> Result<usize> {
    let n = m.require_square()?;
    let dev = m.asymmetry();
    if dev > SYM_TOL {
        return Err(Error::Asymmetric { max_dev: dev, tol: SYM_TOL });
    }
    Ok(n)
}

pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = check_symmetric(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { iterations: 0, index: 0, dim: n })
}

pub fn min_eig_symmetric(m: &DenseMatrix) -> Result<f64> {
    let n = m.require_square()?;
    if n == 0 {
        return Err(Error::Dimension("empty matrix has no eigenvalues".into()));
    }
    Ok(symmetric_eigenvalues(m)?[0])
}

/// Certifies `m ⪰ 0` by a Cholesky factorization of `m − δI`, where `δ`
/// covers the backward error of the factorization. Returns `false` when the
/// factorization breaks down (which does not prove indefiniteness).
pub fn cholesky_psd(m: &Mat<f64>) -> bool {
    let n = m.nrows();
    if n == 0 {
        return true;
    }
    let max_diag = (0..n).map(|i| m[(i, i)]).fold(0.0f64, f64::max);
    let delta = psd_margin(n, max_diag);
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { m[(i, j)] - delta } else { m[(i, j)] });
    shifted.llt(Side::Lower).is_ok()
}

/// Shift that absorbs Cholesky rounding: a successful factorization of `X`
/// means `X + E ⪰ 0` with `‖E‖₂ ≤ n·γ_{n+1}·max_i X_ii`.
pub fn psd_margin(n: usize, max_diag: f64) -> f64 {
    let gamma = (n as f64 + 1.0) * f64::EPSILON;
    2.0 * n as f64 * gamma / (1.0 - gamma) * max_diag.max(f64::MIN_POSITIVE)
}

// A matrix power carried as `mat · exp(log_scale)` so long products never
// overflow or underflow.
#[derive(Clone)]
struct ScaledPower {
    mat: Mat<f64>,
    log_scale: f64,
    zero: bool,
}

impl ScaledPower {
    fn new(m: Mat<f64>) -> Self {
        let mut p = ScaledPower { mat: m, log_scale: 0.0, zero: false };
        p.renormalize();
        p
    }

    fn renormalize(&mut self) {
        let s = self.mat.norm_max();
        if s.is_nan() || s <= 0.0 {
            self.zero = true;
            return;
        }
        self.mat = &self.mat * faer::Scale(1.0 / s);
        self.log_scale += s.ln();
    }

    fn mul(&self, rhs: &ScaledPower) -> ScaledPower {
        if self.zero || rhs.zero {
            return ScaledPower { mat: Mat::zeros(self.mat.nrows(), self.mat.ncols()), log_scale: 0.0, zero: true };
        }
        let mut p = ScaledPower { mat: &self.mat * &rhs.mat, log_scale: self.log_scale + rhs.log_scale, zero: false };
        p.renormalize();
        p
    }

    fn root_norm(&self, norm: NormKind, z: usize) -> f64 {
        if self.zero {
            return 0.0;
        }
        let nrm = norm.eval(&DenseMatrix::from_faer(self.mat.as_ref()));
        if nrm == 0.0 {
            return 0.0;
        }
        ((nrm.ln() + self.log_scale) / z as f64).exp()
    }
}

/// `‖M^z‖^{1/z}`, an upper bound on the spectral radius.
pub fn spectral_radius_upper(m: &DenseMatrix, z: usize, norm: NormKind) -> Result<f64> {
    Ok(gelfand_profile(m, z, norm)?.last().map_or(0.0, |&(_, v)| v))
}

/// Values of `‖M^j‖^{1/j}` for `j = 1, 2, 4, …` up to `z`, then `j = z`
/// itself (last). Every entry bounds the spectral radius from above.
pub fn gelfand_profile(m: &DenseMatrix, z: usize, norm: NormKind) -> Result<Vec<(usize, f64)>> {
    m.require_square()?;
    if z == 0 {
        return Err(Error::invalid("power count z must be at least 1"));
    }
    let mut out = Vec::new();
    let mut base = ScaledPower::new(m.to_faer());
    let mut acc: Option<ScaledPower> = None;
    let mut pow = 1usize;
    let mut rest = z;
    loop {
        out.push((pow, base.root_norm(norm, pow)));
        if rest & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.mul(&base),
            });
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        base = base.mul(&base);
        pow *= 2;
    }
    let acc = acc.expect("z >= 1 sets at least one bit");
    if pow != z {
        out.push((z, acc.root_norm(norm, z)));
    }
    Ok(out)
}

/// Sound spectral radius bound: the smallest Gelfand value over the profile,
/// inflated by a relative margin for rounding in the products.
pub fn spectral_radius_bound(m: &DenseMatrix, z: usize, norm: NormKind) -> Result<f64> {
    let best = gelfand_profile(m, z, norm)?.into_iter().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    Ok(best * (1.0 + GELFAND_MARGIN))
}

pub const GELFAND_MARGIN: f64 = 1e-8;
