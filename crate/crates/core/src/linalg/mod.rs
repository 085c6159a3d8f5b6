//! Dense and symmetric-sparse real matrices, norms, eigenvalues, Gelfand
//! spectral-radius bounds and the exhaustive ∞→1 oracle.

mod dense;
pub mod norms;
pub mod spectral;
mod sym;

pub use dense::DenseMatrix;
pub use norms::{abs_entry_sum, brute_inf_to_one, brute_inf_to_one_capped, frobenius, inf_induced, BRUTE_DIM_CAP};
pub use spectral::{
    cholesky_psd, det, eigenvalues, gelfand_profile, min_eig_symmetric, min_real_eigenvalue, spectral_radius,
    spectral_radius_bound, spectral_radius_upper, symmetric_eigenvalues, NormKind, DEFAULT_IM_TOL,
};
pub use sym::SymWeightedMatrix;
