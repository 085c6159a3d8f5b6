//! Spectral certificates from generalized non-backtracking matrices, and
//! their use for refuting random k-XOR and CSP instances.
//!
//! Every certificate is a chain of numerically evaluated inequalities that
//! can be re-checked, and every bound is auditable against exhaustive search
//! at small sizes.

pub mod certify;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod nonbacktracking;
pub mod refute;
pub mod rng;
pub mod walks;

pub use error::{Error, Result};
