//! Additive singularity preservers.

mod detshift;
mod factor;

pub use detshift::{det_shift_polynomial, ShiftPolynomial};
pub use factor::{factor_singularity_preserver, BlockFactor, FactorError, SemilinearFactorization};
