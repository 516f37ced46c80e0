//! Dense complex matrices over labelled tensor factors.

mod density;
mod eig;
mod layout;
mod matrix;
pub mod ops;

pub use density::DensityMatrix;
pub use eig::{
    hermitian_eig, hermitian_eig_with, hermitian_eigenvalues, hermitian_eigenvalues_with,
    min_eigenvalue, top_eigenvector, trace_norm, HermitianEigen,
};
pub use layout::{Factor, SubsystemLayout};
pub use matrix::{kron, kron_all, ComplexMatrix, C64};

use crate::error::Result;

/// Transpose the designated factors of `rho`.
pub fn partial_transpose(rho: &DensityMatrix, factors: &[usize]) -> Result<ComplexMatrix> {
    rho.partial_transpose(factors)
}

/// Trace out the designated factors of `rho`.
pub fn partial_trace(rho: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(traced)
}

/// Reorder the factors of `rho`: new factor `j` is old factor `perm[j]`.
pub fn permute_factors(rho: &DensityMatrix, perm: &[usize]) -> Result<DensityMatrix> {
    rho.permute_factors(perm)
}
