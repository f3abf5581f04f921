//! Dense complex linear algebra and FFT kernels.
//!
//! Everything here is a pure function of its inputs. Matrices are small
//! (at most a few hundred rows) and dense, so the kernels favour clarity and
//! predictable round-off over blocking or SIMD.

mod eig;
mod fft;
mod matrix;
mod qr;
mod solve;

use thiserror::Error;

pub use eig::{hermitian_eig, EigenDecomposition};
pub use fft::{fft, fft_in_place};
pub use matrix::{kron, kron_vec, ComplexMatrix, ComplexVector, C64};
pub use qr::{qr_decompose, QrFactors};
pub use solve::{inverse_hermitian, solve_hermitian};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (relative defect {0:.3e})")]
    NonHermitian(f64),
    #[error("non-finite entry")]
    NonFinite,
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("empty input")]
    Empty,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("FFT length {0} is not a power of two")]
    BadLength(usize),
    #[error("system is ill-conditioned or not positive definite")]
    IllConditioned,
}

/// Number of eigenvalues above `rel_tol · λ_max` of a Hermitian PSD matrix.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> Result<usize, NumericsError> {
    let eig = hermitian_eig(a)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(0);
    }
    Ok(eig.values.iter().filter(|&&v| v > rel_tol * top).count())
}
