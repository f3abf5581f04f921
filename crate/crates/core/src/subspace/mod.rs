//! Covariance estimation from one measured row and column of the array.
//!
//! Each dimension is handled on its own: average the sampled outer products,
//! find the strongest grid angle with one FFT, weigh the orthogonal steering
//! columns around it, drop weak ones, and recombine both dimensions with a
//! Kronecker product.

mod estimate;
mod fdd;
mod partial;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use estimate::{
    angular_spectrum, assemble_scm, construct_dimension, default_n_fft, dim_scm, dominant_angle,
    dominant_angle_with_spectrum, estimate_ue_scm, factors_from_samples, grid_vector, reduce_and_assemble,
    select_columns, steering_angles, steering_matrix, steering_weights, steering_weights_from_spectrum,
    weighted_factor, DimFactor, DimScm, Dimension, DominantAngle, PartialSamples, Retained, ScParams, ScmEstimate,
};
pub use fdd::{
    estimate_fdd_scm, fdd_rescale, raw_feedback_bytes, rescale_factor, rescale_omega, scm_from_raw_feedback,
    scm_from_summary, summarize_feedback, summary_feedback_bytes, DimSummary, FddConfig, ScmSummary,
};
pub use partial::{measure_partial_csi, partial_csi_from_channel, CsiErrorModel, PartialConnection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubspaceError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid partial connection: {0}")]
    BadSelector(String),
    #[error("invalid estimator parameters: {0}")]
    BadParams(String),
    #[error("FFT size {n_fft} unusable for {m_d} antennas")]
    BadNfft { n_fft: usize, m_d: usize },
    #[error("quadratic form has imaginary part {0:.3e}")]
    NonRealForm(f64),
    #[error("no samples")]
    Empty,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("every steering weight is zero")]
    ZeroPower,
}
