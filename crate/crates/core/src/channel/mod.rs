//! Clustered multipath channel model for a uniform planar array.

mod geometry;
mod profile;

use thiserror::Error;

pub use geometry::{
    array_response, horizontal_phase, steering_h, steering_v, vertical_phase, ArrayGeometry, Sector,
};
pub use profile::{
    freq_channel, generate_profile, true_scm, true_subspace, ClusterParams, FrequencyResponse, Ray, TrueScm,
    TrueSubspace, UeChannelProfile,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid array geometry: {0}")]
    BadGeometry(String),
    #[error("invalid sector: {0}")]
    BadSector(String),
    #[error("invalid cluster parameters: {0}")]
    BadParams(String),
}
