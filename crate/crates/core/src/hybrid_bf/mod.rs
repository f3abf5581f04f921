//! Unified analog beamforming, baseband ZF, benchmark rates and the
//! RF-chain sufficiency calculator.

mod analog;
mod digital;
mod sufficiency;
mod thp;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use analog::{
    aggregate_scm, aggregate_scm_weighted, project_phase_only, trace_objective, unified_ab_ideal,
    unified_ab_phase_only, AbMode, AnalogBeamformer,
};
pub use digital::{sum_rate_zf, zf_full, zf_hybrid, DigitalPrecoder};
pub use sufficiency::{horizontal_extent, sufficient_rf_chains, RfSufficiency};
pub use thp::{sum_rate_zf_thp, water_fill, WaterFilling};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("trace has imaginary part {0:.3e}")]
    NonRealTrace(f64),
    #[error("{r_chains} RF chains invalid for {antennas} antennas")]
    BadRfChains { r_chains: usize, antennas: usize },
}
