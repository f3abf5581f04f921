//! Hybrid beamforming with a unified analog stage for multi-group MIMO-OFDM.

pub mod channel;
pub mod harness;
pub mod hybrid_bf;
pub mod numerics;
pub mod subspace;
