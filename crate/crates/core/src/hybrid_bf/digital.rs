use super::{AnalogBeamformer, HybridError};
use crate::numerics::{inverse_hermitian, ComplexMatrix};

/// Baseband ZF precoder and the amplitude it delivers to every UE.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalPrecoder {
    pub matrix: ComplexMatrix,
    pub beta: f64,
}

/// Unnormalized ZF `conj(H)·(Hᵀ·conj(H))⁻¹` for an `N × K` channel.
fn zf_direction(h: &ComplexMatrix) -> Result<ComplexMatrix, HybridError> {
    let hc = h.conj();
    let gram = h.transpose().matmul(&hc);
    let inv = inverse_hermitian(&gram)?;
    Ok(hc.matmul(&inv))
}

fn check_l_used(l_used: usize) -> Result<(), HybridError> {
    if l_used == 0 {
        return Err(HybridError::DimMismatch("l_used must be positive".into()));
    }
    Ok(())
}

/// Full-digital ZF with `‖W‖_F² = 1/L_used`; returns `(W, β)` with `Hᵀ·W = β·I`.
pub fn zf_full(h: &ComplexMatrix, l_used: usize) -> Result<(ComplexMatrix, f64), HybridError> {
    check_l_used(l_used)?;
    if h.cols() > h.rows() {
        return Err(HybridError::DimMismatch(format!("{} UEs exceed {} antennas", h.cols(), h.rows())));
    }
    let dir = zf_direction(h)?;
    // ‖dir‖_F² = tr[(Hᵀ·conj(H))⁻¹]
    let beta = (1.0 / (l_used as f64 * dir.frobenius_norm_sqr())).sqrt();
    Ok((dir.scale_real(beta), beta))
}

/// ZF on the effective channel `Hᵀ·W_rf`.
///
/// Power is normalized through the analog stage, `‖W_rf·W_bb‖_F² = 1/L_used`,
/// which also covers phase-only beamformers whose columns are not orthonormal.
pub fn zf_hybrid(h: &ComplexMatrix, w_rf: &AnalogBeamformer, l_used: usize) -> Result<DigitalPrecoder, HybridError> {
    check_l_used(l_used)?;
    if h.rows() != w_rf.num_antennas() {
        return Err(HybridError::DimMismatch(format!(
            "channel has {} antennas, beamformer {}",
            h.rows(),
            w_rf.num_antennas()
        )));
    }
    if h.cols() > w_rf.num_chains() {
        return Err(HybridError::DimMismatch(format!("{} UEs exceed {} RF chains", h.cols(), w_rf.num_chains())));
    }
    let h_p = w_rf.matrix.transpose().matmul(h);
    let dir = zf_direction(&h_p)?;
    let radiated = w_rf.matrix.matmul(&dir).frobenius_norm_sqr();
    let beta = (1.0 / (l_used as f64 * radiated)).sqrt();
    Ok(DigitalPrecoder { matrix: dir.scale_real(beta), beta })
}

/// `K·log2(1 + β²/(K·σ²))` for a ZF-equalized subcarrier.
pub fn sum_rate_zf(beta: f64, k: usize, noise_power: f64) -> f64 {
    let k = k as f64;
    k * (1.0 + beta * beta / (k * noise_power)).log2()
}
