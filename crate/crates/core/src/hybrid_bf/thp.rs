use super::HybridError;
use crate::numerics::{qr_decompose, ComplexMatrix};

/// Water-filling solution over parallel channels with power gains `a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFilling {
    pub levels: Vec<f64>,
    pub water_level: f64,
    /// `Σ_active log2(water_level)`.
    pub log_offset: f64,
}

impl WaterFilling {
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, _)| i)
    }
}

/// Maximizes `Σ log2(1 + p_k·a_k)` subject to `Σ p_k = budget`, `p_k ≥ 0`.
///
/// `p_k = max(0, ξ − 1/a_k)`. Streams with `a_k = 0` never receive power.
pub fn water_fill(gains: &[f64], budget: f64) -> WaterFilling {
    let mut inv: Vec<(usize, f64)> =
        gains.iter().enumerate().filter(|(_, &a)| a > 0.0).map(|(i, &a)| (i, 1.0 / a)).collect();
    inv.sort_by(|x, y| x.1.total_cmp(&y.1));

    let mut levels = vec![0.0; gains.len()];
    if inv.is_empty() || budget <= 0.0 {
        return WaterFilling { levels, water_level: 0.0, log_offset: 0.0 };
    }
    // largest active set whose weakest member still sits below the water
    let mut n = inv.len();
    let mut xi = 0.0;
    while n > 0 {
        let sum_inv: f64 = inv[..n].iter().map(|&(_, v)| v).sum();
        xi = (budget + sum_inv) / n as f64;
        if xi > inv[n - 1].1 {
            break;
        }
        n -= 1;
    }
    for &(i, v) in &inv[..n] {
        levels[i] = xi - v;
    }
    WaterFilling { levels, water_level: xi, log_offset: n as f64 * xi.log2() }
}

/// Water-filled ZF-THP rate of one subcarrier for the effective channel `K × R`.
pub fn sum_rate_zf_thp(h_eff_t: &ComplexMatrix, noise_power: f64, budget: f64) -> Result<f64, HybridError> {
    let qr = qr_decompose(h_eff_t)?;
    let gains: Vec<f64> = qr.diag().iter().map(|g| g * g / noise_power).collect();
    let wf = water_fill(&gains, budget);
    Ok(gains.iter().zip(&wf.levels).map(|(a, p)| (1.0 + p * a).log2()).sum())
}
