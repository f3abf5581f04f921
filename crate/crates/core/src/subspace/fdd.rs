use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::estimate::{
    assemble_scm, factors_from_samples, weighted_factor, DimFactor, DominantAngle, PartialSamples, Retained,
    ScParams, ScmEstimate, steering_angles,
};
use super::SubspaceError;
use crate::channel::ArrayGeometry;

/// Uplink and downlink carrier frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FddConfig {
    pub f_ul: f64,
    pub f_dl: f64,
}

impl FddConfig {
    pub fn new(f_ul: f64, f_dl: f64) -> Result<Self, SubspaceError> {
        if !(f_ul > 0.0 && f_dl > 0.0 && f_ul.is_finite() && f_dl.is_finite()) {
            return Err(SubspaceError::BadParams("carrier frequencies must be positive".into()));
        }
        Ok(Self { f_ul, f_dl })
    }

    /// Carriers with `f_ul/f_dl = eta` around a unit downlink carrier.
    pub fn from_eta(eta: f64) -> Result<Self, SubspaceError> {
        Self::new(eta, 1.0)
    }

    /// `f_ul / f_dl`.
    pub fn eta(&self) -> f64 {
        self.f_ul / self.f_dl
    }
}

/// Maps `ω` to `(−π, π]`.
fn unwrap_principal(omega: f64) -> f64 {
    let w = omega.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Scales a phase progression measured on the uplink carrier to the downlink one.
pub fn rescale_omega(omega_ul: f64, cfg: &FddConfig) -> f64 {
    (unwrap_principal(omega_ul) * (cfg.f_dl / cfg.f_ul)).rem_euclid(TAU)
}

/// Uplink dominant angle carried to the downlink carrier.
///
/// `omega0` keeps the exact scaled value; `bin_index` is the nearest grid bin.
pub fn fdd_rescale(angle: &DominantAngle, cfg: &FddConfig) -> DominantAngle {
    let omega0 = rescale_omega(angle.omega0, cfg);
    let n = angle.n_fft;
    let bin = (omega0 * n as f64 / TAU).round() as usize % n;
    DominantAngle { omega0, bin_index: bin + 1, n_fft: n }
}

/// Rebuilds a factor with every retained column angle moved to the downlink carrier.
pub fn rescale_factor(f: &DimFactor, cfg: &FddConfig, m_target: usize) -> Result<DimFactor, SubspaceError> {
    let angles: Vec<f64> = f.angles.iter().map(|&w| rescale_omega(w, cfg)).collect();
    Ok(DimFactor {
        factor: weighted_factor(&angles, &f.retained.weights, m_target)?,
        angle: fdd_rescale(&f.angle, cfg),
        angles,
        retained: f.retained.clone(),
        m_d: f.m_d,
    })
}

/// Downlink SCM estimate from uplink partial CSI.
///
/// `rescale = false` reuses the uplink angles unchanged, the naive baseline.
pub fn estimate_fdd_scm(
    samples_ul: &PartialSamples,
    geom_dl: &ArrayGeometry,
    params: &ScParams,
    kappa: (usize, usize),
    cfg: &FddConfig,
    rescale: bool,
) -> Result<ScmEstimate, SubspaceError> {
    let (h, v) = factors_from_samples(samples_ul, geom_dl, params, kappa)?;
    if !rescale {
        return assemble_scm(&h, &v, geom_dl.num_antennas());
    }
    let h = rescale_factor(&h, cfg, geom_dl.m_h)?;
    let v = rescale_factor(&v, cfg, geom_dl.m_v)?;
    assemble_scm(&h, &v, geom_dl.num_antennas())
}

/// What a UE reports for one dimension instead of raw CSI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSummary {
    pub angle: DominantAngle,
    pub m_d: usize,
    pub retained: Retained,
}

impl DimSummary {
    pub fn from_factor(f: &DimFactor) -> Self {
        Self { angle: f.angle, m_d: f.m_d, retained: f.retained.clone() }
    }

    /// Rebuilds the weighted steering factor on the BS side.
    pub fn reconstruct(&self, m_target: usize) -> Result<DimFactor, SubspaceError> {
        let all = steering_angles(self.angle.omega0, self.m_d);
        let angles: Vec<f64> = self
            .retained
            .indices
            .iter()
            .map(|&i| all.get(i).copied().ok_or_else(|| SubspaceError::BadParams(format!("column {i} out of range"))))
            .collect::<Result<_, _>>()?;
        Ok(DimFactor {
            factor: weighted_factor(&angles, &self.retained.weights, m_target)?,
            angle: self.angle,
            angles,
            retained: self.retained.clone(),
            m_d: self.m_d,
        })
    }
}

/// Both dimensions of a compressed report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmSummary {
    pub horizontal: DimSummary,
    pub vertical: DimSummary,
}

/// UE side of the compressed protocol: estimate locally, report the summary.
pub fn summarize_feedback(
    samples: &PartialSamples,
    geom: &ArrayGeometry,
    params: &ScParams,
    kappa: (usize, usize),
) -> Result<ScmSummary, SubspaceError> {
    let (h, v) = factors_from_samples(samples, geom, params, kappa)?;
    Ok(ScmSummary { horizontal: DimSummary::from_factor(&h), vertical: DimSummary::from_factor(&v) })
}

/// BS side of the compressed protocol.
pub fn scm_from_summary(summary: &ScmSummary, geom: &ArrayGeometry) -> Result<ScmEstimate, SubspaceError> {
    let h = summary.horizontal.reconstruct(geom.m_h)?;
    let v = summary.vertical.reconstruct(geom.m_v)?;
    assemble_scm(&h, &v, geom.num_antennas())
}

/// BS side of the raw protocol: the UE forwards its partial CSI unchanged.
pub fn scm_from_raw_feedback(
    samples: &PartialSamples,
    geom: &ArrayGeometry,
    params: &ScParams,
    kappa: (usize, usize),
) -> Result<ScmEstimate, SubspaceError> {
    let (h, v) = factors_from_samples(samples, geom, params, kappa)?;
    assemble_scm(&h, &v, geom.num_antennas())
}

// sizes used for feedback accounting only; no wire format is implied
const BYTES_PER_COMPLEX: usize = 8;
const BYTES_PER_WEIGHT: usize = 4;
const BYTES_PER_INDEX: usize = 2;
const BYTES_PER_ANGLE: usize = 4;

/// Uplink payload of the raw protocol.
pub fn raw_feedback_bytes(samples: &PartialSamples) -> usize {
    samples.num_complex_values() * BYTES_PER_COMPLEX
}

/// Uplink payload of the compressed protocol.
///
/// The strongest column is always `ω₀` itself, so only the remaining
/// `N̆ − 1` indices are sent.
pub fn summary_feedback_bytes(summary: &ScmSummary) -> usize {
    [&summary.horizontal, &summary.vertical]
        .iter()
        .map(|d| {
            let n = d.retained.weights.len();
            BYTES_PER_ANGLE + n * BYTES_PER_WEIGHT + n.saturating_sub(1) * BYTES_PER_INDEX
        })
        .sum()
}
