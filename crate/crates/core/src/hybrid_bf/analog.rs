use serde::{Deserialize, Serialize};

use super::HybridError;
use crate::numerics::{hermitian_eig, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbMode {
    /// Orthonormal columns, amplitude and phase both free.
    Ideal,
    /// Every entry has modulus `1/√M`.
    PhaseOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer {
    pub matrix: ComplexMatrix,
    pub mode: AbMode,
}

impl AnalogBeamformer {
    pub fn num_antennas(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_chains(&self) -> usize {
        self.matrix.cols()
    }

    /// `I_M` as an ideal beamformer with `R = M`.
    pub fn identity(m: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(m), mode: AbMode::Ideal }
    }
}

/// Weighted sum `Σ w_i·R_i` of covariance matrices.
pub fn aggregate_scm_weighted<'a>(
    scms: impl IntoIterator<Item = (&'a ComplexMatrix, f64)>,
) -> Result<ComplexMatrix, HybridError> {
    let mut acc: Option<ComplexMatrix> = None;
    for (r, w) in scms {
        if !r.is_square() {
            return Err(HybridError::DimMismatch(format!("SCM is {}x{}", r.rows(), r.cols())));
        }
        match acc.as_mut() {
            None => acc = Some(r.scale_real(w)),
            Some(a) => {
                if a.shape() != r.shape() {
                    return Err(HybridError::DimMismatch(format!(
                        "SCM sizes {:?} and {:?} differ",
                        a.shape(),
                        r.shape()
                    )));
                }
                a.add_scaled_assign(r, w);
            }
        }
    }
    acc.ok_or_else(|| HybridError::DimMismatch("no SCMs to aggregate".into()))
}

/// Unweighted sum of per-UE covariance matrices.
pub fn aggregate_scm<'a>(scms: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix, HybridError> {
    aggregate_scm_weighted(scms.into_iter().map(|r| (r, 1.0)))
}

fn check_chains(r: &ComplexMatrix, r_chains: usize) -> Result<(), HybridError> {
    if r_chains == 0 || r_chains > r.rows() {
        return Err(HybridError::BadRfChains { r_chains, antennas: r.rows() });
    }
    Ok(())
}

/// Top-`R` eigenvectors of the aggregate covariance.
pub fn unified_ab_ideal(r: &ComplexMatrix, r_chains: usize) -> Result<AnalogBeamformer, HybridError> {
    check_chains(r, r_chains)?;
    let eig = hermitian_eig(r)?;
    Ok(AnalogBeamformer { matrix: eig.leading_vectors(r_chains), mode: AbMode::Ideal })
}

/// Phases of the top-`R` eigenvectors at modulus `1/√M`; a zero entry maps to phase 0.
pub fn unified_ab_phase_only(r: &ComplexMatrix, r_chains: usize) -> Result<AnalogBeamformer, HybridError> {
    let ideal = unified_ab_ideal(r, r_chains)?;
    Ok(project_phase_only(&ideal.matrix))
}

pub fn project_phase_only(p: &ComplexMatrix) -> AnalogBeamformer {
    let amp = 1.0 / (p.rows() as f64).sqrt();
    let matrix = ComplexMatrix::from_fn(p.rows(), p.cols(), |i, j| {
        let z = p[(i, j)];
        if z == C64::new(0.0, 0.0) {
            C64::new(amp, 0.0)
        } else {
            C64::from_polar(amp, z.arg())
        }
    });
    AnalogBeamformer { matrix, mode: AbMode::PhaseOnly }
}

/// `tr[Wᴴ·R·W]`, which is real for Hermitian `R`.
pub fn trace_objective(w: &AnalogBeamformer, r: &ComplexMatrix) -> Result<f64, HybridError> {
    if r.rows() != w.num_antennas() || !r.is_square() {
        return Err(HybridError::DimMismatch(format!(
            "beamformer has {} rows, SCM is {}x{}",
            w.num_antennas(),
            r.rows(),
            r.cols()
        )));
    }
    let t = w.matrix.adjoint().matmul(r).matmul(&w.matrix).trace();
    if t.im.abs() > 1e-6 * t.re.abs().max(f64::MIN_POSITIVE) {
        return Err(HybridError::NonRealTrace(t.im));
    }
    Ok(t.re)
}
