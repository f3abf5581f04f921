use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::partial::{partial_csi_from_channel, CsiErrorModel, PartialConnection};
use super::SubspaceError;
use crate::channel::{ArrayGeometry, FrequencyResponse, UeChannelProfile};
use crate::numerics::{fft_in_place, kron, ComplexMatrix, ComplexVector, C64};

const NON_REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    Horizontal,
    Vertical,
}

/// Sample covariance of one array dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimScm {
    pub matrix: ComplexMatrix,
    pub dimension: Dimension,
}

impl DimScm {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }
}

/// Grid angle `2π(bin_index−1)/n_fft`; `bin_index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantAngle {
    pub omega0: f64,
    pub bin_index: usize,
    pub n_fft: usize,
}

impl DominantAngle {
    pub fn from_bin(bin_index: usize, n_fft: usize) -> Self {
        Self { omega0: 2.0 * PI * (bin_index - 1) as f64 / n_fft as f64, bin_index, n_fft }
    }
}

/// Estimator settings shared by both dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScParams {
    /// Reduction threshold; `None` keeps every steering column.
    pub gamma: Option<f64>,
    /// FFT size of the angle search; `None` picks the per-dimension default.
    pub n_fft: Option<usize>,
    /// Subcarrier stride for the covariance average; `None` picks about 25 samples.
    pub stride: Option<usize>,
}

impl Default for ScParams {
    fn default() -> Self {
        Self { gamma: Some(10.0), n_fft: None, stride: None }
    }
}

impl ScParams {
    pub fn validate(&self) -> Result<(), SubspaceError> {
        if let Some(g) = self.gamma {
            if !(g > 1.0) {
                return Err(SubspaceError::BadParams(format!("gamma {g} must exceed 1")));
            }
        }
        if let Some(n) = self.n_fft {
            if !n.is_power_of_two() {
                return Err(SubspaceError::BadNfft { n_fft: n, m_d: 0 });
            }
        }
        if self.stride == Some(0) {
            return Err(SubspaceError::BadParams("stride must be positive".into()));
        }
        Ok(())
    }

    pub fn gamma_or_inf(&self) -> f64 {
        self.gamma.unwrap_or(f64::INFINITY)
    }

    pub fn n_fft_for(&self, m_d: usize) -> usize {
        self.n_fft.unwrap_or_else(|| default_n_fft(m_d))
    }
}

/// Smallest power of two `≥ 4·m_d`; a multiple of `m_d` whenever `m_d` is a power of two.
pub fn default_n_fft(m_d: usize) -> usize {
    (4 * m_d.max(1)).next_power_of_two()
}

/// Mean of `v·vᴴ` over the samples.
pub fn dim_scm(samples: &[ComplexVector], dimension: Dimension) -> Result<DimScm, SubspaceError> {
    let n = samples.first().ok_or(SubspaceError::Empty)?.len();
    if n == 0 {
        return Err(SubspaceError::Empty);
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for s in samples {
        if s.len() != n {
            return Err(SubspaceError::DimMismatch(format!("sample lengths {} and {}", n, s.len())));
        }
        acc.add_scaled_assign(&s.outer_h(), 1.0);
    }
    Ok(DimScm { matrix: acc.scale_real(1.0 / samples.len() as f64), dimension })
}

/// `e_n[ω]`, the unit-norm phase ramp of length `n`.
pub fn grid_vector(n: usize, omega: f64) -> ComplexVector {
    let amp = 1.0 / (n as f64).sqrt();
    (0..n).map(|m| C64::from_polar(amp, omega * m as f64)).collect()
}

/// Quadratic form `eᴴ[ω_n]·R·e[ω_n]` on the whole `n_fft` grid via one FFT.
///
/// The lag sequence sums the sub-diagonals `ρ[p] = Σ_m r_{m+p,m}` with half
/// the trace at lag 0, so that `eᴴRe = (2/M_d)·Re Σ_p ρ[p]·e^{-jpω}` matches
/// the forward (negative exponent) transform.
pub fn angular_spectrum(scm: &DimScm, n_fft: usize) -> Result<Vec<f64>, SubspaceError> {
    let m_d = scm.size();
    if n_fft < m_d || !n_fft.is_power_of_two() {
        return Err(SubspaceError::BadNfft { n_fft, m_d });
    }
    let r = &scm.matrix;
    let mut rho = vec![C64::new(0.0, 0.0); n_fft];
    for p in 0..m_d {
        let mut s = C64::new(0.0, 0.0);
        for m in 0..(m_d - p) {
            s += r[(m + p, m)];
        }
        rho[p] = if p == 0 { s * 0.5 } else { s };
    }
    fft_in_place(&mut rho)?;
    let scale = 2.0 / m_d as f64;
    Ok(rho.iter().map(|z| scale * z.re).collect())
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// FFT grid search for the angle maximizing `eᴴRe`; ties go to the lowest bin.
pub fn dominant_angle(scm: &DimScm, n_fft: usize) -> Result<DominantAngle, SubspaceError> {
    Ok(dominant_angle_with_spectrum(scm, n_fft)?.0)
}

pub fn dominant_angle_with_spectrum(scm: &DimScm, n_fft: usize) -> Result<(DominantAngle, Vec<f64>), SubspaceError> {
    let spec = angular_spectrum(scm, n_fft)?;
    let bin = argmax_lowest(&spec);
    Ok((DominantAngle::from_bin(bin + 1, n_fft), spec))
}

/// Angles `ω₀ + 2π·m/m_d`, `m = 0..m_d`, tracked by the steering matrix.
pub fn steering_angles(omega0: f64, m_d: usize) -> Vec<f64> {
    (0..m_d).map(|m| omega0 + 2.0 * PI * m as f64 / m_d as f64).collect()
}

/// `m_target × m_d` matrix with columns `e_{m_target}[ω₀ + 2π·m/m_d]`.
pub fn steering_matrix(angle: &DominantAngle, m_d: usize, m_target: usize) -> ComplexMatrix {
    let cols: Vec<ComplexVector> =
        steering_angles(angle.omega0, m_d).into_iter().map(|w| grid_vector(m_target, w)).collect();
    ComplexMatrix::from_columns(&cols)
}

/// `d_mm = s_mᴴ·R·s_m` for every column of a square steering matrix.
pub fn steering_weights(scm: &DimScm, s: &ComplexMatrix) -> Result<Vec<f64>, SubspaceError> {
    if s.rows() != scm.size() {
        return Err(SubspaceError::DimMismatch(format!(
            "steering matrix has {} rows, covariance is {}",
            s.rows(),
            scm.size()
        )));
    }
    let scale = scm.matrix.trace().re.abs().max(f64::MIN_POSITIVE);
    (0..s.cols())
        .map(|m| {
            let col = s.column(m);
            let q = col.dot_h(&scm.matrix.mul_vec(&col));
            if q.im.abs() > NON_REAL_TOL * q.re.abs().max(scale) {
                return Err(SubspaceError::NonRealForm(q.im));
            }
            Ok(q.re)
        })
        .collect()
}

/// Same weights read off the search spectrum at bins `n₀ + m·N_F/M_d`.
pub fn steering_weights_from_spectrum(
    spectrum: &[f64],
    angle: &DominantAngle,
    m_d: usize,
) -> Result<Vec<f64>, SubspaceError> {
    let n_fft = spectrum.len();
    if n_fft != angle.n_fft || m_d == 0 || !n_fft.is_multiple_of(m_d) {
        return Err(SubspaceError::BadNfft { n_fft, m_d });
    }
    let step = n_fft / m_d;
    Ok((0..m_d).map(|m| spectrum[(angle.bin_index - 1 + m * step) % n_fft]).collect())
}

/// Steering columns kept by the threshold and rank cap, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retained {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Keeps columns with `d_max ≤ γ·d_mm`, then the `min(N, κ)` largest.
/// `γ = ∞` keeps every column and ignores `κ`.
pub fn select_columns(d: &[f64], gamma: f64, kappa: usize) -> Retained {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    if gamma.is_infinite() {
        return Retained { weights: order.iter().map(|&i| d[i]).collect(), indices: order };
    }
    let d_max = order.first().map(|&i| d[i]).unwrap_or(0.0);
    let keep: Vec<usize> =
        order.into_iter().filter(|&i| d[i] > 0.0 && d_max <= gamma * d[i]).take(kappa.max(1)).collect();
    Retained { weights: keep.iter().map(|&i| d[i]).collect(), indices: keep }
}

/// Columns `d_i·e_{m_target}[ω_i]/‖d‖₂`, unit Frobenius norm.
pub fn weighted_factor(angles: &[f64], weights: &[f64], m_target: usize) -> Result<ComplexMatrix, SubspaceError> {
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(SubspaceError::ZeroPower);
    }
    let cols: Vec<ComplexVector> = angles
        .iter()
        .zip(weights)
        .map(|(&w, &d)| grid_vector(m_target, w).scale(C64::new(d / norm, 0.0)))
        .collect();
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Reduced factor `S̆·D̆/‖D̆‖_F` together with the retained columns.
pub fn reduce_and_assemble(
    s: &ComplexMatrix,
    d: &[f64],
    gamma: f64,
    kappa: usize,
) -> Result<(ComplexMatrix, Retained), SubspaceError> {
    if d.len() != s.cols() {
        return Err(SubspaceError::DimMismatch(format!("{} weights for {} columns", d.len(), s.cols())));
    }
    if !(gamma > 1.0) {
        return Err(SubspaceError::BadParams(format!("gamma {gamma} must exceed 1")));
    }
    let kept = select_columns(d, gamma, kappa);
    let norm = kept.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(SubspaceError::ZeroPower);
    }
    let mut out = s.select_columns(&kept.indices);
    for (j, w) in kept.weights.iter().enumerate() {
        for i in 0..out.rows() {
            out[(i, j)] *= w / norm;
        }
    }
    Ok((out, kept))
}

/// One dimension's share of the estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DimFactor {
    pub factor: ComplexMatrix,
    pub angle: DominantAngle,
    /// Grid angle of each retained column.
    pub angles: Vec<f64>,
    pub retained: Retained,
    /// Antennas the covariance was measured on.
    pub m_d: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScmEstimate {
    pub matrix: ComplexMatrix,
    pub h_factor: ComplexMatrix,
    pub v_factor: ComplexMatrix,
    pub h_angle: DominantAngle,
    pub v_angle: DominantAngle,
    pub h_weights: Vec<f64>,
    pub v_weights: Vec<f64>,
}

/// `R̂ = conj(V̂)·V̂ᵀ` with `V̂ = V̂_h ⊗ V̂_v`.
pub fn assemble_scm(h: &DimFactor, v: &DimFactor, num_antennas: usize) -> Result<ScmEstimate, SubspaceError> {
    if h.factor.rows() * v.factor.rows() != num_antennas {
        return Err(SubspaceError::DimMismatch(format!(
            "factor rows {}·{} do not match {} antennas",
            h.factor.rows(),
            v.factor.rows(),
            num_antennas
        )));
    }
    let vhat = kron(&h.factor, &v.factor);
    Ok(ScmEstimate {
        matrix: vhat.conj().matmul(&vhat.transpose()),
        h_factor: h.factor.clone(),
        v_factor: v.factor.clone(),
        h_angle: h.angle,
        v_angle: v.angle,
        h_weights: h.retained.weights.clone(),
        v_weights: v.retained.weights.clone(),
    })
}

/// Search, weigh, reduce one dimension; `m_target ≥ scm.size()` sets the factor height.
pub fn construct_dimension(
    scm: &DimScm,
    params: &ScParams,
    kappa: usize,
    m_target: usize,
) -> Result<DimFactor, SubspaceError> {
    let m_d = scm.size();
    if m_target < m_d {
        return Err(SubspaceError::DimMismatch(format!("target length {m_target} below {m_d} measured")));
    }
    let n_fft = params.n_fft_for(m_d);
    let (angle, spectrum) = dominant_angle_with_spectrum(scm, n_fft)?;
    let d = if n_fft.is_multiple_of(m_d) {
        steering_weights_from_spectrum(&spectrum, &angle, m_d)?
    } else {
        steering_weights(scm, &steering_matrix(&angle, m_d, m_d))?
    };
    let gamma = params.gamma_or_inf();
    let kept = select_columns(&d, gamma, kappa);
    let all_angles = steering_angles(angle.omega0, m_d);
    let angles: Vec<f64> = kept.indices.iter().map(|&i| all_angles[i]).collect();
    let factor = weighted_factor(&angles, &kept.weights, m_target)?;
    Ok(DimFactor { factor, angle, angles, retained: kept, m_d })
}

/// Per-dimension samples gathered from partial CSI.
#[derive(Debug, Clone, Default)]
pub struct PartialSamples {
    pub horizontal: Vec<ComplexVector>,
    pub vertical: Vec<ComplexVector>,
}

impl PartialSamples {
    pub fn collect<R: Rng + ?Sized>(
        response: &FrequencyResponse,
        conn: &PartialConnection,
        subcarriers: &[usize],
        fft_size: usize,
        err: &CsiErrorModel,
        rng: &mut R,
    ) -> Self {
        let mut out = Self::default();
        for &l in subcarriers {
            let h = response.at(l, fft_size);
            let (hv, vv) = partial_csi_from_channel(&h, conn, err, rng);
            out.horizontal.push(hv);
            out.vertical.push(vv);
        }
        out
    }

    /// Raw values a UE would report: `P` complex entries per subcarrier.
    pub fn num_complex_values(&self) -> usize {
        self.horizontal.iter().zip(&self.vertical).map(|(h, v)| h.len() + v.len() - 1).sum()
    }
}

/// Both dimension factors from a set of partial-CSI samples.
pub fn factors_from_samples(
    samples: &PartialSamples,
    geom: &ArrayGeometry,
    params: &ScParams,
    kappa: (usize, usize),
) -> Result<(DimFactor, DimFactor), SubspaceError> {
    params.validate()?;
    let rh = dim_scm(&samples.horizontal, Dimension::Horizontal)?;
    let rv = dim_scm(&samples.vertical, Dimension::Vertical)?;
    let h = construct_dimension(&rh, params, kappa.0, geom.m_h)?;
    let v = construct_dimension(&rv, params, kappa.1, geom.m_v)?;
    Ok((h, v))
}

/// End-to-end SCM estimate of one UE from partial CSI on the given 1-based subcarriers.
#[allow(clippy::too_many_arguments)]
pub fn estimate_ue_scm<R: Rng + ?Sized>(
    profile: &UeChannelProfile,
    geom: &ArrayGeometry,
    conn: &PartialConnection,
    params: &ScParams,
    kappa: (usize, usize),
    subcarriers: &[usize],
    fft_size: usize,
    err: &CsiErrorModel,
    rng: &mut R,
) -> Result<ScmEstimate, SubspaceError> {
    conn.validate(geom)?;
    if subcarriers.is_empty() {
        return Err(SubspaceError::Empty);
    }
    let response = FrequencyResponse::new(profile, geom);
    let samples = PartialSamples::collect(&response, conn, subcarriers, fft_size, err, rng);
    let (h, v) = factors_from_samples(&samples, geom, params, kappa)?;
    assemble_scm(&h, &v, geom.num_antennas())
}
