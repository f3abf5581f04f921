use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SubspaceError;
use crate::channel::{ArrayGeometry, FrequencyResponse, UeChannelProfile};
use crate::numerics::{ComplexMatrix, ComplexVector, C64};

/// Antennas sampled during partial-CSI training: one (possibly shortened)
/// row and one full column sharing the corner element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialConnection {
    /// Flat antenna index read by each selector row, row antennas first.
    pub measured: Vec<usize>,
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
}

impl PartialConnection {
    /// The first row and the first column, `P = M_h + M_v − 1`.
    pub fn row_and_column(geom: &ArrayGeometry) -> Self {
        Self::reduced_row(geom, geom.m_h).expect("full row is always valid")
    }

    /// The first `m_h_prime` antennas of the first row plus the first column.
    pub fn reduced_row(geom: &ArrayGeometry, m_h_prime: usize) -> Result<Self, SubspaceError> {
        if m_h_prime == 0 || m_h_prime > geom.m_h {
            return Err(SubspaceError::BadSelector(format!("row length {m_h_prime} not in 1..={}", geom.m_h)));
        }
        let row_indices: Vec<usize> = (0..m_h_prime).map(|i_h| geom.index(i_h, 0)).collect();
        let col_indices: Vec<usize> = (0..geom.m_v).map(|i_v| geom.index(0, i_v)).collect();
        let mut measured = row_indices.clone();
        measured.extend(col_indices.iter().skip(1));
        Ok(Self { measured, row_indices, col_indices })
    }

    /// Largest row that fits into `r_chains` simultaneous measurements.
    pub fn for_rf_chains(geom: &ArrayGeometry, r_chains: usize) -> Result<Self, SubspaceError> {
        if r_chains < geom.m_v {
            return Err(SubspaceError::BadSelector(format!(
                "{r_chains} RF chains cannot measure a column of {} antennas",
                geom.m_v
            )));
        }
        Self::reduced_row(geom, geom.m_h.min(r_chains + 1 - geom.m_v))
    }

    pub fn num_measured(&self) -> usize {
        self.measured.len()
    }

    /// Binary `P × M` selection matrix.
    pub fn selector(&self, num_antennas: usize) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(self.measured.len(), num_antennas);
        for (p, &m) in self.measured.iter().enumerate() {
            t[(p, m)] = C64::new(1.0, 0.0);
        }
        t
    }

    pub fn validate(&self, geom: &ArrayGeometry) -> Result<(), SubspaceError> {
        let m = geom.num_antennas();
        let expect = match Self::reduced_row(geom, self.row_indices.len()) {
            Ok(c) => c,
            Err(_) => return Err(SubspaceError::BadSelector("row length does not fit the array".into())),
        };
        if *self != expect || self.measured.iter().any(|&i| i >= m) {
            return Err(SubspaceError::BadSelector("connection does not match the array layout".into()));
        }
        Ok(())
    }
}

/// CSI accuracy `ζ ∈ [0, 1]`; estimates are `ζ·h + √(1−ζ²)·ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiErrorModel {
    pub zeta: f64,
}

impl CsiErrorModel {
    pub const PERFECT: Self = Self { zeta: 1.0 };

    pub fn new(zeta: f64) -> Result<Self, SubspaceError> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(SubspaceError::BadParams(format!("zeta {zeta} outside [0, 1]")));
        }
        Ok(Self { zeta })
    }

    /// Corrupts every entry with independent `CN(0,1)` noise.
    pub fn apply<R: Rng + ?Sized>(&self, h: &[C64], rng: &mut R) -> Vec<C64> {
        if self.zeta >= 1.0 {
            return h.to_vec();
        }
        let s = (1.0 - self.zeta * self.zeta).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        h.iter()
            .map(|&x| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                x * self.zeta + C64::new(re, im) * s
            })
            .collect()
    }
}

/// Splits a full channel into its measured row and column, after corruption.
pub fn partial_csi_from_channel<R: Rng + ?Sized>(
    h: &ComplexVector,
    conn: &PartialConnection,
    err: &CsiErrorModel,
    rng: &mut R,
) -> (ComplexVector, ComplexVector) {
    let raw: Vec<C64> = conn.measured.iter().map(|&m| h[m]).collect();
    let noisy = err.apply(&raw, rng);
    let n_row = conn.row_indices.len();
    let h_vec: ComplexVector = noisy[..n_row].iter().copied().collect();
    // the corner antenna is shared by both vectors
    let v_vec: ComplexVector = std::iter::once(noisy[0]).chain(noisy[n_row..].iter().copied()).collect();
    (h_vec, v_vec)
}

/// Row and column CSI of one UE at 1-based subcarrier `l`.
pub fn measure_partial_csi<R: Rng + ?Sized>(
    profile: &UeChannelProfile,
    geom: &ArrayGeometry,
    conn: &PartialConnection,
    l: usize,
    fft_size: usize,
    err: &CsiErrorModel,
    rng: &mut R,
) -> Result<(ComplexVector, ComplexVector), SubspaceError> {
    conn.validate(geom)?;
    let h = FrequencyResponse::new(profile, geom).at(l, fft_size);
    Ok(partial_csi_from_channel(&h, conn, err, rng))
}
