use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::geometry::{array_response, ArrayGeometry, Sector};
use super::ChannelError;
use crate::numerics::{ComplexMatrix, ComplexVector, C64};

/// Statistics of the clustered ray model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterParams {
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    /// Probability that the first cluster is replaced by a single LoS ray.
    pub los_prob: f64,
    /// LoS power over the summed NLoS power, in dB.
    pub rician_k_db: f64,
    /// Half-width of the per-cluster angle spread, radians.
    pub angle_spread_rad: f64,
    /// Largest tap delay in samples; must stay below the cyclic prefix.
    pub max_delay: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            n_clusters: 3,
            rays_per_cluster: 10,
            los_prob: 0.5,
            rician_k_db: 10.0,
            angle_spread_rad: 5f64.to_radians(),
            max_delay: 8,
        }
    }
}

impl ClusterParams {
    /// Defaults with delays spanning the whole cyclic prefix.
    pub fn for_cp_length(cp_length: usize) -> Self {
        Self { max_delay: cp_length.saturating_sub(1), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_clusters == 0 || self.rays_per_cluster == 0 {
            return Err(ChannelError::BadParams("need at least one cluster and one ray".into()));
        }
        if !(0.0..=1.0).contains(&self.los_prob) {
            return Err(ChannelError::BadParams(format!("los_prob {} outside [0, 1]", self.los_prob)));
        }
        if !self.rician_k_db.is_finite() || !(self.angle_spread_rad >= 0.0 && self.angle_spread_rad.is_finite()) {
            return Err(ChannelError::BadParams("rician_k_db and angle_spread_rad must be finite".into()));
        }
        Ok(())
    }

    pub fn validate_for_cp(&self, cp_length: usize) -> Result<(), ChannelError> {
        self.validate()?;
        if self.max_delay >= cp_length {
            return Err(ChannelError::BadParams(format!(
                "max_delay {} must be below the cyclic prefix {}",
                self.max_delay, cp_length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub gain: C64,
    pub delay_samples: usize,
    pub phi: f64,
    pub theta: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeChannelProfile {
    pub rays: Vec<Ray>,
    pub is_los: bool,
}

impl UeChannelProfile {
    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// `√(M/N)` in front of the ray sum.
    pub fn prefactor(&self, num_antennas: usize) -> f64 {
        (num_antennas as f64 / self.rays.len() as f64).sqrt()
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Draws one UE's clustered ray ensemble.
///
/// NLoS gains are `CN(0,1)`. A LoS cluster is one ray with delay 0 and power
/// `K·(NLoS ray count)`. All gains are then rescaled so `E[Σ|α|²]` equals the
/// ray count, which makes `E‖h‖² = M` under the `√(M/N)` prefactor.
pub fn generate_profile<R: Rng + ?Sized>(
    rng: &mut R,
    geom: &ArrayGeometry,
    sector: &Sector,
    params: &ClusterParams,
) -> Result<UeChannelProfile, ChannelError> {
    geom.validate()?;
    sector.validate()?;
    params.validate()?;

    let is_los = rng.random_bool(params.los_prob);
    let spread = params.angle_spread_rad;
    let mut rays = Vec::with_capacity(params.n_clusters * params.rays_per_cluster);
    for c in 0..params.n_clusters {
        let phi_c = uniform(rng, sector.phi_min, sector.phi_max);
        let theta_c = uniform(rng, sector.theta_min, sector.theta_max);
        if is_los && c == 0 {
            let psi = rng.random_range(0.0..2.0 * PI);
            // magnitude fixed below once the NLoS count is known
            rays.push(Ray { gain: C64::from_polar(1.0, psi), delay_samples: 0, phi: phi_c, theta: theta_c, cluster: c });
            continue;
        }
        for _ in 0..params.rays_per_cluster {
            let phi = uniform(rng, (phi_c - spread).max(sector.phi_min), (phi_c + spread).min(sector.phi_max));
            let theta = uniform(rng, (theta_c - spread).max(sector.theta_min), (theta_c + spread).min(sector.theta_max));
            let delay_samples = rng.random_range(0..=params.max_delay);
            let gain = complex_gaussian(rng);
            rays.push(Ray { gain, delay_samples, phi, theta, cluster: c });
        }
    }

    let n_nlos = if is_los { rays.len() - 1 } else { rays.len() };
    let mut expected_power = n_nlos as f64;
    if is_los {
        let los_power = if n_nlos == 0 { 1.0 } else { 10f64.powf(params.rician_k_db / 10.0) * n_nlos as f64 };
        rays[0].gain *= los_power.sqrt();
        expected_power += los_power;
    }
    let scale = (rays.len() as f64 / expected_power).sqrt();
    for r in &mut rays {
        r.gain *= scale;
    }
    Ok(UeChannelProfile { rays, is_los })
}

/// Per-ray phase `e^{-j2πτ(l-1)/L}` for 1-based subcarrier `l`.
fn delay_phase(delay: usize, l: usize, fft_size: usize) -> C64 {
    // reduce the product first so large L keeps full phase precision
    let k = (delay * (l - 1)) % fft_size;
    C64::from_polar(1.0, -2.0 * PI * k as f64 / fft_size as f64)
}

/// Frequency-domain channel at 1-based subcarrier `l` of an `fft_size`-point OFDM symbol.
///
/// Panics if `l` is outside `1..=fft_size`.
pub fn freq_channel(profile: &UeChannelProfile, geom: &ArrayGeometry, l: usize, fft_size: usize) -> ComplexVector {
    FrequencyResponse::new(profile, geom).at(l, fft_size)
}

/// Cached steering vectors of one profile for repeated subcarrier evaluation.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    steering: ComplexMatrix,
    gains: Vec<C64>,
    delays: Vec<usize>,
    prefactor: f64,
}

impl FrequencyResponse {
    pub fn new(profile: &UeChannelProfile, geom: &ArrayGeometry) -> Self {
        let cols: Vec<ComplexVector> = profile.rays.iter().map(|r| array_response(geom, r.phi, r.theta)).collect();
        Self {
            steering: ComplexMatrix::from_columns(&cols),
            gains: profile.rays.iter().map(|r| r.gain).collect(),
            delays: profile.rays.iter().map(|r| r.delay_samples).collect(),
            prefactor: profile.prefactor(geom.num_antennas()),
        }
    }

    pub fn at(&self, l: usize, fft_size: usize) -> ComplexVector {
        assert!((1..=fft_size).contains(&l), "subcarrier {l} outside 1..={fft_size}");
        let coeffs: ComplexVector = self
            .gains
            .iter()
            .zip(&self.delays)
            .map(|(&g, &d)| g * delay_phase(d, l, fft_size) * self.prefactor)
            .collect();
        self.steering.mul_vec(&coeffs)
    }
}

/// Per-ray columns `√|α̃|·a(φ,θ)` spanning every subcarrier's channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueSubspace {
    pub basis: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrueScm {
    pub matrix: ComplexMatrix,
}

pub fn true_subspace(profile: &UeChannelProfile, geom: &ArrayGeometry) -> TrueSubspace {
    let cols: Vec<ComplexVector> = profile
        .rays
        .iter()
        .map(|r| array_response(geom, r.phi, r.theta).scale(C64::new(r.gain.norm().sqrt(), 0.0)))
        .collect();
    TrueSubspace { basis: ComplexMatrix::from_columns(&cols) }
}

/// `conj(V)·Vᵀ`.
pub fn true_scm(sub: &TrueSubspace) -> TrueScm {
    let v = &sub.basis;
    TrueScm { matrix: v.conj().matmul(&v.transpose()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (ArrayGeometry, Sector) {
        (
            ArrayGeometry::half_wavelength(4, 2).unwrap(),
            Sector::new(PI / 6.0, 5.0 * PI / 6.0, 5.0 * PI / 9.0, 3.0 * PI / 4.0).unwrap(),
        )
    }

    #[test]
    fn single_los_ray() {
        let (g, s) = setup();
        let p = ClusterParams { n_clusters: 1, rays_per_cluster: 1, los_prob: 1.0, ..Default::default() };
        let prof = generate_profile(&mut ChaCha8Rng::seed_from_u64(3), &g, &s, &p).unwrap();
        assert!(prof.is_los);
        assert_eq!(prof.rays.len(), 1);
        assert_eq!(prof.rays[0].delay_samples, 0);
        assert!((prof.rays[0].gain.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn many_rays_inside_sector() {
        let (g, s) = setup();
        let p = ClusterParams { n_clusters: 6, rays_per_cluster: 8, los_prob: 0.0, ..Default::default() };
        let prof = generate_profile(&mut ChaCha8Rng::seed_from_u64(42), &g, &s, &p).unwrap();
        assert_eq!(prof.rays.len(), 48);
        assert!(prof.rays.iter().all(|r| s.contains(r.phi, r.theta) && r.delay_samples <= p.max_delay));
    }

    #[test]
    fn deterministic_given_seed() {
        let (g, s) = setup();
        let p = ClusterParams::default();
        let a = generate_profile(&mut ChaCha8Rng::seed_from_u64(9), &g, &s, &p).unwrap();
        let b = generate_profile(&mut ChaCha8Rng::seed_from_u64(9), &g, &s, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_params_rejected() {
        let (g, s) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = ClusterParams { n_clusters: 0, ..Default::default() };
        assert!(generate_profile(&mut rng, &g, &s, &p).is_err());
        let p = ClusterParams { los_prob: 1.5, ..Default::default() };
        assert!(generate_profile(&mut rng, &g, &s, &p).is_err());
        assert!(ClusterParams::for_cp_length(9).validate_for_cp(9).is_ok());
        assert!(ClusterParams { max_delay: 9, ..Default::default() }.validate_for_cp(9).is_err());
    }

    fn one_ray(delay: usize, gain: C64) -> UeChannelProfile {
        UeChannelProfile {
            rays: vec![Ray { gain, delay_samples: delay, phi: 1.0, theta: 2.0, cluster: 0 }],
            is_los: false,
        }
    }

    #[test]
    fn flat_channel_without_delay() {
        let (g, _) = setup();
        let p = one_ray(0, C64::new(0.3, -0.4));
        let h1 = freq_channel(&p, &g, 1, 16);
        for l in 2..=16 {
            assert_eq!(freq_channel(&p, &g, l, 16), h1);
        }
    }

    #[test]
    fn delayed_ray_is_phase_ramp() {
        let (g, _) = setup();
        let p = one_ray(3, C64::new(1.0, 0.0));
        let h1 = freq_channel(&p, &g, 1, 16);
        let h5 = freq_channel(&p, &g, 5, 16);
        let rot = C64::from_polar(1.0, -2.0 * PI * 3.0 * 4.0 / 16.0);
        for m in 0..g.num_antennas() {
            assert!((h5[m] - h1[m] * rot).norm() < 1e-14);
        }
    }

    #[test]
    fn subspace_column_weights() {
        let (g, _) = setup();
        let mut p = one_ray(0, C64::new(1.0, 0.0));
        p.rays.push(Ray { gain: C64::new(0.0, 4.0), delay_samples: 1, phi: 0.5, theta: 1.7, cluster: 0 });
        let v = true_subspace(&p, &g);
        assert!((v.basis.column(0).norm() - 1.0).abs() < 1e-14);
        assert!((v.basis.column(1).norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn scm_of_identity_basis() {
        let r = true_scm(&TrueSubspace { basis: ComplexMatrix::identity(5) });
        assert_eq!(r.matrix, ComplexMatrix::identity(5));
    }
}
