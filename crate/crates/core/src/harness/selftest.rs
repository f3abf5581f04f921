//! Seeded invariant checks shared by the `selftest` command and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::config::{Method, ScenarioConfig};
use super::report::write_csv_to;
use super::run::run_scenario;
use crate::hybrid_bf::{
    project_phase_only, sum_rate_zf, sum_rate_zf_thp, unified_ab_ideal, unified_ab_phase_only, water_fill, zf_full,
    zf_hybrid,
};
use crate::numerics::{ComplexMatrix, C64};
use crate::subspace::{angular_spectrum, grid_vector, CsiErrorModel, DimScm, Dimension};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// I.i.d. `CN(0,1)` entries.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `XᴴX` for a Gaussian `rank × n` matrix `X`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let x = gaussian_matrix(rng, rank, n);
    let a = x.adjoint().matmul(&x);
    // exact Hermitian symmetry
    ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// `β_hybrid ≤ β_full` for random channels and phase-only or ideal beamformers.
pub fn check_beta_monotone(trials: u64) -> CheckOutcome {
    let (m, k, r) = (16, 3, 6);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = gaussian_matrix(&mut rng, m, k);
        let agg = random_psd(&mut rng, m, 8);
        let (_, b_full) = zf_full(&h, 4).expect("gaussian channel is full rank");
        for ab in [unified_ab_ideal(&agg, r).unwrap(), unified_ab_phase_only(&agg, r).unwrap()] {
            if let Ok(p) = zf_hybrid(&h, &ab, 4) {
                worst = worst.max(p.beta - b_full);
            }
        }
    }
    CheckOutcome::new("beta_hybrid_le_beta_full", worst <= 1e-9, format!("max(beta_p - beta) = {worst:.3e}"))
}

/// `‖Hᵀ·W − β·I‖_F < 1e-7·β` for full and hybrid ZF.
pub fn check_zero_interference(trials: u64) -> CheckOutcome {
    let (m, k, r) = (16, 4, 8);
    let mut worst: f64 = 0.0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let h = gaussian_matrix(&mut rng, m, k);
        let (w, beta) = zf_full(&h, 10).unwrap();
        let res = h.transpose().matmul(&w).sub(&ComplexMatrix::identity(k).scale_real(beta));
        worst = worst.max(res.frobenius_norm() / beta);
        let ab = project_phase_only(&gaussian_matrix(&mut rng, m, r));
        let p = zf_hybrid(&h, &ab, 10).unwrap();
        let res = h.transpose().matmul(&ab.matrix).matmul(&p.matrix).sub(&ComplexMatrix::identity(k).scale_real(p.beta));
        worst = worst.max(res.frobenius_norm() / p.beta);
    }
    CheckOutcome::new("zero_interference", worst < 1e-7, format!("max relative residual {worst:.3e}"))
}

/// Every phase-only entry has modulus exactly `1/√M`.
pub fn check_ab_modulus(trials: u64) -> CheckOutcome {
    let m = 24;
    let target = 1.0 / (m as f64).sqrt();
    let mut worst: f64 = 0.0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let ab = unified_ab_phase_only(&random_psd(&mut rng, m, 5), 7).unwrap();
        for z in ab.matrix.as_slice() {
            worst = worst.max((z.norm() - target).abs());
        }
    }
    CheckOutcome::new("ab_modulus", worst <= 1e-12, format!("max |w| deviation {worst:.3e}"))
}

/// KKT conditions of the water-filling solution.
pub fn check_water_filling_kkt(trials: u64) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let n = rng.random_range(1..8);
        let gains: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-2.0..3.0))).collect();
        let budget = 10f64.powf(rng.random_range(-3.0..1.0));
        let wf = water_fill(&gains, budget);
        let total: f64 = wf.levels.iter().sum();
        worst = worst.max((total - budget).abs() / budget);
        for (a, p) in gains.iter().zip(&wf.levels) {
            if *p > 0.0 {
                worst = worst.max((1.0 / a + p - wf.water_level).abs() / wf.water_level);
            } else if 1.0 / a < wf.water_level - 1e-12 {
                violations += 1;
            }
        }
    }
    CheckOutcome::new(
        "water_filling_kkt",
        worst <= 1e-9 && violations == 0,
        format!("max relative KKT gap {worst:.3e}, inactive violations {violations}"),
    )
}

/// ZF-THP beats linear ZF at `σ² = 1e-4` in at least 95% of trials.
pub fn check_thp_dominates(trials: u64) -> CheckOutcome {
    let (m, k, l_used) = (16, 4, 1);
    let noise = 1e-4;
    let mut wins = 0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let h = gaussian_matrix(&mut rng, m, k);
        let (_, beta) = zf_full(&h, l_used).unwrap();
        let zf = sum_rate_zf(beta, k, noise);
        let thp = sum_rate_zf_thp(&h.transpose(), noise, 1.0 / (k * l_used) as f64).unwrap();
        if thp >= zf {
            wins += 1;
        }
    }
    let need = (trials * 95).div_ceil(100);
    CheckOutcome::new("thp_ge_zf", wins >= need, format!("{wins}/{trials} trials"))
}

/// `E_ε[ĥĥᴴ] = ζ²hhᴴ + (1−ζ²)I` within 3% relative Frobenius error.
pub fn check_error_moment(draws: usize) -> CheckOutcome {
    let zeta = 0.6;
    let err = CsiErrorModel::new(zeta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let h: Vec<C64> = (0..6).map(|_| gaussian(&mut rng)).collect();
    let n = h.len();
    let mut acc = ComplexMatrix::zeros(n, n);
    for _ in 0..draws {
        let e = err.apply(&h, &mut rng);
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += e[i] * e[j].conj();
            }
        }
    }
    let emp = acc.scale_real(1.0 / draws as f64);
    let target = ComplexMatrix::from_fn(n, n, |i, j| {
        h[i] * h[j].conj() * (zeta * zeta) + if i == j { C64::new(1.0 - zeta * zeta, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let rel = emp.sub(&target).frobenius_norm() / target.frobenius_norm();
    CheckOutcome::new("csi_error_moment", rel <= 0.03, format!("relative error {rel:.4} at {draws} draws"))
}

/// `(2/M_d)·Re FFT(ρ)_n = eᴴ[ω_n]·R·e[ω_n]` and matching argmax.
pub fn check_fft_equivalence(trials: u64) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + seed);
        let m_d = [4, 8, 16][(seed % 3) as usize];
        let n_fft = 4 * m_d;
        let scm = DimScm { matrix: random_psd(&mut rng, m_d, 1 + (seed as usize % m_d)), dimension: Dimension::Horizontal };
        let spec = angular_spectrum(&scm, n_fft).unwrap();
        let direct: Vec<f64> = (0..n_fft)
            .map(|n| {
                let e = grid_vector(m_d, 2.0 * std::f64::consts::PI * n as f64 / n_fft as f64);
                e.dot_h(&scm.matrix.mul_vec(&e)).re
            })
            .collect();
        for (a, b) in spec.iter().zip(&direct) {
            worst = worst.max((a - b).abs());
        }
        let am = |v: &[f64]| (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best });
        if am(&spec) != am(&direct) {
            mismatches += 1;
        }
    }
    CheckOutcome::new(
        "fft_search_equivalence",
        worst <= 1e-9 && mismatches == 0,
        format!("max pointwise gap {worst:.3e}, argmax mismatches {mismatches}"),
    )
}

/// Two runs of the same small scenario produce identical CSV bytes.
pub fn check_determinism() -> CheckOutcome {
    let mut cfg = ScenarioConfig::desk();
    cfg.seeds = vec![3, 11];
    cfg.snr_grid_db = vec![0.0, 20.0];
    cfg.methods = vec![Method::FcZf, Method::FcZfThp, Method::PhbPhaseOnly, Method::ScPhb];
    cfg.csi_error = 0.5;
    let csv = || -> Result<Vec<u8>, String> {
        let rec = run_scenario(&cfg).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        write_csv_to(&rec, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    match (csv(), csv()) {
        (Ok(a), Ok(b)) => CheckOutcome::new("determinism", a == b && !a.is_empty(), format!("{} bytes", a.len())),
        (Err(e), _) | (_, Err(e)) => CheckOutcome::new("determinism", false, e),
    }
}

pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_beta_monotone(100),
        check_zero_interference(50),
        check_ab_modulus(50),
        check_water_filling_kkt(200),
        check_thp_dominates(100),
        check_error_moment(10_000),
        check_fft_equivalence(60),
        check_determinism(),
    ]
}
