use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use unified_hb::channel::{array_response, ArrayGeometry, Sector};
use unified_hb::harness::narrow_sector;
use unified_hb::harness::selftest::{gaussian_matrix, random_psd};
use unified_hb::hybrid_bf::{
    aggregate_scm, sum_rate_zf, sum_rate_zf_thp, sufficient_rf_chains, trace_objective, unified_ab_ideal,
    unified_ab_phase_only, water_fill, zf_full, zf_hybrid, AbMode, AnalogBeamformer,
};
use unified_hb::numerics::{hermitian_eig, qr_decompose, ComplexMatrix, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn orthonormal(a: &ComplexMatrix) -> ComplexMatrix {
    // rows of Q from the QR of Aᵀ are orthonormal, so Qᵀ has orthonormal columns
    qr_decompose(&a.transpose()).unwrap().q.transpose()
}

#[test]
fn aggregation_examples() {
    let a = array_response(&ArrayGeometry::half_wavelength(2, 2).unwrap(), 1.0, 2.0).outer_h();
    assert_eq!(aggregate_scm([&a]).unwrap(), a);
    assert!(aggregate_scm([&a, &a]).unwrap().max_abs_diff(&a.scale_real(2.0)) < 1e-15);
    let mut r = rng(1);
    let scms: Vec<ComplexMatrix> = (0..5).map(|_| random_psd(&mut r, 6, 2)).collect();
    let sum = aggregate_scm(scms.iter()).unwrap();
    let traces: f64 = scms.iter().map(|s| s.trace().re).sum();
    assert!((sum.trace().re - traces).abs() < 1e-9);
}

#[test]
fn ideal_ab_examples() {
    let ab = unified_ab_ideal(&ComplexMatrix::identity(5), 3).unwrap();
    assert!((trace_objective(&ab, &ComplexMatrix::identity(5)).unwrap() - 3.0).abs() < 1e-12);
    let r = ComplexMatrix::from_real_diag(&[4.0, 2.0, 1.0, 0.0]);
    let ab = unified_ab_ideal(&r, 2).unwrap();
    assert!((trace_objective(&ab, &r).unwrap() - 6.0).abs() < 1e-12);
    for row in 2..4 {
        for c in 0..2 {
            assert!(ab.matrix[(row, c)].norm() < 1e-12);
        }
    }
}

#[test]
fn ideal_ab_beats_random_competitors() {
    let r = random_psd(&mut rng(7), 16, 10);
    let best = trace_objective(&unified_ab_ideal(&r, 8).unwrap(), &r).unwrap();
    let mut g = rng(8);
    for _ in 0..200 {
        let w = AnalogBeamformer { matrix: orthonormal(&gaussian_matrix(&mut g, 16, 8)), mode: AbMode::Ideal };
        assert!(trace_objective(&w, &r).unwrap() <= best + 1e-9);
    }
}

#[test]
fn phase_only_examples() {
    let g = ArrayGeometry::half_wavelength(4, 2).unwrap();
    let a = array_response(&g, 1.1, 2.0);
    let r = a.outer_h();
    let ideal = unified_ab_ideal(&r, 1).unwrap();
    let po = unified_ab_phase_only(&r, 1).unwrap();
    let ratio = trace_objective(&po, &r).unwrap() / trace_objective(&ideal, &r).unwrap();
    assert!((ratio - 1.0).abs() < 1e-9);
    // the column is a up to a common phase
    let c = po.matrix.column(0).dot_h(&a);
    assert!((c.norm() - 1.0).abs() < 1e-9);

    let zero_row = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
    let po = unified_ab_phase_only(&zero_row, 1).unwrap();
    assert!((po.matrix[(1, 0)] - C64::new(1.0 / 2f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn zf_examples() {
    let m = 4;
    let mut h = ComplexMatrix::zeros(m, 1);
    h[(0, 0)] = C64::new((m as f64).sqrt(), 0.0);
    let (w, beta) = zf_full(&h, 1).unwrap();
    assert!((w.frobenius_norm() - 1.0).abs() < 1e-12);
    assert!((beta - (m as f64).sqrt()).abs() < 1e-12);

    // orthogonal equal-norm columns: β² = ‖h‖²/(L_used·K)
    let (l_used, k) = (5, 2);
    let mut h = ComplexMatrix::zeros(4, k);
    h[(0, 0)] = C64::new(3.0, 0.0);
    h[(2, 1)] = C64::new(0.0, 3.0);
    let (_, beta) = zf_full(&h, l_used).unwrap();
    assert!((beta * beta - 9.0 / (l_used * k) as f64).abs() < 1e-12);

    let p = zf_hybrid(&h, &AnalogBeamformer::identity(4), l_used).unwrap();
    assert!((p.beta - beta).abs() < 1e-12);
}

#[test]
fn hybrid_matches_full_when_ab_contains_channels() {
    let (m, k, r) = (16, 3, 6);
    for seed in 0..20 {
        let mut g = rng(100 + seed);
        // channels confined to a random r-dimensional subspace
        let basis = orthonormal(&gaussian_matrix(&mut g, m, r));
        let h = basis.matmul(&gaussian_matrix(&mut g, r, k));
        let joint = h.conj().matmul(&h.transpose());
        let ab = unified_ab_ideal(&joint, r).unwrap();
        let (_, beta) = zf_full(&h, 10).unwrap();
        let p = zf_hybrid(&h, &ab, 10).unwrap();
        assert!((p.beta - beta).abs() <= 1e-6 * beta, "seed {seed}: {} vs {}", p.beta, beta);
        let power = ab.matrix.matmul(&p.matrix).frobenius_norm_sqr();
        assert!((power - 0.1).abs() < 1e-9);
    }
}

#[test]
fn rate_formula_examples() {
    assert_eq!(sum_rate_zf(0.0, 3, 0.1), 0.0);
    let (k, s2) = (4, 0.25);
    assert!((sum_rate_zf((k as f64 * s2).sqrt(), k, s2) - k as f64).abs() < 1e-12);

    let h = gaussian_matrix(&mut rng(5), 1, 6);
    let (budget, s2) = (0.3, 0.02);
    let expect = (1.0 + budget * h.frobenius_norm_sqr() / s2).log2();
    assert!((sum_rate_zf_thp(&h, s2, budget).unwrap() - expect).abs() < 1e-12);

    let mut h = ComplexMatrix::zeros(2, 3);
    h[(0, 0)] = C64::new(2.0, 0.0);
    h[(1, 2)] = C64::new(0.0, 2.0);
    let expect = 2.0 * (1.0 + (budget / 2.0) * 4.0 / s2).log2();
    assert!((sum_rate_zf_thp(&h, s2, budget).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn thp_dominates_zf_at_high_snr() {
    let (m, k) = (16, 4);
    let wins = (0..100)
        .filter(|&seed| {
            let h = gaussian_matrix(&mut rng(9000 + seed), m, k);
            let (_, beta) = zf_full(&h, 1).unwrap();
            sum_rate_zf_thp(&h.transpose(), 1e-6, 1.0 / k as f64).unwrap() > sum_rate_zf(beta, k, 1e-6)
        })
        .count();
    assert!(wins >= 95, "{wins}/100");
}

#[test]
fn sufficiency_values() {
    let g16 = ArrayGeometry::half_wavelength(16, 16).unwrap();
    let s = sufficient_rf_chains(&g16, &narrow_sector());
    assert_eq!((s.kappa_h, s.kappa_v, s.kappa), (14, 5, 70));
    let broad = Sector::new(PI / 6.0, 5.0 * PI / 6.0, PI / 3.0, 3.0 * PI / 4.0).unwrap();
    let s = sufficient_rf_chains(&g16, &broad);
    assert_eq!((s.kappa_h, s.kappa_v, s.kappa), (14, 10, 140));
    // horizontal ULA: the formula itself gives ⌈128·1.706⌉
    let ula = ArrayGeometry::half_wavelength(256, 1).unwrap();
    let s = sufficient_rf_chains(&ula, &narrow_sector());
    assert_eq!((s.kappa_h, s.kappa_v), (219, 1));
    let col = ArrayGeometry::half_wavelength(1, 8).unwrap();
    assert_eq!(sufficient_rf_chains(&col, &narrow_sector()).kappa_h, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_only_distance_identity(seed in any::<u64>(), m in 2usize..12, frac in 0.1..1.0f64) {
        let r_chains = ((m as f64 * frac).ceil() as usize).clamp(1, m);
        let r = random_psd(&mut rng(seed), m, m);
        let p = unified_ab_ideal(&r, r_chains).unwrap().matrix;
        let w = unified_ab_phase_only(&r, r_chains).unwrap().matrix;
        let lhs = w.sub(&p).frobenius_norm_sqr();
        let rhs = 2.0 * r_chains as f64 - 2.0 * w.matmul(&p.adjoint()).trace().re;
        prop_assert!((lhs - rhs).abs() < 1e-9);
        let inv = 1.0 / (m as f64).sqrt();
        prop_assert!(w.as_slice().iter().all(|z| (z.norm() - inv).abs() <= 1e-12));
    }

    #[test]
    fn objective_eigen_expansion(seed in any::<u64>(), m in 2usize..10, r_chains in 1usize..5) {
        let r_chains = r_chains.min(m);
        let mut g = rng(seed);
        let r = random_psd(&mut g, m, m);
        let w = AnalogBeamformer { matrix: gaussian_matrix(&mut g, m, r_chains), mode: AbMode::Ideal };
        let e = hermitian_eig(&r).unwrap();
        let expansion: f64 = (0..m)
            .map(|i| w.matrix.adjoint().mul_vec(&e.vectors.column(i)).norm_sqr() * e.values[i])
            .sum();
        let obj = trace_objective(&w, &r).unwrap();
        prop_assert!((obj - expansion).abs() <= 1e-8 * obj.abs().max(1.0));
        let top: f64 = e.values[..r_chains].iter().sum();
        let ideal = trace_objective(&unified_ab_ideal(&r, r_chains).unwrap(), &r).unwrap();
        let po = unified_ab_phase_only(&r, r_chains).unwrap();
        let phase = trace_objective(&po, &r).unwrap();
        prop_assert!((ideal - top).abs() <= 1e-8 * top);
        // phase-only columns are not orthogonal, so the bound carries ‖W‖₂²
        let gram_top = hermitian_eig(&po.matrix.adjoint().matmul(&po.matrix)).unwrap().values[0];
        prop_assert!(phase <= gram_top * ideal * (1.0 + 1e-9));
    }

    #[test]
    fn beta_hybrid_never_exceeds_full(seed in any::<u64>(), k in 1usize..5, extra in 0usize..6) {
        let m = 12;
        let r_chains = (k + extra).min(m);
        let mut g = rng(seed);
        let h = gaussian_matrix(&mut g, m, k);
        let agg = random_psd(&mut g, m, 6);
        let (w, beta) = zf_full(&h, 7).unwrap();
        prop_assert!(h.transpose().matmul(&w).sub(&ComplexMatrix::identity(k).scale_real(beta)).frobenius_norm() < 1e-7 * beta);
        prop_assert!((w.frobenius_norm_sqr() - 1.0 / 7.0).abs() < 1e-9);
        for ab in [unified_ab_ideal(&agg, r_chains).unwrap(), unified_ab_phase_only(&agg, r_chains).unwrap()] {
            if let Ok(p) = zf_hybrid(&h, &ab, 7) {
                prop_assert!(p.beta <= beta + 1e-9);
                let eff = h.transpose().matmul(&ab.matrix).matmul(&p.matrix);
                prop_assert!(eff.sub(&ComplexMatrix::identity(k).scale_real(p.beta)).frobenius_norm() < 1e-7 * p.beta);
            }
        }
    }

    #[test]
    fn water_filling_kkt(gains in prop::collection::vec(1e-3..1e3f64, 1..10), budget in 1e-4..10.0f64) {
        let wf = water_fill(&gains, budget);
        prop_assert!(wf.levels.iter().all(|&p| p >= 0.0));
        prop_assert!((wf.levels.iter().sum::<f64>() - budget).abs() <= 1e-9 * budget.max(1.0));
        for (a, p) in gains.iter().zip(&wf.levels) {
            if *p > 0.0 {
                prop_assert!((1.0 / a + p - wf.water_level).abs() <= 1e-9 * wf.water_level);
            } else {
                prop_assert!(1.0 / a >= wf.water_level - 1e-12);
            }
        }
    }

    #[test]
    fn zf_rate_increases_with_beta(b in 0.0..10.0f64, db in 1e-3..1.0f64, k in 1usize..8, s2 in 1e-4..1.0f64) {
        prop_assert!(sum_rate_zf(b + db, k, s2) > sum_rate_zf(b, k, s2));
    }
}
