use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Duplex, Method, ScenarioConfig};
use super::HarnessError;
use crate::channel::{generate_profile, true_scm, true_subspace, ArrayGeometry, FrequencyResponse, UeChannelProfile};
use crate::hybrid_bf::{
    aggregate_scm_weighted, sufficient_rf_chains, sum_rate_zf, sum_rate_zf_thp, unified_ab_ideal,
    unified_ab_phase_only, zf_full, zf_hybrid, AnalogBeamformer, HybridError,
};
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::subspace::{
    estimate_fdd_scm, scm_from_raw_feedback, FddConfig, PartialConnection, PartialSamples,
};

/// Contiguous block of used subcarriers owned by one group (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubBand {
    pub group: usize,
    pub first: usize,
    pub len: usize,
}

impl SubBand {
    pub fn subcarriers(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.len
    }
}

/// Splits the used band, centred in the FFT, into `n_groups` equal sub-bands.
pub fn schedule_groups(cfg: &ScenarioConfig) -> Result<Vec<SubBand>, HarnessError> {
    if cfg.n_groups == 0 || !cfg.l_used.is_multiple_of(cfg.n_groups) || cfg.l_used > cfg.fft_size {
        return Err(HarnessError::BadConfig(format!(
            "cannot split {} used subcarriers into {} groups",
            cfg.l_used, cfg.n_groups
        )));
    }
    let len = cfg.l_used / cfg.n_groups;
    let start = (cfg.fft_size - cfg.l_used) / 2 + 1;
    Ok((0..cfg.n_groups).map(|g| SubBand { group: g, first: start + g * len, len }).collect())
}

/// One channel realization: a ray profile per UE, indexed `group·K + k`.
#[derive(Debug, Clone)]
pub struct Realization {
    pub seed: u64,
    pub profiles: Vec<UeChannelProfile>,
    pub responses: Vec<FrequencyResponse>,
    pub bands: Vec<SubBand>,
}

impl Realization {
    pub fn generate(cfg: &ScenarioConfig, seed: u64) -> Result<Self, HarnessError> {
        let bands = schedule_groups(cfg)?;
        let params = cfg.cluster_params();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profiles = (0..cfg.num_ues())
            .map(|_| generate_profile(&mut rng, &cfg.geom, &cfg.sector, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let responses = profiles.iter().map(|p| FrequencyResponse::new(p, &cfg.geom)).collect();
        Ok(Self { seed, profiles, responses, bands })
    }

    pub fn ue_index(&self, cfg: &ScenarioConfig, group: usize, k: usize) -> usize {
        group * cfg.ues_per_group + k
    }

    /// `M × K` channel of one group at 1-based subcarrier `l`.
    pub fn group_channel(&self, cfg: &ScenarioConfig, group: usize, l: usize) -> ComplexMatrix {
        let cols: Vec<ComplexVector> = (0..cfg.ues_per_group)
            .map(|k| self.responses[self.ue_index(cfg, group, k)].at(l, cfg.fft_size))
            .collect();
        ComplexMatrix::from_columns(&cols)
    }

    pub fn true_scms(&self, geom: &ArrayGeometry) -> Vec<ComplexMatrix> {
        self.profiles.iter().map(|p| true_scm(&true_subspace(p, geom)).matrix).collect()
    }

    /// Per-UE estimates from partial CSI sampled within each UE's own sub-band.
    ///
    /// CSI noise for UE `u` comes from stream `u + 1` of the seed, so it never
    /// perturbs the channel draws.
    pub fn estimated_scms(&self, cfg: &ScenarioConfig) -> Result<Vec<ComplexMatrix>, HarnessError> {
        let conn = PartialConnection::for_rf_chains(&cfg.geom, cfg.r_chains)?;
        let suff = sufficient_rf_chains(&cfg.geom, &cfg.sector);
        let kappa = (suff.kappa_h, suff.kappa_v);
        let err = cfg.csi_model();
        let stride = cfg.sc_stride();
        let mut out = Vec::with_capacity(self.profiles.len());
        for (u, profile) in self.profiles.iter().enumerate() {
            let band = self.bands[u / cfg.ues_per_group];
            let subcarriers: Vec<usize> = band.subcarriers().step_by(stride).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(u as u64 + 1);
            let est = match cfg.duplex {
                Duplex::Tdd => {
                    let samples =
                        PartialSamples::collect(&self.responses[u], &conn, &subcarriers, cfg.fft_size, &err, &mut rng);
                    scm_from_raw_feedback(&samples, &cfg.geom, &cfg.sc_params, kappa)?
                }
                Duplex::Fdd { eta, rescale } => {
                    let geom_ul = cfg.geom.at_frequency_ratio(eta);
                    let ul = FrequencyResponse::new(profile, &geom_ul);
                    let samples = PartialSamples::collect(&ul, &conn, &subcarriers, cfg.fft_size, &err, &mut rng);
                    let fdd = FddConfig::from_eta(eta)?;
                    estimate_fdd_scm(&samples, &cfg.geom, &cfg.sc_params, kappa, &fdd, rescale)?
                }
            };
            out.push(est.matrix);
        }
        Ok(out)
    }
}

/// Sum of per-UE covariances, each weighted by its group's sub-band size.
pub fn aggregate_for_groups(
    cfg: &ScenarioConfig,
    bands: &[SubBand],
    scms: &[ComplexMatrix],
    groups: &[usize],
) -> Result<ComplexMatrix, HarnessError> {
    let items: Vec<(&ComplexMatrix, f64)> = groups
        .iter()
        .flat_map(|&g| (0..cfg.ues_per_group).map(move |k| (g, k)))
        .map(|(g, k)| (&scms[g * cfg.ues_per_group + k], bands[g].len as f64))
        .collect();
    Ok(aggregate_scm_weighted(items)?)
}

/// How the downlink precoder of a method is formed.
#[derive(Debug, Clone)]
pub enum Precoding {
    FullZf,
    FullThp,
    Hybrid(AnalogBeamformer),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub seed: u64,
    pub method: Method,
    pub group: usize,
    pub subcarrier: usize,
    pub message: String,
}

/// Mean per-subcarrier sum rate of every group, for every SNR: `[group][snr]`.
pub fn evaluate_groups(
    cfg: &ScenarioConfig,
    real: &Realization,
    precoding: &Precoding,
    method: Method,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Vec<f64>>, HarnessError> {
    let k = cfg.ues_per_group;
    let pg = cfg.precoder_granularity;
    let per_sc_power = 1.0 / cfg.l_used as f64;
    let noise: Vec<f64> = cfg.snr_grid_db.iter().map(|db| per_sc_power / 10f64.powf(db / 10.0)).collect();
    let mut out = Vec::with_capacity(real.bands.len());
    for band in &real.bands {
        let mut acc = vec![0.0; noise.len()];
        for block in (0..band.len).step_by(pg) {
            let l = band.first + block + pg / 2;
            let h = real.group_channel(cfg, band.group, l);
            let mut note = |e: &dyn std::fmt::Display| {
                diagnostics.push(Diagnostic {
                    seed: real.seed,
                    method,
                    group: band.group,
                    subcarrier: l,
                    message: e.to_string(),
                })
            };
            match precoding {
                Precoding::FullZf | Precoding::Hybrid(_) => {
                    let beta = match precoding {
                        Precoding::Hybrid(ab) => zf_hybrid(&h, ab, cfg.l_used).map(|p| p.beta),
                        _ => zf_full(&h, cfg.l_used).map(|(_, b)| b),
                    };
                    match beta {
                        Ok(beta) => {
                            for (a, &s2) in acc.iter_mut().zip(&noise) {
                                *a += sum_rate_zf(beta, k, s2) * pg as f64;
                            }
                        }
                        Err(HybridError::Numerics(e)) => note(&e),
                        Err(e) => return Err(e.into()),
                    }
                }
                Precoding::FullThp => {
                    // same radiated power as ZF with E[ssᴴ] = I/K
                    let budget = per_sc_power / k as f64;
                    let ht = h.transpose();
                    for (a, &s2) in acc.iter_mut().zip(&noise) {
                        match sum_rate_zf_thp(&ht, s2, budget) {
                            Ok(r) => *a += r * pg as f64,
                            Err(HybridError::Numerics(e)) => {
                                note(&e);
                                break;
                            }
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
            }
        }
        out.push(acc.into_iter().map(|a| a / band.len as f64).collect());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEntry {
    /// Mean over all used subcarriers, bits/s/Hz.
    pub sum_rate: f64,
    /// Mean over each group's own sub-band.
    pub group_rates: Vec<f64>,
}

type SeedRates = Vec<(Method, usize, RateEntry)>;

fn analog_for(
    cfg: &ScenarioConfig,
    real: &Realization,
    method: Method,
    truth: &[ComplexMatrix],
    est: Option<&[ComplexMatrix]>,
) -> Result<Option<AnalogBeamformer>, HarnessError> {
    let all: Vec<usize> = (0..cfg.n_groups).collect();
    let r = cfg.r_chains;
    let ab = match method {
        Method::FcZf | Method::FcZfThp => return Ok(None),
        Method::PhbIdeal => unified_ab_ideal(&aggregate_for_groups(cfg, &real.bands, truth, &all)?, r)?,
        Method::PhbPhaseOnly => unified_ab_phase_only(&aggregate_for_groups(cfg, &real.bands, truth, &all)?, r)?,
        Method::PhbSingleGroup => unified_ab_phase_only(&aggregate_for_groups(cfg, &real.bands, truth, &[0])?, r)?,
        Method::ScPhb | Method::ScPhbIdeal => {
            let est = est.expect("estimates computed for SC methods");
            let agg = aggregate_for_groups(cfg, &real.bands, est, &all)?;
            if method == Method::ScPhb {
                unified_ab_phase_only(&agg, r)?
            } else {
                unified_ab_ideal(&agg, r)?
            }
        }
    };
    Ok(Some(ab))
}

/// Every configured method on one realization.
pub fn run_seed(cfg: &ScenarioConfig, seed: u64) -> Result<(SeedRates, Vec<Diagnostic>), HarnessError> {
    let real = Realization::generate(cfg, seed)?;
    let truth = real.true_scms(&cfg.geom);
    let est = if cfg.needs_estimates() { Some(real.estimated_scms(cfg)?) } else { None };
    let total = cfg.l_used as f64;
    let mut rates = Vec::new();
    let mut diagnostics = Vec::new();
    for &method in &cfg.methods {
        let precoding = match analog_for(cfg, &real, method, &truth, est.as_deref())? {
            Some(ab) => Precoding::Hybrid(ab),
            None if method == Method::FcZfThp => Precoding::FullThp,
            None => Precoding::FullZf,
        };
        let groups = evaluate_groups(cfg, &real, &precoding, method, &mut diagnostics)?;
        for s in 0..cfg.snr_grid_db.len() {
            let group_rates: Vec<f64> = groups.iter().map(|g| g[s]).collect();
            let sum_rate =
                group_rates.iter().zip(&real.bands).map(|(r, b)| r * b.len as f64).sum::<f64>() / total;
            rates.push((method, s, RateEntry { sum_rate, group_rates }));
        }
    }
    Ok((rates, diagnostics))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub methods: Vec<Method>,
    pub snr_grid_db: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Keyed by `(method, snr index, seed)`.
    pub entries: BTreeMap<(Method, usize, u64), RateEntry>,
    pub diagnostics: Vec<Diagnostic>,
    pub elapsed_secs: f64,
}

impl RunRecord {
    pub fn entry(&self, m: Method, snr_idx: usize, seed: u64) -> Option<&RateEntry> {
        self.entries.get(&(m, snr_idx, seed))
    }

    pub fn rate(&self, m: Method, snr_idx: usize, seed: u64) -> Option<f64> {
        self.entry(m, snr_idx, seed).map(|e| e.sum_rate)
    }

    pub fn mean_rate(&self, m: Method, snr_idx: usize) -> Option<f64> {
        let v: Vec<f64> = self.seeds.iter().filter_map(|&s| self.rate(m, snr_idx, s)).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Mean over seeds of one group's rate.
    pub fn mean_group_rate(&self, m: Method, snr_idx: usize, group: usize) -> Option<f64> {
        let v: Vec<f64> = self
            .seeds
            .iter()
            .filter_map(|&s| self.entry(m, snr_idx, s).and_then(|e| e.group_rates.get(group).copied()))
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn ratio(&self, m: Method, base: Method, snr_idx: usize, seed: u64) -> Option<f64> {
        Some(self.rate(m, snr_idx, seed)? / self.rate(base, snr_idx, seed)?)
    }

    /// Ratio of seed-averaged rates.
    pub fn mean_ratio(&self, m: Method, base: Method, snr_idx: usize) -> Option<f64> {
        Some(self.mean_rate(m, snr_idx)? / self.mean_rate(base, snr_idx)?)
    }

    pub fn snr_index(&self, snr_db: f64) -> Option<usize> {
        self.snr_grid_db.iter().position(|&s| s == snr_db)
    }

    /// Same rates and diagnostics, ignoring timing.
    pub fn same_results(&self, other: &RunRecord) -> bool {
        self.methods == other.methods
            && self.snr_grid_db == other.snr_grid_db
            && self.seeds == other.seeds
            && self.entries == other.entries
            && self.diagnostics == other.diagnostics
    }
}

/// Runs every seed (in parallel on the current rayon pool) and collects the record.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunRecord, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let per_seed = cfg
        .seeds
        .par_iter()
        .map(|&seed| run_seed(cfg, seed).map(|r| (seed, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for (seed, (rates, diags)) in per_seed {
        for (m, s, e) in rates {
            entries.insert((m, s, seed), e);
        }
        diagnostics.extend(diags);
    }
    Ok(RunRecord {
        methods: cfg.methods.clone(),
        snr_grid_db: cfg.snr_grid_db.clone(),
        seeds: cfg.seeds.clone(),
        entries,
        diagnostics,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
