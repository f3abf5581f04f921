use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{Method, ScenarioConfig};
use super::run::RunRecord;
use super::HarnessError;

pub const CSV_HEADER: [&str; 6] = ["method", "snr_db", "seed", "sum_rate_bps_hz", "ratio_vs_fczf", "ratio_vs_fczfthp"];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one row per `(method, snr, seed)` followed by a `seed = "mean"`
/// row per `(method, snr)`; ratios are left empty when the reference
/// method was not run.
pub fn write_csv_to<W: Write>(rec: &RunRecord, out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for &m in &rec.methods {
        for (si, snr) in rec.snr_grid_db.iter().enumerate() {
            for &seed in &rec.seeds {
                let Some(rate) = rec.rate(m, si, seed) else { continue };
                w.write_record([
                    m.tag().to_string(),
                    snr.to_string(),
                    seed.to_string(),
                    rate.to_string(),
                    opt(rec.ratio(m, Method::FcZf, si, seed)),
                    opt(rec.ratio(m, Method::FcZfThp, si, seed)),
                ])?;
            }
            if let Some(mean) = rec.mean_rate(m, si) {
                w.write_record([
                    m.tag().to_string(),
                    snr.to_string(),
                    "mean".to_string(),
                    mean.to_string(),
                    opt(rec.mean_ratio(m, Method::FcZf, si)),
                    opt(rec.mean_ratio(m, Method::FcZfThp, si)),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rec: &RunRecord, path: &Path) -> Result<(), HarnessError> {
    write_csv_to(rec, File::create(path)?)
}

/// SHA-256 of the config's canonical JSON.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn version_string() -> String {
    format!("{} ({})", env!("CARGO_PKG_VERSION"), env!("HBSIM_GIT_DESCRIBE"))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub elapsed_secs: f64,
    pub diagnostics: usize,
    pub config: ScenarioConfig,
}

impl RunManifest {
    pub fn new(cfg: &ScenarioConfig, rec: &RunRecord, threads: usize) -> Self {
        Self {
            version: version_string(),
            config_hash: config_hash(cfg),
            seeds: cfg.seeds.clone(),
            threads,
            elapsed_secs: rec.elapsed_secs,
            diagnostics: rec.diagnostics.len(),
            config: cfg.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Io(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `out.csv` → `out.manifest.json`.
pub fn manifest_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("manifest.json")
}
