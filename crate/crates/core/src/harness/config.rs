use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::channel::{ArrayGeometry, ClusterParams, Sector};
use crate::subspace::{CsiErrorModel, PartialConnection, ScParams};

/// Beamforming schemes the runner can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "FC-ZF")]
    FcZf,
    #[serde(rename = "FC-ZF-THP")]
    FcZfThp,
    #[serde(rename = "PHB-Ideal")]
    PhbIdeal,
    #[serde(rename = "PHB-PhaseOnly")]
    PhbPhaseOnly,
    /// Phase-only analog stage from estimated covariances.
    #[serde(rename = "SC-PHB")]
    ScPhb,
    #[serde(rename = "SC-PHB-Ideal")]
    ScPhbIdeal,
    /// Phase-only analog stage from the first group's covariances alone.
    #[serde(rename = "PHB-SingleGroup")]
    PhbSingleGroup,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::FcZf,
        Method::FcZfThp,
        Method::PhbIdeal,
        Method::PhbPhaseOnly,
        Method::ScPhb,
        Method::ScPhbIdeal,
        Method::PhbSingleGroup,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::FcZf => "FC-ZF",
            Method::FcZfThp => "FC-ZF-THP",
            Method::PhbIdeal => "PHB-Ideal",
            Method::PhbPhaseOnly => "PHB-PhaseOnly",
            Method::ScPhb => "SC-PHB",
            Method::ScPhbIdeal => "SC-PHB-Ideal",
            Method::PhbSingleGroup => "PHB-SingleGroup",
        }
    }

    pub fn uses_estimates(&self) -> bool {
        matches!(self, Method::ScPhb | Method::ScPhbIdeal)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| HarnessError::BadConfig(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Duplex {
    #[default]
    Tdd,
    /// Covariances come from uplink CSI on a carrier `eta = f_ul/f_dl` times the downlink one.
    Fdd { eta: f64, rescale: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(HarnessError::BadConfig(format!("unknown scale {other:?}"))),
        }
    }
}

fn default_zeta() -> f64 {
    1.0
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geom: ArrayGeometry,
    pub sector: Sector,
    pub fft_size: usize,
    pub l_used: usize,
    pub cp_length: usize,
    pub n_groups: usize,
    pub ues_per_group: usize,
    pub r_chains: usize,
    pub snr_grid_db: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub sc_params: ScParams,
    /// CSI accuracy `ζ` applied to the partial CSI used for estimation.
    #[serde(default = "default_zeta")]
    pub csi_error: f64,
    #[serde(default)]
    pub duplex: Duplex,
    /// Subcarriers sharing one digital precoder.
    pub precoder_granularity: usize,
    /// Ray-model statistics; defaults span the cyclic prefix.
    #[serde(default)]
    pub channel: Option<ClusterParams>,
}

/// Sector used by both presets.
pub fn narrow_sector() -> Sector {
    Sector { phi_min: PI / 6.0, phi_max: 5.0 * PI / 6.0, theta_min: 5.0 * PI / 9.0, theta_max: 3.0 * PI / 4.0 }
}

impl ScenarioConfig {
    /// 8×8 array, 96 used subcarriers in 4 groups of 4 UEs, 24 RF chains.
    pub fn desk() -> Self {
        Self {
            geom: ArrayGeometry { m_h: 8, m_v: 8, d_h_over_lambda: 0.5, d_v_over_lambda: 0.5 },
            sector: narrow_sector(),
            fft_size: 128,
            l_used: 96,
            cp_length: 9,
            n_groups: 4,
            ues_per_group: 4,
            r_chains: 24,
            snr_grid_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            seeds: (0..20).collect(),
            methods: vec![Method::FcZf, Method::FcZfThp, Method::PhbIdeal, Method::PhbPhaseOnly, Method::ScPhb],
            sc_params: ScParams::default(),
            csi_error: 1.0,
            duplex: Duplex::Tdd,
            precoder_granularity: 6,
            channel: None,
        }
    }

    /// 16×16 array, 2048-point OFDM with 1200 used subcarriers, 64 RF chains.
    pub fn paper() -> Self {
        Self {
            geom: ArrayGeometry { m_h: 16, m_v: 16, d_h_over_lambda: 0.5, d_v_over_lambda: 0.5 },
            fft_size: 2048,
            l_used: 1200,
            cp_length: 144,
            ues_per_group: 16,
            r_chains: 64,
            precoder_granularity: 12,
            ..Self::desk()
        }
    }

    /// Replaces the size-related fields with a preset's, keeping everything else.
    pub fn with_scale(mut self, scale: Scale) -> Self {
        let p = match scale {
            Scale::Desk => Self::desk(),
            Scale::Paper => Self::paper(),
        };
        self.geom = p.geom;
        self.fft_size = p.fft_size;
        self.l_used = p.l_used;
        self.cp_length = p.cp_length;
        self.n_groups = p.n_groups;
        self.ues_per_group = p.ues_per_group;
        self.r_chains = p.r_chains;
        self.precoder_granularity = p.precoder_granularity;
        if let Some(c) = self.channel.as_mut() {
            c.max_delay = c.max_delay.min(p.cp_length - 1);
        }
        self
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        Ok(cfg)
    }

    pub fn cluster_params(&self) -> ClusterParams {
        self.channel.unwrap_or_else(|| ClusterParams::for_cp_length(self.cp_length))
    }

    pub fn subband_len(&self) -> usize {
        self.l_used / self.n_groups.max(1)
    }

    pub fn num_ues(&self) -> usize {
        self.n_groups * self.ues_per_group
    }

    /// Covariance-averaging stride: the configured one, else about 25 samples per sub-band.
    pub fn sc_stride(&self) -> usize {
        self.sc_params.stride.unwrap_or_else(|| (self.subband_len() / 25).max(1))
    }

    pub fn csi_model(&self) -> CsiErrorModel {
        CsiErrorModel { zeta: self.csi_error }
    }

    pub fn needs_estimates(&self) -> bool {
        self.methods.iter().any(Method::uses_estimates)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::BadConfig(m));
        self.geom.validate().map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        self.sector.validate().map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        if !self.fft_size.is_power_of_two() {
            return bad(format!("fft_size {} is not a power of two", self.fft_size));
        }
        if self.l_used == 0 || self.l_used > self.fft_size {
            return bad(format!("l_used {} must be in 1..={}", self.l_used, self.fft_size));
        }
        if self.cp_length == 0 || self.cp_length > self.fft_size {
            return bad(format!("cp_length {} must be in 1..={}", self.cp_length, self.fft_size));
        }
        if self.n_groups == 0 || !self.l_used.is_multiple_of(self.n_groups) {
            return bad(format!("{} groups do not divide {} used subcarriers", self.n_groups, self.l_used));
        }
        let pg = self.precoder_granularity;
        if pg == 0 || !self.subband_len().is_multiple_of(pg) {
            return bad(format!("precoder granularity {pg} does not divide the sub-band of {}", self.subband_len()));
        }
        let m = self.geom.num_antennas();
        if self.ues_per_group == 0 || self.ues_per_group > self.r_chains {
            return bad(format!("{} UEs per group need 1..={} RF chains", self.ues_per_group, self.r_chains));
        }
        if self.r_chains > m {
            return bad(format!("{} RF chains exceed {} antennas", self.r_chains, m));
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_grid_db must be non-empty and finite".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty".into());
        }
        if self.methods.is_empty() {
            return bad("methods must be non-empty".into());
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return bad("methods contain duplicates".into());
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return bad("seeds contain duplicates".into());
        }
        self.cluster_params()
            .validate_for_cp(self.cp_length)
            .map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        self.sc_params.validate().map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        CsiErrorModel::new(self.csi_error).map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        if let Duplex::Fdd { eta, .. } = self.duplex {
            if !(eta > 0.0 && eta.is_finite()) {
                return bad(format!("fdd eta {eta} must be positive"));
            }
        }
        if self.needs_estimates() {
            PartialConnection::for_rf_chains(&self.geom, self.r_chains)
                .map_err(|e| HarnessError::BadConfig(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ScenarioConfig::desk().validate().unwrap();
        ScenarioConfig::paper().validate().unwrap();
        assert_eq!(ScenarioConfig::desk().sc_stride(), 1);
        assert_eq!(ScenarioConfig::paper().sc_stride(), 12);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let cfg = ScenarioConfig::desk();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn duplex_and_method_spelling() {
        let d: Duplex = serde_json::from_str(r#"{"mode":"fdd","eta":1.25,"rescale":true}"#).unwrap();
        assert_eq!(d, Duplex::Fdd { eta: 1.25, rescale: true });
        let m: Vec<Method> = serde_json::from_str(r#"["FC-ZF","SC-PHB"]"#).unwrap();
        assert_eq!(m, vec![Method::FcZf, Method::ScPhb]);
        assert_eq!("PHB-Ideal".parse::<Method>().unwrap(), Method::PhbIdeal);
    }

    #[test]
    fn invalid_configs() {
        let mut c = ScenarioConfig::desk();
        c.n_groups = 5;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::desk();
        c.precoder_granularity = 5;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::desk();
        c.ues_per_group = 30;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::desk();
        c.methods = vec![Method::FcZf, Method::FcZf];
        assert!(c.validate().is_err());
    }

    #[test]
    fn scale_override_keeps_other_fields() {
        let mut c = ScenarioConfig::desk();
        c.csi_error = 0.3;
        let p = c.with_scale(Scale::Paper);
        assert_eq!(p.geom.m_h, 16);
        assert_eq!(p.csi_error, 0.3);
    }
}
