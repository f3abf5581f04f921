use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::numerics::{kron_vec, ComplexVector, C64};

/// Uniform planar array; element spacings are in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayGeometry {
    pub m_h: usize,
    pub m_v: usize,
    pub d_h_over_lambda: f64,
    pub d_v_over_lambda: f64,
}

impl ArrayGeometry {
    pub fn new(m_h: usize, m_v: usize, d_h_over_lambda: f64, d_v_over_lambda: f64) -> Result<Self, ChannelError> {
        let g = Self { m_h, m_v, d_h_over_lambda, d_v_over_lambda };
        g.validate()?;
        Ok(g)
    }

    /// Half-wavelength spacing in both dimensions.
    pub fn half_wavelength(m_h: usize, m_v: usize) -> Result<Self, ChannelError> {
        Self::new(m_h, m_v, 0.5, 0.5)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.m_h == 0 || self.m_v == 0 {
            return Err(ChannelError::BadGeometry("antenna counts must be at least 1".into()));
        }
        for d in [self.d_h_over_lambda, self.d_v_over_lambda] {
            if !(d > 0.0 && d <= 0.5) {
                return Err(ChannelError::BadGeometry(format!("spacing {d} outside (0, 0.5] wavelengths")));
            }
        }
        Ok(())
    }

    pub fn num_antennas(&self) -> usize {
        self.m_h * self.m_v
    }

    /// Same physical array seen at a carrier `ratio` times the design one.
    ///
    /// Spacing in wavelengths scales with the carrier, so the result may exceed
    /// half a wavelength and is deliberately not validated.
    pub fn at_frequency_ratio(&self, ratio: f64) -> Self {
        Self {
            d_h_over_lambda: self.d_h_over_lambda * ratio,
            d_v_over_lambda: self.d_v_over_lambda * ratio,
            ..*self
        }
    }

    /// Flat index of element `(i_h, i_v)`; matches `a_h ⊗ a_v`.
    pub fn index(&self, i_h: usize, i_v: usize) -> usize {
        i_h * self.m_v + i_v
    }
}

/// Angular sector covered by the ideal sector antennas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    pub phi_min: f64,
    pub phi_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Sector {
    pub fn new(phi_min: f64, phi_max: f64, theta_min: f64, theta_max: f64) -> Result<Self, ChannelError> {
        let s = Self { phi_min, phi_max, theta_min, theta_max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let in_range = |x: f64| (0.0..=PI).contains(&x);
        if ![self.phi_min, self.phi_max, self.theta_min, self.theta_max].into_iter().all(in_range) {
            return Err(ChannelError::BadSector("angles must lie in [0, pi]".into()));
        }
        if !(self.phi_min < self.phi_max && self.theta_min < self.theta_max) {
            return Err(ChannelError::BadSector("bounds must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn contains(&self, phi: f64, theta: f64) -> bool {
        (self.phi_min..=self.phi_max).contains(&phi) && (self.theta_min..=self.theta_max).contains(&theta)
    }
}

/// Horizontal phase progression `2π·d_h·cosφ·sinθ` per element.
pub fn horizontal_phase(geom: &ArrayGeometry, phi: f64, theta: f64) -> f64 {
    2.0 * PI * geom.d_h_over_lambda * phi.cos() * theta.sin()
}

/// Vertical phase progression `2π·d_v·cosθ` per element.
pub fn vertical_phase(geom: &ArrayGeometry, theta: f64) -> f64 {
    2.0 * PI * geom.d_v_over_lambda * theta.cos()
}

fn ramp(n: usize, step: f64) -> ComplexVector {
    let amp = 1.0 / (n as f64).sqrt();
    (0..n).map(|m| C64::from_polar(amp, step * m as f64)).collect()
}

pub fn steering_h(geom: &ArrayGeometry, phi: f64, theta: f64) -> ComplexVector {
    ramp(geom.m_h, horizontal_phase(geom, phi, theta))
}

pub fn steering_v(geom: &ArrayGeometry, theta: f64) -> ComplexVector {
    ramp(geom.m_v, vertical_phase(geom, theta))
}

/// Full UPA response `a_h(φ,θ) ⊗ a_v(θ)`, unit norm.
pub fn array_response(geom: &ArrayGeometry, phi: f64, theta: f64) -> ComplexVector {
    kron_vec(&steering_h(geom, phi, theta), &steering_v(geom, theta))
}
