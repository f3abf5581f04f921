use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::channel::{ArrayGeometry, Sector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RfSufficiency {
    pub kappa_h: usize,
    pub kappa_v: usize,
    pub kappa: usize,
}

// absorbs round-off when the product lands exactly on an integer
const CEIL_SLACK: f64 = 1e-9;

fn ceil_at_least_one(x: f64) -> usize {
    ((x - CEIL_SLACK).ceil().max(1.0)) as usize
}

/// Extent of `cosφ·sinθ` over the sector.
///
/// The function is monotone in φ on `[0, π]` and, for fixed φ, extremal in θ
/// at the bounds or at `θ = π/2`, so these candidates cover both extrema.
pub fn horizontal_extent(sector: &Sector) -> f64 {
    let mut thetas = vec![sector.theta_min, sector.theta_max];
    if sector.theta_min < FRAC_PI_2 && FRAC_PI_2 < sector.theta_max {
        thetas.push(FRAC_PI_2);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for phi in [sector.phi_min, sector.phi_max] {
        for &theta in &thetas {
            let f = phi.cos() * theta.sin();
            lo = lo.min(f);
            hi = hi.max(f);
        }
    }
    hi - lo
}

/// Approximate rank of the sector's array-response span per dimension.
pub fn sufficient_rf_chains(geom: &ArrayGeometry, sector: &Sector) -> RfSufficiency {
    let kappa_h = ceil_at_least_one(geom.m_h as f64 * geom.d_h_over_lambda * horizontal_extent(sector));
    let kappa_v = ceil_at_least_one(
        geom.m_v as f64 * geom.d_v_over_lambda * (sector.theta_min.cos() - sector.theta_max.cos()),
    );
    RfSufficiency { kappa_h, kappa_v, kappa: kappa_h * kappa_v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_row_clamps_to_one() {
        let g = ArrayGeometry::half_wavelength(1, 8).unwrap();
        let s = Sector::new(0.0, PI, 0.1, 3.0).unwrap();
        assert_eq!(sufficient_rf_chains(&g, &s).kappa_h, 1);
    }

    #[test]
    fn broadside_interior_maximum() {
        // θ range straddles π/2, so sinθ peaks inside
        let s = Sector::new(0.0, PI / 2.0, 1.0, 2.0).unwrap();
        assert!((horizontal_extent(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn desk_scale_sector() {
        let g = ArrayGeometry::half_wavelength(8, 8).unwrap();
        let s = Sector::new(PI / 6.0, 5.0 * PI / 6.0, 5.0 * PI / 9.0, 3.0 * PI / 4.0).unwrap();
        assert_eq!(sufficient_rf_chains(&g, &s), RfSufficiency { kappa_h: 7, kappa_v: 3, kappa: 21 });
    }
}
