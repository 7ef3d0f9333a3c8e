//! Closed-form cell throughput for the three traffic models, in bps/Hz.
//!
//! * multicast: `K_s · R_MC(r̄)`, the hexagon's expected terminal count times
//!   the cell-edge rate,
//! * broadcast and uplink: the sum rate over the coverage disk with each of
//!   the `K′` terminals on a `W/K′` subband.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::HEX_AREA_FACTOR;
use crate::model::{self, Deployment, DerivedConstants, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Downlink multicast.
    Mc,
    /// Downlink broadcast.
    Bc,
    /// Uplink multiple access.
    Mac,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Mc, Mode::Bc, Mode::Mac];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Mc => "mc",
            Mode::Bc => "bc",
            Mode::Mac => "mac",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Mode::Mc),
            "bc" => Ok(Mode::Bc),
            "mac" => Ok(Mode::Mac),
            other => Err(format!("unknown mode `{other}` (expected mc, bc or mac)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub value_bps_per_hz: f64,
    pub mode: Mode,
    pub h: f64,
    pub theta: f64,
}

/// `log₂(1 + x)`, accurate for small `x`.
#[inline]
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Rate evaluator with the SNR constants computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub consts: DerivedConstants,
    pub density: f64,
}

impl RateModel {
    pub fn new(params: &SystemParams) -> Result<Self> {
        Ok(RateModel {
            consts: DerivedConstants::from_params(params)?,
            density: params.density_per_m2,
        })
    }

    /// Builds a model from raw constants without the positivity checks that
    /// [`SystemParams`] enforces. Degenerate inputs such as `α = 0` are allowed.
    pub fn from_parts(consts: DerivedConstants, density: f64) -> Self {
        RateModel { consts, density }
    }

    pub fn rate(&self, mode: Mode, h: f64, theta: f64) -> Result<f64> {
        match mode {
            Mode::Mc => self.rate_mc(h, theta),
            Mode::Bc => self.rate_bc(h, theta),
            Mode::Mac => self.rate_mac(h, theta),
        }
    }

    /// Expected terminals in the coverage disk, `ρπH²tan²Θ`.
    pub fn disk_count(&self, h: f64, theta: f64) -> f64 {
        let r = h * theta.tan();
        self.density * PI * r * r
    }

    pub fn rate_mc(&self, h: f64, theta: f64) -> Result<f64> {
        Deployment::new(h, theta)?;
        let tan2 = theta.tan().powi(2);
        let edge_snr = self.consts.alpha * theta.cos().powi(2) / (theta * theta * h * h);
        Ok(HEX_AREA_FACTOR * self.density * h * h * tan2 * log2_1p(edge_snr))
    }

    /// Multicast rate of the terminal on the footprint edge.
    pub fn edge_rate_mc(&self, h: f64, theta: f64) -> Result<f64> {
        Deployment::new(h, theta)?;
        Ok(log2_1p(self.consts.alpha * theta.cos().powi(2) / (theta * theta * h * h)))
    }

    pub fn rate_bc(&self, h: f64, theta: f64) -> Result<f64> {
        Deployment::new(h, theta)?;
        let alpha = self.consts.alpha;
        let sin2 = theta.sin().powi(2);
        let cos2 = theta.cos().powi(2);
        let tan2 = theta.tan().powi(2);
        let base = theta * theta * h * h;
        let x = alpha / base;
        // log₂((Θ²H² + αcos²Θ)/(Θ²H²cos²Θ + αcos²Θ)) = log₂(1 + tan²Θ/(1 + x))
        let ratio_term = log2_1p(tan2 / (1.0 + x));
        Ok(log2_1p(x * cos2) / sin2 - log2_1p(x) / tan2 + x / tan2 * ratio_term)
    }

    /// Uplink sum rate. The altitude is validated but does not enter the value.
    pub fn rate_mac(&self, h: f64, theta: f64) -> Result<f64> {
        Deployment::new(h, theta)?;
        let eta = self.consts.eta;
        let t2 = theta * theta;
        let sin2 = theta.sin().powi(2);
        let cos2 = theta.cos().powi(2);
        let tan2 = theta.tan().powi(2);
        let g = eta * tan2 / t2;
        let inner =
            log2_1p(eta * sin2 / t2) / cos2 - log2_1p(g) + g * log2_1p(t2 * tan2 / (t2 + eta * tan2));
        Ok(inner / tan2)
    }

    /// Per-terminal broadcast rate when the cell actually holds `count` terminals.
    pub fn bc_gt_rate_with_count(&self, r: f64, h: f64, theta: f64, count: usize) -> f64 {
        let snr = self.consts.alpha / (theta * theta * (h * h + r * r));
        log2_1p(snr) / count as f64
    }

    /// Per-terminal uplink rate when `count` terminals share the band.
    pub fn mac_gt_rate_with_count(&self, r: f64, h: f64, theta: f64, count: usize) -> f64 {
        let per_gt = self.consts.eta / (self.density * PI);
        let k = count as f64;
        let snr = k * per_gt / (theta * theta * (h * h + r * r));
        log2_1p(snr) / k
    }
}

fn result(mode: Mode, dep: &Deployment, value: f64) -> RateResult {
    RateResult {
        value_bps_per_hz: value,
        mode,
        h: dep.altitude_m,
        theta: dep.half_beamwidth_rad,
    }
}

pub fn rate_mc(params: &SystemParams, dep: &Deployment) -> Result<RateResult> {
    let v = RateModel::new(params)?.rate_mc(dep.altitude_m, dep.half_beamwidth_rad)?;
    Ok(result(Mode::Mc, dep, v))
}

pub fn rate_bc(params: &SystemParams, dep: &Deployment) -> Result<RateResult> {
    let v = RateModel::new(params)?.rate_bc(dep.altitude_m, dep.half_beamwidth_rad)?;
    Ok(result(Mode::Bc, dep, v))
}

pub fn rate_mac(params: &SystemParams, dep: &Deployment) -> Result<RateResult> {
    let v = RateModel::new(params)?.rate_mac(dep.altitude_m, dep.half_beamwidth_rad)?;
    Ok(result(Mode::Mac, dep, v))
}

pub fn rate(mode: Mode, params: &SystemParams, dep: &Deployment) -> Result<RateResult> {
    match mode {
        Mode::Mc => rate_mc(params, dep),
        Mode::Bc => rate_bc(params, dep),
        Mode::Mac => rate_mac(params, dep),
    }
}

/// Rate of a single terminal at horizontal distance `r` from the cell center.
pub fn per_gt_rate(mode: Mode, r: f64, params: &SystemParams, dep: &Deployment) -> Result<f64> {
    let consts = DerivedConstants::from_params(params)?;
    let k = params.density_per_m2 * PI * dep.coverage_radius().powi(2);
    match mode {
        Mode::Mc => Ok(log2_1p(model::snr_mc(r, dep, &consts)?)),
        Mode::Bc => Ok(log2_1p(model::snr_bc(r, dep, &consts)?) / k),
        Mode::Mac => Ok(log2_1p(model::snr_mac(r, dep, &consts)?) / k),
    }
}

/// A multicast job: one file of `file_size_bits` for each of `total_gts` terminals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McMission {
    pub file_size_bits: f64,
    pub total_gts: f64,
}

impl McMission {
    pub fn new(file_size_bits: f64, total_gts: f64) -> Result<Self> {
        if !(file_size_bits.is_finite() && file_size_bits > 0.0) {
            return Err(Error::config("file_size_bits", "must be > 0"));
        }
        if !(total_gts.is_finite() && total_gts > 0.0) {
            return Err(Error::config("total_gts", "must be > 0"));
        }
        Ok(McMission {
            file_size_bits,
            total_gts,
        })
    }

    /// Mission over `area_m2` at the density in `params`, `K = ρA`.
    pub fn for_area(params: &SystemParams, file_size_bits: f64, area_m2: f64) -> Result<Self> {
        McMission::new(file_size_bits, params.density_per_m2 * area_m2)
    }
}

/// Hover time on one cell: `D̄/(W·R_MC(r̄))`.
pub fn cell_hover_time_mc(params: &SystemParams, dep: &Deployment, file_size_bits: f64) -> Result<f64> {
    let edge = RateModel::new(params)?.edge_rate_mc(dep.altitude_m, dep.half_beamwidth_rad)?;
    if edge.is_nan() || edge <= 0.0 {
        return Err(Error::UnboundedTime { rate: edge });
    }
    Ok(file_size_bits / (params.bandwidth_hz * edge))
}

/// Total hover time `(K·D̄/W) / R̃_MC`.
pub fn mission_time_mc(params: &SystemParams, dep: &Deployment, mission: &McMission) -> Result<f64> {
    let r = rate_mc(params, dep)?.value_bps_per_hz;
    mission_time_from_rate(params.bandwidth_hz, mission, r)
}

pub fn mission_time_from_rate(bandwidth_hz: f64, mission: &McMission, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::UnboundedTime { rate });
    }
    Ok(mission.total_gts * mission.file_size_bits / bandwidth_hz / rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline() -> RateModel {
        RateModel::new(&SystemParams::baseline()).unwrap()
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("MAC".parse::<Mode>().unwrap(), Mode::Mac);
        assert!("foo".parse::<Mode>().is_err());
    }

    #[test]
    fn mission_time_hand_arithmetic() {
        let m = McMission::new(1e6, 1000.0).unwrap();
        assert_relative_eq!(mission_time_from_rate(1e7, &m, 5.0).unwrap(), 20.0, max_relative = 1e-15);
        let m2 = McMission::new(2e6, 1000.0).unwrap();
        assert_relative_eq!(mission_time_from_rate(1e7, &m2, 5.0).unwrap(), 40.0, max_relative = 1e-15);
        assert!(matches!(mission_time_from_rate(1e7, &m, 0.0), Err(Error::UnboundedTime { .. })));
    }

    #[test]
    fn mission_time_equals_cells_times_hover() {
        let p = SystemParams::baseline();
        let d = Deployment::new(300.0, 0.7).unwrap();
        let area = 4e7;
        let m = McMission::for_area(&p, 8e6, area).unwrap();
        let t = mission_time_mc(&p, &d, &m).unwrap();
        let cells = area / (HEX_AREA_FACTOR * d.coverage_radius().powi(2));
        let per_cell = cell_hover_time_mc(&p, &d, 8e6).unwrap();
        assert_relative_eq!(t, cells * per_cell, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_power_gives_zero_rates() {
        let m = RateModel::from_parts(DerivedConstants { alpha: 0.0, eta: 0.0 }, 0.005);
        for &(h, t) in &[(10.0, 0.1), (500.0, 1.2), (1e4, 0.7)] {
            assert_eq!(m.rate_mc(h, t).unwrap(), 0.0);
            assert_eq!(m.rate_bc(h, t).unwrap(), 0.0);
            assert_eq!(m.rate_mac(h, t).unwrap(), 0.0);
        }
        let tiny = RateModel::from_parts(DerivedConstants { alpha: 1e-300, eta: 1e-300 }, 0.005);
        assert!(tiny.rate_bc(100.0, 0.5).unwrap().abs() < 1e-290);
        assert!(tiny.rate_mac(100.0, 0.5).unwrap().abs() < 1e-290);
    }

    #[test]
    fn infeasible_arguments_are_domain_errors() {
        let m = baseline();
        assert!(m.rate_mc(0.0, 0.5).is_err());
        assert!(m.rate_bc(100.0, std::f64::consts::FRAC_PI_2).is_err());
        assert!(m.rate_mac(100.0, 0.0).is_err());
    }

    #[test]
    fn mc_edge_rate_times_hex_count() {
        let p = SystemParams::baseline();
        let d = Deployment::new(250.0, 0.9).unwrap();
        let edge = per_gt_rate(Mode::Mc, d.coverage_radius(), &p, &d).unwrap();
        let ks = HEX_AREA_FACTOR * p.density_per_m2 * d.coverage_radius().powi(2);
        assert_relative_eq!(rate_mc(&p, &d).unwrap().value_bps_per_hz, ks * edge, max_relative = 1e-13);
        assert_relative_eq!(baseline().edge_rate_mc(250.0, 0.9).unwrap(), edge, max_relative = 1e-14);
    }

    #[test]
    fn per_gt_rates_outside_coverage_fail() {
        let p = SystemParams::baseline();
        let d = Deployment::new(100.0, 0.4).unwrap();
        for mode in Mode::ALL {
            assert!(per_gt_rate(mode, d.coverage_radius() * 1.01, &p, &d).is_err());
        }
    }

    #[test]
    fn mc_per_gt_rate_decreases_with_distance() {
        let p = SystemParams::baseline();
        let d = Deployment::new(100.0, 0.4).unwrap();
        let radius = d.coverage_radius();
        let rates: Vec<f64> = (0..=50)
            .map(|i| per_gt_rate(Mode::Mc, radius * i as f64 / 50.0, &p, &d).unwrap())
            .collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn broadcast_per_gt_rates_average_to_cell_rate() {
        // Equal-area rings: midpoint radii of n rings of equal area.
        let p = SystemParams::baseline();
        let d = Deployment::new(200.0, 0.5).unwrap();
        let radius = d.coverage_radius();
        let k = p.density_per_m2 * PI * radius * radius;
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|i| {
                let r = radius * ((i as f64 + 0.5) / n as f64).sqrt();
                per_gt_rate(Mode::Bc, r, &p, &d).unwrap() * k
            })
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, rate_bc(&p, &d).unwrap().value_bps_per_hz, max_relative = 1e-6);
    }

    #[test]
    fn count_based_rates_reduce_to_expected_count() {
        let m = baseline();
        let (h, t) = (300.0, 0.6);
        let k = m.disk_count(h, t);
        let p = SystemParams::baseline();
        let d = Deployment::new(h, t).unwrap();
        let r = 0.3 * d.coverage_radius();
        // with an integer count equal to K′ the per-terminal rates coincide
        let scale = k.round() / k;
        let dens = RateModel::from_parts(
            DerivedConstants {
                alpha: m.consts.alpha,
                eta: m.consts.eta * scale,
            },
            m.density * scale,
        );
        let expect = per_gt_rate(Mode::Mac, r, &p.with_density(p.density_per_m2 * scale), &d).unwrap();
        assert_relative_eq!(
            dens.mac_gt_rate_with_count(r, h, t, k.round() as usize),
            expect,
            max_relative = 1e-12
        );
        let bc = per_gt_rate(Mode::Bc, r, &p, &d).unwrap() * k / k.round();
        assert_relative_eq!(m.bc_gt_rate_with_count(r, h, t, k.round() as usize), bc, max_relative = 1e-12);
    }
}
