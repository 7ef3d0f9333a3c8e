//! Physical parameters, unit conversion, the rectangular-lobe antenna model,
//! the line-of-sight channel, and the per-terminal SNR of each mode.
//!
//! Everything in here works in SI units: watts, hertz, meters, radians.
//! dBm and degrees only show up in the conversion helpers.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Antenna constant `30000/2² · (π/180)²`, about 2.2846.
pub const G0_DEFAULT: f64 = 30000.0 / 4.0 * (PI / 180.0) * (PI / 180.0);

/// Allowed deviation of `g0` from [`G0_DEFAULT`] unless explicitly overridden.
pub const G0_TOLERANCE: f64 = 1e-4;

/// Relative slack when testing `r <= H·tanΘ`, so that terminals sampled on the
/// footprint edge are not rejected over one ulp of rounding.
pub(crate) const EDGE_SLACK: f64 = 1e-12;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Link-budget inputs shared by every mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Channel power gain at the 1 m reference distance.
    pub beta0: f64,
    pub bandwidth_hz: f64,
    pub p_downlink_w: f64,
    /// Transmit power of each ground terminal.
    pub p_uplink_w: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_psd_w_per_hz: f64,
    /// Ground terminals per m².
    pub density_per_m2: f64,
    pub g0: f64,
    /// Set when `g0` deliberately differs from [`G0_DEFAULT`].
    pub g0_overridden: bool,
    /// Gain outside the main lobe. Kept at 0 by every rate formula.
    pub sidelobe_gain: f64,
}

impl SystemParams {
    /// β₀ = 1.42e-4, W = 10 MHz, P_d = 10 dBm, P_u = −10 dBm,
    /// N₀ = −169 dBm/Hz, ρ = 0.005 per m².
    pub fn baseline() -> Self {
        SystemParams {
            beta0: 1.42e-4,
            bandwidth_hz: 10e6,
            p_downlink_w: dbm_to_watts(10.0),
            p_uplink_w: dbm_to_watts(-10.0),
            noise_psd_w_per_hz: dbm_to_watts(-169.0),
            density_per_m2: 0.005,
            g0: G0_DEFAULT,
            g0_overridden: false,
            sidelobe_gain: 0.0,
        }
    }

    pub fn with_density(mut self, density_per_m2: f64) -> Self {
        self.density_per_m2 = density_per_m2;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self.g0_overridden = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("beta0", self.beta0),
            ("bandwidth_hz", self.bandwidth_hz),
            ("p_downlink_w", self.p_downlink_w),
            ("p_uplink_w", self.p_uplink_w),
            ("noise_psd_w_per_hz", self.noise_psd_w_per_hz),
            ("density_per_m2", self.density_per_m2),
            ("g0", self.g0),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if !self.g0_overridden && (self.g0 - G0_DEFAULT).abs() > G0_TOLERANCE {
            return Err(Error::config(
                "g0",
                format!("{} differs from {G0_DEFAULT} without an explicit override", self.g0),
            ));
        }
        if !(self.sidelobe_gain.is_finite() && self.sidelobe_gain >= 0.0) {
            return Err(Error::config("sidelobe_gain", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// SNR constants that appear in every rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `P_d·G₀·β₀/(N₀W)`.
    pub alpha: f64,
    /// `P_u·β₀·G₀·ρ·π/(N₀W)`.
    pub eta: f64,
}

impl DerivedConstants {
    pub fn from_params(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let noise = params.noise_psd_w_per_hz * params.bandwidth_hz;
        Ok(DerivedConstants {
            alpha: params.p_downlink_w * params.g0 * params.beta0 / noise,
            eta: params.p_uplink_w * params.beta0 * params.g0 * params.density_per_m2 * PI / noise,
        })
    }
}

/// One operating point: hover altitude and antenna half-beamwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    pub altitude_m: f64,
    pub half_beamwidth_rad: f64,
}

impl Deployment {
    pub fn new(altitude_m: f64, half_beamwidth_rad: f64) -> Result<Self> {
        let d = Deployment {
            altitude_m,
            half_beamwidth_rad,
        };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.altitude_m.is_finite() && self.altitude_m > 0.0) {
            return Err(Error::Domain {
                name: "altitude",
                value: self.altitude_m,
                expected: "H > 0",
            });
        }
        check_half_beamwidth(self.half_beamwidth_rad)
    }

    /// Radius of the main-lobe footprint, `H·tanΘ`.
    pub fn coverage_radius(&self) -> f64 {
        self.altitude_m * self.half_beamwidth_rad.tan()
    }

    fn check_within_coverage(&self, r: f64) -> Result<()> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                expected: "r >= 0",
            });
        }
        let radius = self.coverage_radius();
        if r > radius * (1.0 + EDGE_SLACK) {
            return Err(Error::OutsideCoverage { r, radius });
        }
        Ok(())
    }
}

pub(crate) fn check_half_beamwidth(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "half_beamwidth",
            value: theta,
            expected: "0 < Θ < π/2",
        })
    }
}

/// Feasible altitude and half-beamwidth ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleBox {
    pub h_min: f64,
    pub h_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl FeasibleBox {
    pub fn new(h_min: f64, h_max: f64, theta_min: f64, theta_max: f64) -> Result<Self> {
        let b = FeasibleBox {
            h_min,
            h_max,
            theta_min,
            theta_max,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_min.is_finite() && self.h_min > 0.0) {
            return Err(Error::config("h_min", format!("must be > 0, got {}", self.h_min)));
        }
        if !(self.h_max.is_finite() && self.h_max >= self.h_min) {
            return Err(Error::config(
                "h_max",
                format!("must be >= h_min = {}, got {}", self.h_min, self.h_max),
            ));
        }
        if !(self.theta_min > 0.0 && self.theta_min < FRAC_PI_2) {
            return Err(Error::config(
                "theta_min",
                format!("must lie in (0, π/2), got {}", self.theta_min),
            ));
        }
        if !(self.theta_max >= self.theta_min && self.theta_max < FRAC_PI_2) {
            return Err(Error::config(
                "theta_max",
                format!("must lie in [theta_min, π/2), got {}", self.theta_max),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, d: &Deployment) -> bool {
        (self.h_min..=self.h_max).contains(&d.altitude_m)
            && (self.theta_min..=self.theta_max).contains(&d.half_beamwidth_rad)
    }
}

/// An operating point together with the box it must stay in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentVars {
    pub point: Deployment,
    pub bounds: FeasibleBox,
}

impl DeploymentVars {
    pub fn new(point: Deployment, bounds: FeasibleBox) -> Result<Self> {
        point.check()?;
        bounds.validate()?;
        if !bounds.contains(&point) {
            return Err(Error::config(
                "deployment",
                format!(
                    "(H = {}, Θ = {}) lies outside the feasible box",
                    point.altitude_m, point.half_beamwidth_rad
                ),
            ));
        }
        Ok(DeploymentVars { point, bounds })
    }
}

/// Rectangular-lobe antenna gain toward azimuth `theta_az` and elevation
/// `psi_el`, with zero side-lobe gain.
pub fn antenna_gain(theta_az: f64, psi_el: f64, half_beamwidth: f64, g0: f64) -> Result<f64> {
    antenna_gain_with_sidelobe(theta_az, psi_el, half_beamwidth, g0, 0.0)
}

pub fn antenna_gain_with_sidelobe(
    theta_az: f64,
    psi_el: f64,
    half_beamwidth: f64,
    g0: f64,
    sidelobe: f64,
) -> Result<f64> {
    check_half_beamwidth(half_beamwidth)?;
    if theta_az.abs() <= half_beamwidth && psi_el.abs() <= half_beamwidth {
        Ok(g0 / (half_beamwidth * half_beamwidth))
    } else {
        Ok(sidelobe)
    }
}

/// Line-of-sight power gain `β₀/(h² + r²)` at horizontal distance `r`.
pub fn channel_gain(r: f64, h: f64, beta0: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain {
            name: "altitude",
            value: h,
            expected: "H > 0",
        });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "r >= 0",
        });
    }
    Ok(beta0 / (h * h + r * r))
}

/// Multicast SNR `α/(Θ²(H² + r²))`.
pub fn snr_mc(r: f64, dep: &Deployment, consts: &DerivedConstants) -> Result<f64> {
    dep.check()?;
    dep.check_within_coverage(r)?;
    let h = dep.altitude_m;
    let t = dep.half_beamwidth_rad;
    Ok(consts.alpha / (t * t * (h * h + r * r)))
}

/// Broadcast SNR. Power and bandwidth are split the same way, so this is the
/// multicast SNR.
pub fn snr_bc(r: f64, dep: &Deployment, consts: &DerivedConstants) -> Result<f64> {
    snr_mc(r, dep, consts)
}

/// Uplink SNR `η·H²·tan²Θ/(Θ²(H² + r²))` with bandwidth share `W/K′`.
pub fn snr_mac(r: f64, dep: &Deployment, consts: &DerivedConstants) -> Result<f64> {
    dep.check()?;
    dep.check_within_coverage(r)?;
    let h = dep.altitude_m;
    let t = dep.half_beamwidth_rad;
    let tan2 = t.tan().powi(2);
    Ok(consts.eta * h * h * tan2 / (t * t * (h * h + r * r)))
}
