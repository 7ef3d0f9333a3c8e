//! Flat TOML configuration.
//!
//! Powers are given in dBm and converted on load. Beamwidth bounds may be
//! written as `theta_*_rad` or `theta_*_deg`; they are stored in radians.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uavbeam::model::{dbm_to_watts, G0_DEFAULT};
use uavbeam::{FeasibleBox, Rect, SystemParams};

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    beta0: Option<f64>,
    bandwidth_hz: Option<f64>,
    p_downlink_dbm: Option<f64>,
    p_uplink_dbm: Option<f64>,
    noise_psd_dbm_hz: Option<f64>,
    density_per_m2: Option<f64>,
    g0: Option<f64>,
    h_min_m: Option<f64>,
    h_max_m: Option<f64>,
    theta_min_rad: Option<f64>,
    theta_max_rad: Option<f64>,
    theta_min_deg: Option<f64>,
    theta_max_deg: Option<f64>,
    area_m2: Option<f64>,
    area_width_m: Option<f64>,
    area_height_m: Option<f64>,
    file_size_bits: Option<f64>,
    period_s: Option<f64>,
    uav_speed_mps: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub beta0: f64,
    pub bandwidth_hz: f64,
    pub p_downlink_dbm: f64,
    pub p_uplink_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub density_per_m2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    pub h_min_m: f64,
    pub h_max_m: f64,
    pub theta_min_rad: f64,
    pub theta_max_rad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_width_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file_size_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uav_speed_mps: Option<f64>,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 1;

fn field_err(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{field}: {}", reason.into()))
}

fn angle(raw_rad: Option<f64>, raw_deg: Option<f64>, name: &str) -> Result<f64, CliError> {
    match (raw_rad, raw_deg) {
        (Some(r), None) => Ok(r),
        (None, Some(d)) => Ok(d.to_radians()),
        (Some(_), Some(_)) => Err(field_err(
            &format!("{name}_rad"),
            format!("give either {name}_rad or {name}_deg, not both"),
        )),
        (None, None) => Err(field_err(&format!("{name}_rad"), "required (no built-in default)")),
    }
}

fn positive_opt(v: Option<f64>, field: &str) -> Result<(), CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(field_err(field, format!("must be > 0, got {x}"))),
        _ => Ok(()),
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text`, then applies `key=value` overrides written as TOML values.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{o}` is not key=value")))?;
            let key = key.trim();
            let snippet = format!("{key} = {}", value.trim());
            let parsed: toml::Table = snippet
                .parse()
                .map_err(|e| CliError::Config(format!("{key}: bad override value: {e}")))?;
            table.extend(parsed);
        }
        let raw: RawConfig = toml::from_str(&toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?)
            .map_err(|e| CliError::Config(e.message().to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_with_overrides(&text, overrides)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let defaults = SystemParams::baseline();
        let cfg = Config {
            beta0: raw.beta0.unwrap_or(defaults.beta0),
            bandwidth_hz: raw.bandwidth_hz.unwrap_or(defaults.bandwidth_hz),
            p_downlink_dbm: raw.p_downlink_dbm.unwrap_or(10.0),
            p_uplink_dbm: raw.p_uplink_dbm.unwrap_or(-10.0),
            noise_psd_dbm_hz: raw.noise_psd_dbm_hz.unwrap_or(-169.0),
            density_per_m2: raw.density_per_m2.unwrap_or(defaults.density_per_m2),
            g0: raw.g0,
            h_min_m: raw.h_min_m.ok_or_else(|| field_err("h_min_m", "required (no built-in default)"))?,
            h_max_m: raw.h_max_m.ok_or_else(|| field_err("h_max_m", "required (no built-in default)"))?,
            theta_min_rad: angle(raw.theta_min_rad, raw.theta_min_deg, "theta_min")?,
            theta_max_rad: angle(raw.theta_max_rad, raw.theta_max_deg, "theta_max")?,
            area_m2: raw.area_m2,
            area_width_m: raw.area_width_m,
            area_height_m: raw.area_height_m,
            file_size_bits: raw.file_size_bits,
            period_s: raw.period_s,
            uav_speed_mps: raw.uav_speed_mps,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.system_params()?;
        self.feasible_box()?;
        for (v, field) in [
            (self.area_m2, "area_m2"),
            (self.area_width_m, "area_width_m"),
            (self.area_height_m, "area_height_m"),
            (self.file_size_bits, "file_size_bits"),
            (self.period_s, "period_s"),
            (self.uav_speed_mps, "uav_speed_mps"),
        ] {
            positive_opt(v, field)?;
        }
        if self.area_width_m.is_some() != self.area_height_m.is_some() {
            return Err(field_err("area_width_m", "area_width_m and area_height_m must be given together"));
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        let mut p = SystemParams {
            beta0: self.beta0,
            bandwidth_hz: self.bandwidth_hz,
            p_downlink_w: dbm_to_watts(self.p_downlink_dbm),
            p_uplink_w: dbm_to_watts(self.p_uplink_dbm),
            noise_psd_w_per_hz: dbm_to_watts(self.noise_psd_dbm_hz),
            density_per_m2: self.density_per_m2,
            g0: G0_DEFAULT,
            g0_overridden: false,
            sidelobe_gain: 0.0,
        };
        if let Some(g0) = self.g0 {
            p = p.with_g0(g0);
        }
        p.validate().map_err(|e| match e {
            uavbeam::Error::Config { field, reason } => field_err(config_field(&field), reason),
            other => CliError::Config(other.to_string()),
        })?;
        Ok(p)
    }

    pub fn feasible_box(&self) -> Result<FeasibleBox, CliError> {
        FeasibleBox::new(self.h_min_m, self.h_max_m, self.theta_min_rad, self.theta_max_rad).map_err(|e| match e {
            uavbeam::Error::Config { field, reason } => field_err(config_field(&field), reason),
            other => CliError::Config(other.to_string()),
        })
    }

    /// Service area in m², from `area_m2` or the rectangle dimensions.
    pub fn area(&self) -> Option<f64> {
        self.area_m2
            .or_else(|| Some(self.area_width_m? * self.area_height_m?))
    }

    pub fn rect(&self) -> Result<Rect, CliError> {
        match (self.area_width_m, self.area_height_m) {
            (Some(w), Some(h)) => Rect::new(w, h).map_err(|e| CliError::Config(e.to_string())),
            _ => Err(field_err("area_width_m", "planning needs area_width_m and area_height_m")),
        }
    }

    pub fn dump(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Maps library field names onto the keys used in the config file.
fn config_field(lib: &str) -> &str {
    match lib {
        "p_downlink_w" => "p_downlink_dbm",
        "p_uplink_w" => "p_uplink_dbm",
        "noise_psd_w_per_hz" => "noise_psd_dbm_hz",
        "h_min" => "h_min_m",
        "h_max" => "h_max_m",
        "theta_min" => "theta_min_rad",
        "theta_max" => "theta_max_rad",
        other => other,
    }
}
