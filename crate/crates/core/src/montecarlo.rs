//! Empirical cell throughput averaged over random terminal layouts.
//!
//! Each realization draws terminals in one cell and evaluates what the cell
//! would deliver:
//!
//! * multicast: realized count × cell-edge rate (the hover time is sized for
//!   the edge whether or not a terminal sits there),
//! * broadcast/uplink: sum of per-terminal FDMA rates, with power and
//!   bandwidth split over the realized count.
//!
//! Realization `i` is seeded from `(seed, i)` alone, so results do not
//! depend on thread count or scheduling.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, cell_layout, CountModel, Region};
use crate::model::{Deployment, SystemParams};
use crate::rates::{self, log2_1p, McMission, Mode, RateModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub mode: Mode,
    pub realizations: usize,
    pub seed: u64,
    pub region: Region,
    pub count_model: CountModel,
}

impl SimSpec {
    /// 100 realizations, Poisson counts, and the region the analytic rate of
    /// `mode` integrates over.
    pub fn new(mode: Mode, seed: u64) -> Self {
        SimSpec {
            mode,
            realizations: 100,
            seed,
            region: default_region(mode),
            count_model: CountModel::Poisson,
        }
    }

    pub fn with_realizations(mut self, n: usize) -> Self {
        self.realizations = n;
        self
    }

    pub fn with_count_model(mut self, m: CountModel) -> Self {
        self.count_model = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be >= 1"));
        }
        if self.region != default_region(self.mode) {
            return Err(Error::RegionMismatch {
                mode: self.mode.name(),
                region: self.region.name(),
            });
        }
        Ok(())
    }
}

pub fn default_region(mode: Mode) -> Region {
    match mode {
        Mode::Mc => Region::Hexagon,
        Mode::Bc | Mode::Mac => Region::Disk,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    pub index: usize,
    pub gt_count: usize,
    pub value_bps_per_hz: f64,
    /// Lowest individual terminal rate in the realization (multicast only).
    pub min_gt_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub spec: SimSpec,
    pub empirical_mean: f64,
    /// `None` with fewer than two realizations.
    pub empirical_stderr: Option<f64>,
    pub analytic: f64,
    pub relative_gap: f64,
    pub per_realization: Vec<Realization>,
    /// Multicast only: worst rate of any sampled terminal.
    pub worst_gt_rate: Option<f64>,
    /// Multicast only: cell-edge rate, a lower bound for every terminal.
    pub edge_rate: Option<f64>,
}

/// Seed for realization `index`, a SplitMix64 mix of the base seed and index.
pub fn realization_seed(base: u64, index: usize) -> u64 {
    let mut z = base ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mean_and_stderr(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn simulate_rate(params: &SystemParams, dep: &Deployment, spec: &SimSpec) -> Result<SimResult> {
    spec.validate()?;
    dep.check()?;
    let model = RateModel::new(params)?;
    let layout = cell_layout(params, dep)?;
    let (h, t) = (dep.altitude_m, dep.half_beamwidth_rad);
    let analytic = model.rate(spec.mode, h, t)?;
    let edge = model.edge_rate_mc(h, t)?;
    let mean_count = layout.expected_count(spec.region);

    let per_realization: Vec<Realization> = (0..spec.realizations)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(realization_seed(spec.seed, index));
            let count = geometry::draw_count(mean_count, spec.count_model, &mut rng);
            let distances = (0..count)
                .map(|_| geometry::sample_point(spec.region, layout.circumradius_m, &mut rng).norm());
            let (value, min_gt_rate) = match spec.mode {
                Mode::Mc => {
                    let alpha = model.consts.alpha;
                    let worst = distances
                        .map(|r| log2_1p(alpha / (t * t * (h * h + r * r))))
                        .fold(f64::INFINITY, f64::min);
                    (count as f64 * edge, (count > 0).then_some(worst))
                }
                Mode::Bc => (distances.map(|r| model.bc_gt_rate_with_count(r, h, t, count)).sum(), None),
                Mode::Mac => (distances.map(|r| model.mac_gt_rate_with_count(r, h, t, count)).sum(), None),
            };
            Realization {
                index,
                gt_count: count,
                value_bps_per_hz: value,
                min_gt_rate,
            }
        })
        .collect();

    let values: Vec<f64> = per_realization.iter().map(|r| r.value_bps_per_hz).collect();
    let (empirical_mean, empirical_stderr) = mean_and_stderr(&values);
    let relative_gap = if analytic > 0.0 {
        (empirical_mean - analytic).abs() / analytic
    } else {
        (empirical_mean - analytic).abs()
    };
    let worst_gt_rate = per_realization
        .iter()
        .filter_map(|r| r.min_gt_rate)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    Ok(SimResult {
        spec: *spec,
        empirical_mean,
        empirical_stderr,
        analytic,
        relative_gap,
        per_realization,
        worst_gt_rate,
        edge_rate: (spec.mode == Mode::Mc).then_some(edge),
    })
}

/// Columns: `realization_index,gt_count,value_bps_per_hz`.
pub fn write_realizations_csv<W: Write>(result: &SimResult, mut out: W) -> io::Result<()> {
    writeln!(out, "realization_index,gt_count,value_bps_per_hz")?;
    for r in &result.per_realization {
        writeln!(out, "{},{},{}", r.index, r.gt_count, r.value_bps_per_hz)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct McMissionSim {
    /// `D̄/(W·R_MC(r̄))`, identical for every cell.
    pub hover_per_cell_s: f64,
    pub n_cells: f64,
    pub total_s: f64,
    /// Closed-form mission time for `K = ρA`.
    pub analytic_s: f64,
    pub edge_rate: f64,
    /// Worst sampled terminal rate across the realizations, if any were drawn.
    pub worst_gt_rate: Option<f64>,
    /// Every sampled terminal got at least the cell-edge rate.
    pub all_served: bool,
}

/// Multicast mission over `area_m2`: per-cell hover times from the cell-edge
/// rate, summed over the (real-valued) cell count. The sampled layouts only
/// feed the coverage diagnostic.
pub fn simulate_mc_mission(
    params: &SystemParams,
    dep: &Deployment,
    file_size_bits: f64,
    area_m2: f64,
    spec: &SimSpec,
) -> Result<McMissionSim> {
    if spec.mode != Mode::Mc {
        return Err(Error::RegionMismatch {
            mode: spec.mode.name(),
            region: spec.region.name(),
        });
    }
    let layout = geometry::make_layout(params, dep, area_m2)?;
    let mission = McMission::for_area(params, file_size_bits, area_m2)?;
    let hover = rates::cell_hover_time_mc(params, dep, file_size_bits)?;
    let analytic_s = rates::mission_time_mc(params, dep, &mission)?;
    let sim = simulate_rate(params, dep, spec)?;
    let edge = sim.edge_rate.unwrap_or(0.0);
    let all_served = sim
        .per_realization
        .iter()
        .filter_map(|r| r.min_gt_rate)
        .all(|w| w >= edge);
    Ok(McMissionSim {
        hover_per_cell_s: hover,
        n_cells: layout.n_cells,
        total_s: layout.n_cells * hover,
        analytic_s,
        edge_rate: edge,
        worst_gt_rate: sim.worst_gt_rate,
        all_served,
    })
}
