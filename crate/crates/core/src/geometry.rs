//! Cell geometry and random ground-terminal layouts.
//!
//! Hexagons are flat-sided with one vertex on the positive x-axis, so the
//! circumradius runs along x and the inradius along y.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::{check_half_beamwidth, Deployment, SystemParams};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Area of a regular hexagon with circumradius 1.
pub const HEX_AREA_FACTOR: f64 = 1.5 * SQRT3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Hexagon,
    Disk,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Hexagon => "hexagon",
            Region::Disk => "disk",
        }
    }
}

/// How many terminals a sampled cell holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountModel {
    /// Poisson with mean `ρ · area`.
    Poisson,
    /// Always `round(ρ · area)`, at least one.
    Fixed,
}

/// Footprint radius `h·tanθ`.
pub fn coverage_radius(h: f64, theta: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain {
            name: "altitude",
            value: h,
            expected: "H > 0",
        });
    }
    check_half_beamwidth(theta)?;
    Ok(h * theta.tan())
}

/// Tessellation summary for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLayout {
    pub circumradius_m: f64,
    pub hex_area_m2: f64,
    pub disk_area_m2: f64,
    /// Expected terminal count in one hexagonal cell.
    pub ks_hex: f64,
    /// Expected terminal count in the coverage disk.
    pub ks_disk: f64,
    /// Cells needed for the service area, kept real-valued.
    pub n_cells: f64,
}

impl CellLayout {
    pub fn expected_count(&self, region: Region) -> f64 {
        match region {
            Region::Hexagon => self.ks_hex,
            Region::Disk => self.ks_disk,
        }
    }
}

pub fn make_layout(params: &SystemParams, dep: &Deployment, total_area_m2: f64) -> Result<CellLayout> {
    params.validate()?;
    let radius = coverage_radius(dep.altitude_m, dep.half_beamwidth_rad)?;
    let hex_area = HEX_AREA_FACTOR * radius * radius;
    if !(total_area_m2.is_finite() && total_area_m2 >= hex_area) {
        return Err(Error::config(
            "area_m2",
            format!("{total_area_m2} m² is smaller than one cell ({hex_area} m²)"),
        ));
    }
    let disk_area = PI * radius * radius;
    Ok(CellLayout {
        circumradius_m: radius,
        hex_area_m2: hex_area,
        disk_area_m2: disk_area,
        ks_hex: params.density_per_m2 * hex_area,
        ks_disk: params.density_per_m2 * disk_area,
        n_cells: total_area_m2 / hex_area,
    })
}

/// Layout of a single cell, for callers that do not care about the service area.
pub fn cell_layout(params: &SystemParams, dep: &Deployment) -> Result<CellLayout> {
    let radius = coverage_radius(dep.altitude_m, dep.half_beamwidth_rad)?;
    make_layout(params, dep, HEX_AREA_FACTOR * radius * radius)
}

/// Point-in-hexagon test, boundary inclusive.
pub fn hex_contains(p: Point, circumradius: f64) -> bool {
    let ax = p.x.abs();
    let ay = p.y.abs();
    ay <= 0.5 * SQRT3 * circumradius && SQRT3 * ax + ay <= SQRT3 * circumradius
}

/// Point-in-disk test, boundary inclusive.
pub fn disk_contains(p: Point, radius: f64) -> bool {
    p.x * p.x + p.y * p.y <= radius * radius
}

/// One random set of terminal positions around a cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct GtRealization {
    pub positions: Vec<Point>,
    pub region: Region,
    pub seed: u64,
    pub circumradius_m: f64,
}

impl GtRealization {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.positions.iter().map(Point::norm)
    }
}

pub(crate) fn draw_count(mean: f64, model: CountModel, rng: &mut ChaCha8Rng) -> usize {
    match model {
        CountModel::Fixed => (mean.round() as usize).max(1),
        CountModel::Poisson => {
            if mean <= 0.0 {
                return 0;
            }
            // mean > 0 and finite, so construction cannot fail
            let dist = Poisson::new(mean).expect("positive Poisson mean");
            dist.sample(rng) as usize
        }
    }
}

pub(crate) fn sample_point(region: Region, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    match region {
        Region::Disk => {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point::new(r * phi.cos(), r * phi.sin())
        }
        Region::Hexagon => {
            let half_height = 0.5 * SQRT3 * radius;
            loop {
                let p = Point::new(
                    rng.random_range(-radius..=radius),
                    rng.random_range(-half_height..=half_height),
                );
                if hex_contains(p, radius) {
                    return p;
                }
            }
        }
    }
}

/// Draws terminals uniformly over `region`, deterministic in `seed`.
pub fn sample_gts(layout: &CellLayout, region: Region, count_model: CountModel, seed: u64) -> GtRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = draw_count(layout.expected_count(region), count_model, &mut rng);
    let radius = layout.circumradius_m;
    let positions = (0..count).map(|_| sample_point(region, radius, &mut rng)).collect();
    GtRealization {
        positions,
        region,
        seed,
        circumradius_m: radius,
    }
}

/// Draws exactly `count` terminals, bypassing the count model.
pub fn sample_n_gts(radius: f64, region: Region, count: usize, seed: u64) -> GtRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..count).map(|_| sample_point(region, radius, &mut rng)).collect();
    GtRealization {
        positions,
        region,
        seed,
        circumradius_m: radius,
    }
}
