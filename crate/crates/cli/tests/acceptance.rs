//! Acceptance suite. Runs every criterion at its pinned tolerance and time
//! bound, prints one line per criterion and exits nonzero on any failure.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uavbeam::geometry::Point;
use uavbeam::mission::plan_tour;
use uavbeam::montecarlo::simulate_rate;
use uavbeam::optimizer::{grid_search_2d, linspace, optimize_bc, optimize_mc, VALIDATION_GRID};
use uavbeam::{CountModel, Deployment, FeasibleBox, Mode, RateModel, SimSpec, SystemParams};
use uavbeam_oracles::{broadcast_disk_quadrature, brute_force_tour_length, uplink_disk_quadrature};

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn model() -> RateModel {
    RateModel::new(&SystemParams::baseline()).unwrap()
}

fn uplink_optimum_via_cli() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("mac.toml");
    std::fs::write(&cfg, "h_min_m = 50\nh_max_m = 500\ntheta_min_rad = 0.1\ntheta_max_rad = 1.5\n")
        .map_err(|e| e.to_string())?;
    let mut peaks = Vec::new();
    for rho in [0.001, 0.005, 0.01] {
        let out = Command::new(env!("CARGO_BIN_EXE_uavbeam"))
            .arg("--config")
            .arg(&cfg)
            .args(["--set", &format!("density_per_m2={rho}"), "optimize", "--mode", "mac"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("ρ = {rho}: exit {:?}", out.status.code()))?;
        let text = String::from_utf8_lossy(&out.stdout);
        let theta: f64 = text
            .lines()
            .find_map(|l| l.strip_prefix("theta_star_rad: "))
            .ok_or("no theta_star_rad in report")?
            .parse()
            .map_err(|_| "unparsable theta_star_rad")?;
        ensure((theta - 1.3195).abs() <= 0.005, || format!("ρ = {rho}: Θ* = {theta}"))?;
        peaks.push(theta);
    }
    let span = peaks.iter().cloned().fold(f64::MIN, f64::max) - peaks.iter().cloned().fold(f64::MAX, f64::min);
    ensure(span < 0.01, || format!("span {span}"))?;
    Ok(format!("Θ* = {:.4} / {:.4} / {:.4}, span {span:.2e}", peaks[0], peaks[1], peaks[2]))
}

fn multicast_monotone_in_altitude() -> Result<String, String> {
    let m = model();
    let mut worst = f64::INFINITY;
    for t in linspace(0.05, 1.5, 50) {
        let vals: Vec<f64> = linspace(1.0, 1e4, 200).iter().map(|&h| m.rate_mc(h, t).unwrap()).collect();
        for w in vals.windows(2) {
            worst = worst.min(w[1] - w[0]);
        }
    }
    ensure(worst >= -1e-12, || format!("largest drop {worst}"))?;
    Ok(format!("smallest step {worst:.3e}"))
}

fn broadcast_decreasing_in_altitude() -> Result<String, String> {
    let m = model();
    let mut least = f64::INFINITY;
    for t in linspace(0.05, 1.5, 50) {
        let vals: Vec<f64> = linspace(1.0, 1e4, 200).iter().map(|&h| m.rate_bc(h, t).unwrap()).collect();
        for w in vals.windows(2) {
            least = least.min(w[0] - w[1]);
        }
    }
    ensure(least > 0.0, || format!("non-decreasing step {least}"))?;
    Ok(format!("smallest decrease {least:.3e}"))
}

fn uplink_altitude_independent() -> Result<String, String> {
    let m = model();
    let mut worst: f64 = 0.0;
    for t in linspace(0.05, 1.5, 50) {
        let vals: Vec<f64> = linspace(1.0, 1e4, 100).iter().map(|&h| m.rate_mac(h, t).unwrap()).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((hi - lo) / hi.abs());
    }
    ensure(worst < 1e-12, || format!("spread {worst}"))?;
    Ok(format!("largest relative spread {worst:.3e}"))
}

fn closed_forms_vs_quadrature() -> Result<String, String> {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let h = rng.random_range(1.0..1e4);
        let t = rng.random_range(0.05..1.5);
        let bq = broadcast_disk_quadrature(m.consts.alpha, m.density, h, t);
        let mq = uplink_disk_quadrature(m.consts.eta, m.density, h, t);
        let eb = ((m.rate_bc(h, t).unwrap() - bq) / bq).abs();
        let em = ((m.rate_mac(h, t).unwrap() - mq) / mq).abs();
        ensure(eb < 1e-6 && em < 1e-6, || format!("({h}, {t}): bc {eb:.2e}, mac {em:.2e}"))?;
        worst = worst.max(eb).max(em);
    }
    Ok(format!("largest relative error {worst:.3e}"))
}

fn monte_carlo_agreement() -> Result<String, String> {
    let p = SystemParams::baseline();
    let points = [(100.0, PI / 10.0), (300.0, PI / 10.0), (500.0, PI / 10.0), (500.0, 0.2), (500.0, 0.6), (500.0, 1.0)];
    let mut worst: f64 = 0.0;
    for mode in [Mode::Bc, Mode::Mac] {
        for &(h, t) in &points {
            let dep = Deployment::new(h, t).unwrap();
            let spec = SimSpec::new(mode, 7).with_count_model(CountModel::Fixed);
            let r = simulate_rate(&p, &dep, &spec).map_err(|e| e.to_string())?;
            ensure(r.relative_gap <= 0.03, || format!("{mode} at ({h}, {t}): gap {}", r.relative_gap))?;
            worst = worst.max(r.relative_gap);
        }
    }
    Ok(format!("largest gap {worst:.3e}"))
}

fn multicast_large_altitude_limit() -> Result<String, String> {
    let m = model();
    let mut worst: f64 = 0.0;
    for t in [0.2_f64, 0.5, 1.0] {
        let limit = 1.5 * 3f64.sqrt() * m.density * m.consts.alpha * t.sin().powi(2) / (t * t * LN_2);
        let err = ((m.rate_mc(1e6, t).unwrap() - limit) / limit).abs();
        ensure(err < 1e-3, || format!("Θ = {t}: {err:.3e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("largest relative error {worst:.3e}"))
}

fn sign_changes(vals: &[f64]) -> usize {
    let signs: Vec<f64> = vals
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

fn multicast_curve_shape() -> Result<String, String> {
    let m = model();
    let grid: Vec<f64> = (1..=1000).map(|i| FRAC_PI_2 * i as f64 / 1001.0).collect();
    let mut peaks = Vec::new();
    for h in [100.0, 300.0, 500.0] {
        let vals: Vec<f64> = grid.iter().map(|&t| m.rate_mc(h, t).unwrap()).collect();
        let changes = sign_changes(&vals);
        ensure(changes <= 1, || format!("H = {h}: {changes} sign changes"))?;
        let best = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
        peaks.push(grid[best]);
    }
    ensure(peaks.windows(2).all(|w| w[1] <= w[0]), || format!("peaks {peaks:?}"))?;
    Ok(format!("argmax Θ = {:.4} / {:.4} / {:.4}", peaks[0], peaks[1], peaks[2]))
}

fn grid_cross_validation(mode: Mode) -> Result<String, String> {
    let p = SystemParams::baseline();
    let mut notes = Vec::new();
    for b in [FeasibleBox::new(50.0, 500.0, 0.1, 1.5).unwrap(), FeasibleBox::new(100.0, 2000.0, 0.1, 1.5).unwrap()] {
        let h_step = (b.h_max - b.h_min) / (VALIDATION_GRID - 1) as f64;
        let t_step = (b.theta_max - b.theta_min) / (VALIDATION_GRID - 1) as f64;
        let g = grid_search_2d(mode, &p, &b, VALIDATION_GRID, VALIDATION_GRID).map_err(|e| e.to_string())?;
        let (o, h_rule) = match mode {
            Mode::Mc => (optimize_mc(&p, &b).map_err(|e| e.to_string())?, b.h_max),
            _ => (optimize_bc(&p, &b).map_err(|e| e.to_string())?, b.h_min),
        };
        ensure((g.h_star - h_rule).abs() <= h_step, || format!("grid H* {} vs {h_rule}", g.h_star))?;
        ensure((g.theta_star - o.theta_star).abs() <= t_step, || {
            format!("grid Θ* {} vs {}", g.theta_star, o.theta_star)
        })?;
        notes.push(format!("H* {} Θ* {:.4}/{:.4}", g.h_star, g.theta_star, o.theta_star));
    }
    Ok(notes.join("; "))
}

fn tour_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let n = 1 + k % 8;
        let centers: Vec<Point> =
            (0..n).map(|_| Point::new(rng.random_range(0.0..2000.0), rng.random_range(0.0..2000.0))).collect();
        let tour = plan_tour(&centers, Point::new(0.0, 0.0));
        let pts: Vec<(f64, f64)> = centers.iter().map(|c| (c.x, c.y)).collect();
        let best = brute_force_tour_length((0.0, 0.0), &pts);
        let ratio = tour.length_m / best;
        ensure(ratio <= 1.05 + 1e-12, || format!("instance {k} ({n} centers): ratio {ratio}"))?;
        worst = worst.max(ratio);
    }
    Ok(format!("worst ratio {worst:.4}"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "uplink optimum Θ* = 1.3195 ± 0.005", limit: Duration::from_secs(1), check: uplink_optimum_via_cli },
        Criterion { id: 2, name: "multicast rate non-decreasing in H", limit: Duration::from_secs(5), check: multicast_monotone_in_altitude },
        Criterion { id: 3, name: "broadcast rate strictly decreasing in H", limit: Duration::from_secs(5), check: broadcast_decreasing_in_altitude },
        Criterion { id: 4, name: "uplink rate independent of H", limit: Duration::from_secs(1), check: uplink_altitude_independent },
        Criterion { id: 5, name: "closed forms vs radial quadrature", limit: Duration::from_secs(30), check: closed_forms_vs_quadrature },
        Criterion { id: 6, name: "Monte Carlo within 3% of closed form", limit: Duration::from_secs(60), check: monte_carlo_agreement },
        Criterion { id: 7, name: "multicast large-H limit", limit: Duration::from_secs(1), check: multicast_large_altitude_limit },
        Criterion { id: 8, name: "multicast Θ curves unimodal, peak non-increasing", limit: Duration::from_secs(2), check: multicast_curve_shape },
        Criterion { id: 9, name: "64x64 grid agrees with optimizer (mc)", limit: Duration::from_secs(10), check: || grid_cross_validation(Mode::Mc) },
        Criterion { id: 9, name: "64x64 grid agrees with optimizer (bc)", limit: Duration::from_secs(10), check: || grid_cross_validation(Mode::Bc) },
        Criterion { id: 10, name: "tour within 1.05x of brute force", limit: Duration::from_secs(10), check: tour_oracle },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {} ({:.3} s, limit {} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("{} of {} checks passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
