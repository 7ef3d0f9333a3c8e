//! Joint altitude/beamwidth optimization.
//!
//! The altitude comes from a monotonicity rule for each mode: multicast
//! throughput never decreases with `H`, broadcast throughput strictly
//! decreases with `H`, and uplink throughput does not depend on `H`. The
//! half-beamwidth is then found by [`search_1d`] at that altitude.
//! [`grid_search_2d`] ignores the rules and is used to validate them.

use crate::error::Result;
use crate::model::{FeasibleBox, SystemParams};
use crate::rates::{Mode, RateModel};

/// Points in the coarse scan that precedes golden-section refinement.
pub const COARSE_POINTS: usize = 257;

/// Default x-tolerance of the beamwidth search, in radians.
pub const DEFAULT_THETA_TOL: f64 = 1e-4;

/// Side of the square grid used by [`grid_search_2d`] by default.
pub const VALIDATION_GRID: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Altitude from the mode's monotonicity rule, beamwidth by [`search_1d`].
    ClosedRule,
    /// Exhaustive evaluation on a rectangular grid.
    Grid,
    /// [`search_1d`] over the beamwidth at a caller-chosen altitude.
    GoldenSection,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedRule => "closed-rule",
            Method::Grid => "grid",
            Method::GoldenSection => "golden-section",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub mode: Mode,
    pub h_star: f64,
    pub theta_star: f64,
    /// Cell throughput at the optimum, bps/Hz.
    pub objective: f64,
    /// Every `(h, theta, value)` evaluated, in evaluation order.
    pub trace: Vec<(f64, f64, f64)>,
    pub method: Method,
    /// The objective does not depend on altitude; `h_star` is `h_min` by convention.
    pub h_indifferent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Search1d {
    pub x_star: f64,
    pub f_star: f64,
    pub trace: Vec<(f64, f64)>,
}

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes `f` on `[lo, hi]`.
///
/// A [`COARSE_POINTS`]-point scan picks the best grid point (ties go to the
/// smaller `x`), then golden-section search refines inside the neighbouring
/// bracket until it is narrower than `tol`. The best point evaluated anywhere
/// is returned, so the result is never worse than the scan.
pub fn search_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Search1d {
    let mut trace = Vec::with_capacity(COARSE_POINTS + 64);
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        let v = f(lo);
        trace.push((lo, v));
        return Search1d {
            x_star: lo,
            f_star: v,
            trace,
        };
    }

    let n = COARSE_POINTS;
    let grid_x = |i: usize| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut best_i = 0;
    let mut best = (lo, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let x = grid_x(i);
        let v = f(x);
        trace.push((x, v));
        if score(v) > best.2 {
            best = (x, v, score(v));
            best_i = i;
        }
    }

    let mut a = grid_x(best_i.saturating_sub(1));
    let mut b = grid_x((best_i + 1).min(n - 1));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    trace.push((c, fc));
    trace.push((d, fd));
    while b - a > tol {
        if score(fc) >= score(fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            trace.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            trace.push((d, fd));
        }
    }

    for &(x, v) in &trace[n..] {
        if score(v) > best.2 {
            best = (x, v, score(v));
        }
    }
    Search1d {
        x_star: best.0,
        f_star: best.1,
        trace,
    }
}

/// Best half-beamwidth at a fixed altitude.
pub fn optimize_theta_at(
    mode: Mode,
    params: &SystemParams,
    bounds: &FeasibleBox,
    h: f64,
    tol: f64,
) -> Result<OptResult> {
    bounds.validate()?;
    let model = RateModel::new(params)?;
    let s = search_1d(
        |t| model.rate(mode, h, t).unwrap_or(f64::NEG_INFINITY),
        bounds.theta_min,
        bounds.theta_max,
        tol,
    );
    Ok(OptResult {
        mode,
        h_star: h,
        theta_star: s.x_star,
        objective: s.f_star,
        trace: s.trace.into_iter().map(|(t, v)| (h, t, v)).collect(),
        method: Method::GoldenSection,
        h_indifferent: mode == Mode::Mac,
    })
}

fn closed_rule(mode: Mode, params: &SystemParams, bounds: &FeasibleBox, h: f64) -> Result<OptResult> {
    let mut r = optimize_theta_at(mode, params, bounds, h, DEFAULT_THETA_TOL)?;
    r.method = Method::ClosedRule;
    Ok(r)
}

/// Multicast: fly as high as allowed, then search the beamwidth.
pub fn optimize_mc(params: &SystemParams, bounds: &FeasibleBox) -> Result<OptResult> {
    bounds.validate()?;
    closed_rule(Mode::Mc, params, bounds, bounds.h_max)
}

/// Broadcast: fly as low as allowed, then search the beamwidth.
pub fn optimize_bc(params: &SystemParams, bounds: &FeasibleBox) -> Result<OptResult> {
    bounds.validate()?;
    closed_rule(Mode::Bc, params, bounds, bounds.h_min)
}

/// Uplink: any altitude is optimal; `h_min` is reported and flagged.
pub fn optimize_mac(params: &SystemParams, bounds: &FeasibleBox) -> Result<OptResult> {
    bounds.validate()?;
    closed_rule(Mode::Mac, params, bounds, bounds.h_min)
}

pub fn optimize(mode: Mode, params: &SystemParams, bounds: &FeasibleBox) -> Result<OptResult> {
    match mode {
        Mode::Mc => optimize_mc(params, bounds),
        Mode::Bc => optimize_bc(params, bounds),
        Mode::Mac => optimize_mac(params, bounds),
    }
}

/// Evenly spaced grid of `n` points on `[lo, hi]`, endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Argmax over an `nh × ntheta` grid of the box, without any altitude rule.
/// Ties go to the first point in (h, theta) row-major order.
pub fn grid_search_2d(
    mode: Mode,
    params: &SystemParams,
    bounds: &FeasibleBox,
    nh: usize,
    ntheta: usize,
) -> Result<OptResult> {
    bounds.validate()?;
    let model = RateModel::new(params)?;
    let hs = linspace(bounds.h_min, bounds.h_max, nh.max(1));
    let ts = linspace(bounds.theta_min, bounds.theta_max, ntheta.max(1));
    let mut trace = Vec::with_capacity(hs.len() * ts.len());
    let mut best = (hs[0], ts[0], f64::NEG_INFINITY);
    for &h in &hs {
        for &t in &ts {
            let v = model.rate(mode, h, t)?;
            trace.push((h, t, v));
            if score(v) > score(best.2) {
                best = (h, t, v);
            }
        }
    }
    Ok(OptResult {
        mode,
        h_star: best.0,
        theta_star: best.1,
        objective: best.2,
        trace,
        method: Method::Grid,
        h_indifferent: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn quadratic_peak() {
        let s = search_1d(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-6);
        assert!((s.x_star - 0.3).abs() < 1e-6);
    }

    #[test]
    fn monotone_functions_pick_the_boundary() {
        let s = search_1d(|x| x.exp(), 0.2, 1.7, 1e-4);
        assert_eq!(s.x_star, 1.7);
        let s = search_1d(|x| -x, 0.2, 1.7, 1e-4);
        assert_eq!(s.x_star, 0.2);
    }

    #[test]
    fn flat_function_ties_to_the_left() {
        let s = search_1d(|_| 1.0, 0.5, 1.0, 1e-4);
        assert_eq!(s.x_star, 0.5);
    }

    #[test]
    fn degenerate_interval() {
        let s = search_1d(|x| x, 0.5, 0.5, 1e-4);
        assert_eq!((s.x_star, s.trace.len()), (0.5, 1));
    }

    #[test]
    fn never_worse_than_the_scan() {
        // two peaks; the coarse scan must keep the taller one
        let f = |x: f64| (-(x - 0.2).powi(2) * 400.0).exp() + 1.2 * (-(x - 0.8).powi(2) * 400.0).exp();
        let s = search_1d(f, 0.0, 1.0, 1e-5);
        let scan_best = s.trace[..COARSE_POINTS].iter().map(|p| p.1).fold(f64::MIN, f64::max);
        assert!(s.f_star >= scan_best);
        assert!((s.x_star - 0.8).abs() < 1e-3);
    }

    #[test]
    fn nan_is_never_chosen() {
        let s = search_1d(|x| if x < 0.5 { f64::NAN } else { -x }, 0.0, 1.0, 1e-4);
        assert_eq!(s.x_star, 0.5);
    }

    #[test]
    fn infeasible_box_is_rejected() {
        let p = SystemParams::baseline();
        let b = FeasibleBox {
            h_min: 100.0,
            h_max: 10.0,
            theta_min: 0.1,
            theta_max: 1.0,
        };
        assert!(matches!(optimize_mc(&p, &b), Err(Error::Config { .. })));
        assert!(optimize_bc(&p, &b).is_err());
        assert!(optimize_mac(&p, &b).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(1.0, 2.0, 5);
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
