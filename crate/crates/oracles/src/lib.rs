//! Reference computations that the uavbeam tests check the library against.
//!
//! Nothing in here calls into `uavbeam`. Each routine is the slow, obvious
//! way to get a number: recursive quadrature, exhaustive enumeration, dense
//! grids, and link budgets evaluated straight from dBm figures.

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Recursion stops when the Richardson error estimate on a panel drops below
/// `tol` scaled by the panel width, or at `max_depth`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn panel(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = panel(f, a, fa, m, fm);
        let (rm, frm, right) = panel(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }

    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = panel(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Quadrature with a relative tolerance: a first coarse pass sets the scale.
pub fn integrate_rel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let rough = adaptive_simpson(f, a, b, 1e-3 * (b - a).abs().max(1e-300));
    let scale = rough.abs().max(f64::MIN_POSITIVE);
    adaptive_simpson(f, a, b, rel_tol * scale)
}

/// Linear power from dBm.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// The rectangular-lobe antenna constant, 30000/2² degrees² expressed in rad².
pub fn antenna_constant() -> f64 {
    30000.0 / 4.0 * (PI / 180.0) * (PI / 180.0)
}

/// Downlink SNR constant α from raw link-budget figures.
pub fn alpha_from_budget(beta0: f64, bandwidth_hz: f64, p_dbm: f64, n0_dbm_hz: f64) -> f64 {
    let p = dbm_to_watts(p_dbm);
    let n0 = dbm_to_watts(n0_dbm_hz);
    p * antenna_constant() * beta0 / (n0 * bandwidth_hz)
}

/// Uplink SNR constant η from raw link-budget figures and density.
pub fn eta_from_budget(
    beta0: f64,
    bandwidth_hz: f64,
    p_dbm: f64,
    n0_dbm_hz: f64,
    density: f64,
) -> f64 {
    let p = dbm_to_watts(p_dbm);
    let n0 = dbm_to_watts(n0_dbm_hz);
    p * beta0 * antenna_constant() * density * PI / (n0 * bandwidth_hz)
}

/// Sum rate over the coverage disk for equal-share FDMA broadcast, by quadrature
/// of `ρ · log₂(1 + α/(Θ²(H²+r²))) / K′ · 2πr` over `[0, H tanΘ]`.
pub fn broadcast_disk_quadrature(alpha: f64, density: f64, h: f64, theta: f64) -> f64 {
    let radius = h * theta.tan();
    let k = density * PI * radius * radius;
    let integrand = |r: f64| {
        let snr = alpha / (theta * theta * (h * h + r * r));
        density * (snr.ln_1p() / std::f64::consts::LN_2) / k * 2.0 * PI * r
    };
    integrate_rel(&integrand, 0.0, radius, 1e-11)
}

/// Uplink sum rate over the coverage disk, by quadrature of the per-terminal
/// uplink rate with bandwidth share `W/K′`.
pub fn uplink_disk_quadrature(eta: f64, density: f64, h: f64, theta: f64) -> f64 {
    let radius = h * theta.tan();
    let k = density * PI * radius * radius;
    let tan2 = theta.tan().powi(2);
    let integrand = |r: f64| {
        let snr = eta * h * h * tan2 / (theta * theta * (h * h + r * r));
        density * (snr.ln_1p() / std::f64::consts::LN_2) / k * 2.0 * PI * r
    };
    integrate_rel(&integrand, 0.0, radius, 1e-11)
}

/// Argmax of `f` over `n` evenly spaced points of `[lo, hi]`, first index on ties.
pub fn dense_argmax(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    assert!(n >= 2);
    let mut best = (lo, f(lo));
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Shortest closed tour that starts and ends at `start` and visits every point,
/// by enumerating all permutations. Intended for at most about nine points.
pub fn brute_force_tour_length(start: (f64, f64), points: &[(f64, f64)]) -> f64 {
    fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    }

    fn search(
        start: (f64, f64),
        last: (f64, f64),
        points: &[(f64, f64)],
        used: &mut [bool],
        remaining: usize,
        so_far: f64,
        best: &mut f64,
    ) {
        if so_far >= *best {
            return;
        }
        if remaining == 0 {
            let total = so_far + dist(last, start);
            if total < *best {
                *best = total;
            }
            return;
        }
        for i in 0..points.len() {
            if !used[i] {
                used[i] = true;
                let step = dist(last, points[i]);
                search(start, points[i], points, used, remaining - 1, so_far + step, best);
                used[i] = false;
            }
        }
    }

    let mut used = vec![false; points.len()];
    let mut best = f64::INFINITY;
    search(start, start, points, &mut used, points.len(), 0.0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_transcendentals() {
        let cubic = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert!((cubic - 4.0).abs() < 1e-12);
        let s = integrate_rel(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((s - 2.0).abs() < 1e-10);
    }

    #[test]
    fn brute_force_square() {
        let pts = [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert!((brute_force_tour_length((0.0, 0.0), &pts) - 4.0).abs() < 1e-12);
    }
}
