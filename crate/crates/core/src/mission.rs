//! Fly-hover-and-communicate planning over a rectangular service area.
//!
//! Cell centers sit on a hexagonal lattice centered on the rectangle. Every
//! cell whose hexagon overlaps the rectangle is kept, edge cells included.
//! The UAV leaves from the corner at the origin, visits every center once
//! in an order built by nearest neighbor and refined by 2-opt and Or-opt,
//! and returns.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::{Deployment, SystemParams};
use crate::rates::{self, Mode};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Below this ratio of hover time to flying time a plan is flagged.
pub const HOVER_DOMINANCE_THRESHOLD: f64 = 10.0;

/// Axis-aligned service area `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub width_m: f64,
    pub height_m: f64,
}

impl Rect {
    pub fn new(width_m: f64, height_m: f64) -> Result<Self> {
        let r = Rect { width_m, height_m };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        if !(self.width_m.is_finite() && self.width_m > 0.0 && self.height_m.is_finite() && self.height_m > 0.0) {
            return Err(Error::config(
                "area",
                format!("degenerate rectangle {} m × {} m", self.width_m, self.height_m),
            ));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width_m * self.height_m
    }

    /// The corner nearest the origin.
    pub fn depot(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width_m).contains(&p.x) && (0.0..=self.height_m).contains(&p.y)
    }
}

fn hex_vertices(c: Point, r: f64) -> [Point; 6] {
    let mut v = [c; 6];
    for (k, p) in v.iter_mut().enumerate() {
        let a = std::f64::consts::FRAC_PI_3 * k as f64;
        *p = Point::new(c.x + r * a.cos(), c.y + r * a.sin());
    }
    v
}

/// Separating-axis test between the hexagon at `c` and the rectangle.
/// Contact along an edge or at a corner does not count as overlap.
fn hex_overlaps_rect(c: Point, r: f64, rect: &Rect) -> bool {
    let hex = hex_vertices(c, r);
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(rect.width_m, 0.0),
        Point::new(rect.width_m, rect.height_m),
        Point::new(0.0, rect.height_m),
    ];
    let eps = 1e-9 * r;
    let axes = [
        (1.0, 0.0),
        (0.0, 1.0),
        (0.5 * SQRT3, 0.5),
        (-0.5 * SQRT3, 0.5),
    ];
    axes.iter().all(|&(ax, ay)| {
        let proj = |pts: &[Point]| {
            pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let d = p.x * ax + p.y * ay;
                (lo.min(d), hi.max(d))
            })
        };
        let (h0, h1) = proj(&hex);
        let (r0, r1) = proj(&corners);
        h1 > r0 + eps && r1 > h0 + eps
    })
}

/// Hexagonal-lattice cell centers covering `rect`, for cells of circumradius
/// `circumradius`. Ordered by lattice column, then row.
pub fn layout_centers(rect: &Rect, circumradius: f64) -> Result<Vec<Point>> {
    rect.validate()?;
    if !(circumradius.is_finite() && circumradius > 0.0) {
        return Err(Error::config("circumradius", "must be > 0"));
    }
    let r = circumradius;
    let col_pitch = 1.5 * r;
    let row_pitch = SQRT3 * r;
    let cx = 0.5 * rect.width_m;
    let cy = 0.5 * rect.height_m;
    let ni = (cx / col_pitch).ceil() as i64 + 2;
    let nj = (cy / row_pitch).ceil() as i64 + 2;
    let mut centers = Vec::new();
    for i in -ni..=ni {
        let offset = if i.rem_euclid(2) == 1 { 0.5 * row_pitch } else { 0.0 };
        for j in -nj..=nj {
            let c = Point::new(cx + i as f64 * col_pitch, cy + j as f64 * row_pitch + offset);
            if hex_overlaps_rect(c, r, rect) {
                centers.push(c);
            }
        }
    }
    Ok(centers)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    /// Visiting order as indices into the input centers.
    pub order: Vec<usize>,
    /// Closed length, depot → centers → depot.
    pub length_m: f64,
}

fn closed_length(start: Point, centers: &[Point], order: &[usize]) -> f64 {
    let mut prev = start;
    let mut total = 0.0;
    for &i in order {
        total += prev.distance(&centers[i]);
        prev = centers[i];
    }
    total + prev.distance(&start)
}

pub fn nearest_neighbor_order(centers: &[Point], start: Point) -> Vec<usize> {
    let mut visited = vec![false; centers.len()];
    let mut order = Vec::with_capacity(centers.len());
    let mut here = start;
    for _ in 0..centers.len() {
        let next = (0..centers.len())
            .filter(|&i| !visited[i])
            .min_by(|&a, &b| here.distance(&centers[a]).total_cmp(&here.distance(&centers[b])))
            .expect("unvisited center remains");
        visited[next] = true;
        order.push(next);
        here = centers[next];
    }
    order
}

/// Applies improving 2-opt segment reversals until none is left.
pub fn two_opt(centers: &[Point], start: Point, order: &mut [usize]) {
    let n = order.len();
    if n < 2 {
        return;
    }
    let at = |order: &[usize], k: isize| -> Point {
        if k < 0 || k as usize >= n {
            start
        } else {
            centers[order[k as usize]]
        }
    };
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let a = at(order, i as isize - 1);
                let b = at(order, i as isize);
                let c = at(order, j as isize);
                let d = at(order, j as isize + 1);
                let delta = a.distance(&b) + c.distance(&d) - a.distance(&c) - b.distance(&d);
                if delta > 1e-9 {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Moves runs of one to three consecutive centers, possibly reversed, to a
/// better place in the tour until no such move helps. Returns whether the
/// order changed.
pub fn or_opt(centers: &[Point], start: Point, order: &mut Vec<usize>) -> bool {
    let n = order.len();
    let at = |o: &[usize], k: isize| -> Point {
        if k < 0 || k as usize >= o.len() {
            start
        } else {
            centers[o[k as usize]]
        }
    };
    let mut changed = false;
    'restart: loop {
        for seg in 1..=3.min(n) {
            for i in 0..=n - seg {
                let prev = at(order, i as isize - 1);
                let next = at(order, (i + seg) as isize);
                let first = centers[order[i]];
                let last = centers[order[i + seg - 1]];
                let removal = prev.distance(&first) + last.distance(&next) - prev.distance(&next);
                let rest: Vec<usize> = order[..i].iter().chain(&order[i + seg..]).copied().collect();
                for j in 0..=rest.len() {
                    let u = at(&rest, j as isize - 1);
                    let v = at(&rest, j as isize);
                    let base = u.distance(&v);
                    let forward = u.distance(&first) + last.distance(&v) - base;
                    let backward = u.distance(&last) + first.distance(&v) - base;
                    let (cost, reverse) = if backward < forward { (backward, true) } else { (forward, false) };
                    if removal - cost > 1e-9 {
                        let mut piece = order[i..i + seg].to_vec();
                        if reverse {
                            piece.reverse();
                        }
                        let mut moved = rest[..j].to_vec();
                        moved.extend(piece);
                        moved.extend_from_slice(&rest[j..]);
                        *order = moved;
                        changed = true;
                        continue 'restart;
                    }
                }
            }
        }
        return changed;
    }
}

/// Nearest-neighbor construction, then 2-opt and Or-opt in turn until
/// neither improves the tour.
pub fn plan_tour(centers: &[Point], start: Point) -> Tour {
    let mut order = nearest_neighbor_order(centers, start);
    loop {
        two_opt(centers, start, &mut order);
        if !or_opt(centers, start, &mut order) {
            break;
        }
    }
    let length_m = closed_length(start, centers, &order);
    Tour { order, length_m }
}

/// What each hover must accomplish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellPayload {
    /// Multicast: deliver a file of this many bits to every terminal.
    FileBits(f64),
    /// Broadcast/uplink: hover for a fixed period in seconds.
    Period(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan {
    pub mode: Mode,
    pub start: Point,
    /// Centers in visiting order.
    pub centers: Vec<Point>,
    pub tour_length_m: f64,
    pub hover_times_s: Vec<f64>,
    pub fly_time_s: f64,
    pub completion_time_s: f64,
    /// `ΣT_i / (L/V_m)`, infinite when the tour has zero length.
    pub hover_dominance: f64,
    pub v_max_mps: f64,
}

impl MissionPlan {
    pub fn total_hover_s(&self) -> f64 {
        self.hover_times_s.iter().sum()
    }

    /// Flying time is not negligible against hovering time.
    pub fn hover_warning(&self) -> bool {
        self.hover_dominance < HOVER_DOMINANCE_THRESHOLD
    }

    /// Columns: `cell_index,x_m,y_m,hover_s,cumulative_s`. `cumulative_s` is
    /// the elapsed mission time when the hover over that cell ends.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "cell_index,x_m,y_m,hover_s,cumulative_s")?;
        let mut elapsed = 0.0;
        let mut here = self.start;
        for (k, (c, hover)) in self.centers.iter().zip(&self.hover_times_s).enumerate() {
            elapsed += here.distance(c) / self.v_max_mps + hover;
            here = *c;
            writeln!(out, "{},{},{},{},{}", k, c.x, c.y, hover, elapsed)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode: {}", self.mode);
        let _ = writeln!(s, "cells: {}", self.centers.len());
        let _ = writeln!(s, "tour_length_m: {}", self.tour_length_m);
        let _ = writeln!(s, "total_hover_s: {}", self.total_hover_s());
        let _ = writeln!(s, "fly_time_s: {}", self.fly_time_s);
        let _ = writeln!(s, "completion_time_s: {}", self.completion_time_s);
        let _ = writeln!(s, "hover_dominance: {}", self.hover_dominance);
        if self.hover_warning() {
            let _ = writeln!(
                s,
                "warning: hover time is less than {HOVER_DOMINANCE_THRESHOLD}x the flying time"
            );
        }
        s
    }
}

/// Lays out the cells, orders the tour and attaches hover times.
pub fn assemble_plan(
    params: &SystemParams,
    dep: &Deployment,
    mode: Mode,
    payload: CellPayload,
    v_max: f64,
    rect: &Rect,
) -> Result<MissionPlan> {
    if v_max.is_nan() || v_max <= 0.0 {
        return Err(Error::config("uav_speed_mps", "must be > 0"));
    }
    let hover = match (mode, payload) {
        (Mode::Mc, CellPayload::FileBits(bits)) => rates::cell_hover_time_mc(params, dep, bits)?,
        (Mode::Bc | Mode::Mac, CellPayload::Period(p)) if p > 0.0 => p,
        (Mode::Mc, _) => return Err(Error::config("file_size_bits", "multicast plans need a file size")),
        _ => return Err(Error::config("period_s", "broadcast/uplink plans need a period > 0")),
    };
    let centers = layout_centers(rect, dep.coverage_radius())?;
    let start = rect.depot();
    let tour = plan_tour(&centers, start);
    let ordered: Vec<Point> = tour.order.iter().map(|&i| centers[i]).collect();
    let hover_times_s = vec![hover; ordered.len()];
    let total_hover: f64 = hover_times_s.iter().sum();
    let fly_time_s = tour.length_m / v_max;
    let hover_dominance = if fly_time_s > 0.0 {
        total_hover / fly_time_s
    } else {
        f64::INFINITY
    };
    Ok(MissionPlan {
        mode,
        start,
        centers: ordered,
        tour_length_m: tour.length_m,
        hover_times_s,
        fly_time_s,
        completion_time_s: total_hover + fly_time_s,
        hover_dominance,
        v_max_mps: v_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_centers_out_and_back() {
        let centers: Vec<Point> = [3.0, 1.0, 4.0, 2.0, 5.0].iter().map(|&x| Point::new(x, 0.0)).collect();
        let t = plan_tour(&centers, Point::new(0.0, 0.0));
        assert!((t.length_m - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_center_at_depot() {
        let t = plan_tour(&[Point::new(0.0, 0.0)], Point::new(0.0, 0.0));
        assert_eq!(t.length_m, 0.0);
        let t = plan_tour(&[Point::new(3.0, 4.0)], Point::new(0.0, 0.0));
        assert!((t.length_m - 10.0).abs() < 1e-12);
    }

    #[test]
    fn two_opt_untangles_a_crossing() {
        let c = [
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
        ];
        let start = Point::new(0.0, 0.0);
        let mut order = vec![2, 0, 1];
        two_opt(&c, start, &mut order);
        assert!((closed_length(start, &c, &order) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rectangle() {
        assert!(Rect::new(0.0, 10.0).is_err());
        assert!(layout_centers(&Rect { width_m: 10.0, height_m: -1.0 }, 5.0).is_err());
    }

    #[test]
    fn small_area_inside_one_cell() {
        let rect = Rect::new(10.0, 10.0).unwrap();
        assert_eq!(layout_centers(&rect, 100.0).unwrap().len(), 1);
    }

    #[test]
    fn hex_bounding_box_needs_its_neighbours() {
        let r = 50.0;
        let rect = Rect::new(2.0 * r, SQRT3 * r).unwrap();
        let centers = layout_centers(&rect, r).unwrap();
        // the central cell plus the four neighbours that clip the box corners
        assert_eq!(centers.len(), 5);
    }

    #[test]
    fn payload_must_match_mode() {
        let p = SystemParams::baseline();
        let d = Deployment::new(100.0, 0.5).unwrap();
        let rect = Rect::new(1000.0, 1000.0).unwrap();
        assert!(assemble_plan(&p, &d, Mode::Mc, CellPayload::Period(1.0), 10.0, &rect).is_err());
        assert!(assemble_plan(&p, &d, Mode::Bc, CellPayload::FileBits(1.0), 10.0, &rect).is_err());
        assert!(assemble_plan(&p, &d, Mode::Bc, CellPayload::Period(1.0), 0.0, &rect).is_err());
    }
}
