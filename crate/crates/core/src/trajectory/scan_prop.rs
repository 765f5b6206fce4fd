//! Dynamic scan propagation: move scan returns with the gap points that
//! bracket them.

use crate::config::PlannerConfig;
use crate::types::{cross, normalize_angle, GapPointState, Scan, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedScanSet {
    pub scans: Vec<Scan>,
    /// Per-beam `(β̇, ṙ)`.
    pub rates: Vec<(f64, f64)>,
    pub dt: f64,
    /// Cartesian returns of each scan, max-range beams excluded.
    pub points: Vec<Vec<Vec2>>,
}

impl PropagatedScanSet {
    /// Index of the propagated scan nearest in time to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        ((t / self.dt).round().max(0.0) as usize).min(self.scans.len() - 1)
    }
}

/// Two points are similar when both move faster than `v_min` in roughly the
/// same direction.
pub fn is_similar(a: &GapPointState, b: &GapPointState, v_min: f64) -> bool {
    a.v.norm() >= v_min && b.v.norm() >= v_min && a.v.dot(&b.v) > 0.0
}

fn polar_rates(p: &GapPointState) -> (f64, f64) {
    let r = p.p.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    (cross(&p.p, &p.v) / (r * r), p.p.dot(&p.v) / r)
}

pub fn returns_of(scan: &Scan) -> Vec<Vec2> {
    (0..scan.len())
        .filter(|&i| !scan.is_max(i))
        .map(|i| scan.point(i))
        .collect()
}

/// `points` carry world-frame velocities in the frozen ego frame.
pub fn propagate_scan(
    scan: &Scan,
    points: &[GapPointState],
    cfg: &PlannerConfig,
) -> PropagatedScanSet {
    let n = scan.len();
    let mut rates = vec![(0.0, 0.0); n];

    if !points.is_empty() {
        let mut sorted: Vec<&GapPointState> = points.iter().collect();
        sorted.sort_by(|a, b| a.bearing().total_cmp(&b.bearing()));
        let bearings: Vec<f64> = sorted.iter().map(|p| p.bearing()).collect();
        let m = sorted.len();
        for (i, rate) in rates.iter_mut().enumerate() {
            if scan.is_max(i) {
                continue;
            }
            let b = scan.beam_bearing(i);
            let k = bearings.partition_point(|&x| x <= b);
            let cw = sorted[(k + m - 1) % m];
            let ccw = sorted[k % m];
            if is_similar(cw, ccw, cfg.v_min) {
                let (a1, r1) = polar_rates(cw);
                let (a2, r2) = polar_rates(ccw);
                *rate = ((a1 + a2) / 2.0, (r1 + r2) / 2.0);
            }
        }
    }

    let steps = cfg.n_steps();
    let mut scans = Vec::with_capacity(steps + 1);
    scans.push(scan.clone());
    for k in 1..=steps {
        let t = k as f64 * cfg.dt;
        let mut ranges = vec![scan.range_max; n];
        for (i, &(db, dr)) in rates.iter().enumerate() {
            if scan.is_max(i) {
                continue;
            }
            let (j, r) = if db == 0.0 && dr == 0.0 {
                (i, scan.ranges[i])
            } else {
                let beta = normalize_angle(scan.beam_bearing(i) + db * t);
                (scan.index_of(beta), (scan.ranges[i] + dr * t).max(1e-3))
            };
            if r < ranges[j] {
                ranges[j] = r;
            }
        }
        scans.push(Scan {
            ranges,
            stamp: scan.stamp + t,
            ..scan.clone()
        });
    }
    let pts = scans.iter().map(returns_of).collect();
    PropagatedScanSet {
        scans,
        rates,
        dt: cfg.dt,
        points: pts,
    }
}
