//! Gap detection, simplification and ungap detection on a single scan.

use crate::config::PlannerConfig;
use crate::types::{Gap, GapKind, GapPointState, Scan, Side, Ungap, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct RawGapSet {
    pub gaps: Vec<Gap>,
    pub stamp: f64,
}

fn endpoint(scan: &Scan, i: usize, side: Side) -> GapPointState {
    GapPointState::new(scan.point(i), side, i as u64)
}

/// Find radial gaps (range jumps between neighbouring beams) and swept gaps
/// (runs of max-range beams).
pub fn detect_gaps(scan: &Scan, cfg: &PlannerConfig) -> RawGapSet {
    let n = scan.len();
    let mut gaps = Vec::new();

    if (0..n).all(|i| scan.is_max(i)) {
        gaps.push(Gap::new(
            endpoint(scan, 0, Side::Right),
            endpoint(scan, 0, Side::Left),
            GapKind::Swept,
        ));
        return RawGapSet {
            gaps,
            stamp: scan.stamp,
        };
    }

    // Start the cyclic walk on a finite beam so every max run is seen whole.
    let start = (0..n).find(|&i| !scan.is_max(i)).unwrap();
    let mut k = 0;
    while k < n {
        let i = (start + k) % n;
        let j = (i + 1) % n;
        if scan.is_max(j) {
            let mut len = 0;
            while scan.is_max((j + len) % n) {
                len += 1;
            }
            let after = (j + len) % n;
            if len >= cfg.swept_min_beams {
                gaps.push(Gap::new(
                    endpoint(scan, i, Side::Right),
                    endpoint(scan, after, Side::Left),
                    GapKind::Swept,
                ));
            } else if (scan.ranges[after] - scan.ranges[i]).abs() > cfg.tau_radial {
                // Short runs are bridged and judged as a radial jump.
                gaps.push(Gap::new(
                    endpoint(scan, i, Side::Right),
                    endpoint(scan, after, Side::Left),
                    GapKind::Radial,
                ));
            }
            k += len + 1;
            continue;
        }
        if (scan.ranges[j] - scan.ranges[i]).abs() > cfg.tau_radial {
            gaps.push(Gap::new(
                endpoint(scan, i, Side::Right),
                endpoint(scan, j, Side::Left),
                GapKind::Radial,
            ));
        }
        k += 1;
    }

    sort_ccw(&mut gaps);
    RawGapSet {
        gaps,
        stamp: scan.stamp,
    }
}

pub fn sort_ccw(gaps: &mut [Gap]) {
    gaps.sort_by(|a, b| a.right.bearing().total_cmp(&b.right.bearing()));
}

/// Whether a gap leaves room for the inflated robot.
pub fn admits_passage(g: &Gap, r_infl: f64) -> bool {
    g.span() >= std::f64::consts::PI || g.chord() >= 2.0 * r_infl
}

/// Merge gaps split by thin obstacles, then drop gaps too narrow to enter.
pub fn simplify_gaps(raw: &RawGapSet, cfg: &PlannerConfig) -> Vec<Gap> {
    let r_infl = cfg.r_infl();
    let mut gaps = raw.gaps.clone();

    loop {
        let n = gaps.len();
        if n < 2 {
            break;
        }
        let pick = (0..n).find(|&i| {
            let j = (i + 1) % n;
            (gaps[i].left.p - gaps[j].right.p).norm() < 2.0 * r_infl
        });
        let Some(i) = pick else { break };
        let j = (i + 1) % n;
        let kind = if gaps[i].kind == GapKind::Swept || gaps[j].kind == GapKind::Swept {
            GapKind::Swept
        } else {
            GapKind::Radial
        };
        let merged = Gap::new(gaps[i].right.clone(), gaps[j].left.clone(), kind);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        gaps.remove(hi);
        gaps.remove(lo);
        gaps.push(merged);
        sort_ccw(&mut gaps);
    }

    gaps.retain(|g| admits_passage(g, r_infl));
    gaps
}

/// The three ungap inequalities on world-frame velocities. `None` when the
/// pair is not a co-moving dynamic obstacle; otherwise whether it recedes.
pub fn ungap_test(p_i: &Vec2, v_i: &Vec2, p_j: &Vec2, v_j: &Vec2, v_min: f64) -> Option<bool> {
    if v_i.norm() < v_min || v_j.norm() < v_min {
        return None;
    }
    if v_i.dot(v_j) <= 0.0 {
        return None;
    }
    Some(p_i.dot(v_i) > 0.0 && p_j.dot(v_j) > 0.0)
}

/// Pair the left point of each gap with the right point of the next one and
/// keep the pairs that move together. `ego_v` converts relative velocities to
/// world velocities. Ungap ids are written back onto the gap points.
pub fn detect_ungaps(gaps: &mut [Gap], ego_v: &Vec2, cfg: &PlannerConfig) -> Vec<Ungap> {
    let n = gaps.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut next_id = 0u32;
    for i in 0..n {
        let j = (i + 1) % n;
        let pi = &gaps[i].left;
        let pj = &gaps[j].right;
        let vi = pi.v + ego_v;
        let vj = pj.v + ego_v;
        if let Some(receding) = ungap_test(&pi.p, &vi, &pj.p, &vj, cfg.v_min) {
            let id = next_id;
            next_id += 1;
            gaps[i].left.ungap_id = Some(id);
            gaps[j].right.ungap_id = Some(id);
            out.push(Ungap {
                id,
                left_of_prev: gaps[i].left.clone(),
                right_of_next: gaps[j].right.clone(),
                receding,
            });
        }
    }
    out
}
