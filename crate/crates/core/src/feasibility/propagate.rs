//! Gap point propagation over the horizon and assembly of gap tubes.

use crate::config::PlannerConfig;
use crate::tracking::solve_assignment;
use crate::types::{
    ccw_span, normalize_angle, EgoState, Gap, GapKind, GapPointState, GapTube, Side, TubeSegment,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedFrame {
    pub t_k: f64,
    pub gaps: Vec<Gap>,
    pub points: Vec<GapPointState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairing {
    pub right: usize,
    pub left: usize,
    pub available: bool,
}

/// Pair CCW-sorted points into gaps. Starting at the first right point, each
/// unassigned point is paired with the next unassigned point when their sides
/// differ and they do not bound the same ungap. Right then left is an
/// available gap; left then right is a gap closed by crossing obstacles.
pub fn extract_pairs(points: &[GapPointState]) -> Vec<Pairing> {
    match points.iter().position(|p| p.side == Side::Right) {
        Some(i0) => extract_pairs_from(points, i0),
        None => Vec::new(),
    }
}

/// [`extract_pairs`] starting the sweep at point `i0`.
pub fn extract_pairs_from(points: &[GapPointState], i0: usize) -> Vec<Pairing> {
    let n = points.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for a in 0..n {
        let i = (i0 + a) % n;
        if assigned[i] {
            continue;
        }
        let Some(j) = (1..n).map(|d| (i + d) % n).find(|&c| !assigned[c]) else {
            break;
        };
        let (pi, pj) = (&points[i], &points[j]);
        let same_ungap = pi.ungap_id.is_some() && pi.ungap_id == pj.ungap_id;
        if pi.side == pj.side || same_ungap {
            continue;
        }
        assigned[i] = true;
        assigned[j] = true;
        out.push(match pi.side {
            Side::Right => Pairing {
                right: i,
                left: j,
                available: true,
            },
            Side::Left => Pairing {
                right: j,
                left: i,
                available: false,
            },
        });
    }
    out
}

pub fn extract_propagated_gaps(points: &[GapPointState]) -> Vec<Gap> {
    extract_pairs(points)
        .into_iter()
        .map(|p| Gap {
            right: points[p.right].clone(),
            left: points[p.left].clone(),
            kind: GapKind::Swept,
            available: p.available,
        })
        .collect()
}

/// Sum of squared endpoint displacements between two gaps.
pub fn gap_distance(a: &Gap, b: &Gap) -> f64 {
    (a.left.p - b.left.p).norm_squared() + (a.right.p - b.right.p).norm_squared()
}

pub fn associate_propagated_gaps(prev: &[Gap], curr: &[Gap]) -> Vec<(usize, usize)> {
    let cost: Vec<Vec<f64>> = prev
        .iter()
        .map(|a| curr.iter().map(|b| gap_distance(a, b)).collect())
        .collect();
    solve_assignment(&cost)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub frames: Vec<PropagatedFrame>,
    pub tubes: Vec<GapTube>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GapKey {
    right: usize,
    left: usize,
    available: bool,
}

struct TubeBuild {
    segments: Vec<TubeSegment>,
    key: GapKey,
    latest: Gap,
    alive: bool,
}

fn sorted_order(points: &[GapPointState]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let side = |p: &GapPointState| (p.side == Side::Left) as u8;
        points[a]
            .bearing()
            .total_cmp(&points[b].bearing())
            .then(side(&points[a]).cmp(&side(&points[b])))
            .then(a.cmp(&b))
    });
    order
}

/// Pairing of the sorted points that keeps the most point pairs of the
/// previous step. Ties go to the sweep from the first right point.
fn preserving_pairs(
    sorted: &[GapPointState],
    order: &[usize],
    prev: &[(usize, usize)],
) -> Vec<Pairing> {
    let kept = |pairs: &[Pairing]| {
        pairs
            .iter()
            .filter(|p| prev.contains(&(order[p.right], order[p.left])))
            .count()
    };
    let mut best = extract_pairs(sorted);
    let mut best_kept = kept(&best);
    if best_kept == prev.len() {
        return best;
    }
    for i0 in (0..sorted.len()).filter(|&i| sorted[i].side == Side::Right) {
        let cand = extract_pairs_from(sorted, i0);
        let c = kept(&cand);
        if c > best_kept {
            best = cand;
            best_kept = c;
        }
    }
    best
}

/// Propagate manipulated gaps with their world-frame velocities in the ego
/// frame frozen at planning time, and group the extracted gaps into tubes.
/// Tube gaps carry world-frame (gap-only) velocities.
pub fn propagate_frames(manip: &[Gap], ego: &EgoState, cfg: &PlannerConfig) -> Propagation {
    if manip.is_empty() {
        return Propagation {
            frames: Vec::new(),
            tubes: Vec::new(),
        };
    }
    let base: Vec<GapPointState> = manip
        .iter()
        .flat_map(|g| [g.right.clone(), g.left.clone()])
        .map(|mut p| {
            p.v += ego.v;
            p
        })
        .collect();
    let n_pts = base.len();
    let beta0: Vec<f64> = base.iter().map(|p| p.bearing()).collect();
    let mut winding = vec![0.0; n_pts];
    let mut prev_beta = beta0.clone();

    let n_steps = cfg.n_steps();
    let horizon = n_steps as f64 * cfg.dt;
    let mut frames = Vec::with_capacity(n_steps + 1);
    let mut builds: Vec<TubeBuild> = Vec::new();
    let mut prev_keys: Vec<(usize, usize)> = Vec::new();

    for k in 0..=n_steps {
        let t = k as f64 * cfg.dt;
        let pts: Vec<GapPointState> = base
            .iter()
            .map(|p| {
                let mut q = p.clone();
                if k > 0 {
                    q.p = p.p + p.v * t;
                }
                q
            })
            .collect();
        for i in 0..n_pts {
            let b = pts[i].bearing();
            winding[i] += normalize_angle(b - prev_beta[i]);
            prev_beta[i] = b;
        }

        let order = sorted_order(&pts);
        let sorted: Vec<GapPointState> = order.iter().map(|&i| pts[i].clone()).collect();
        let mut keys = Vec::new();
        let mut gaps = Vec::new();
        let pairs = if k == 0 {
            (0..manip.len())
                .map(|g| Pairing {
                    right: 2 * g,
                    left: 2 * g + 1,
                    available: true,
                })
                .collect()
        } else {
            preserving_pairs(&sorted, &order, &prev_keys)
        };
        for pr in pairs {
            let (r, l) = if k == 0 {
                (pr.right, pr.left)
            } else {
                (order[pr.right], order[pr.left])
            };
            let mut available = pr.available;
            if available {
                // Points that wound past each other close the gap even when
                // the cyclic order alone cannot tell.
                let s = ccw_span(beta0[r], beta0[l]) + winding[l] - winding[r];
                available = s > 0.0 && s <= 2.0 * std::f64::consts::PI;
            }
            keys.push(GapKey {
                right: r,
                left: l,
                available,
            });
            gaps.push(Gap {
                right: pts[r].clone(),
                left: pts[l].clone(),
                kind: GapKind::Swept,
                available,
            });
        }

        prev_keys = keys.iter().map(|k| (k.right, k.left)).collect();
        if k == 0 {
            for (key, g) in keys.iter().zip(&gaps) {
                builds.push(TubeBuild {
                    segments: vec![TubeSegment {
                        gap: g.clone(),
                        start: 0.0,
                        duration: 0.0,
                    }],
                    key: *key,
                    latest: g.clone(),
                    alive: true,
                });
            }
        } else {
            let alive: Vec<usize> = (0..builds.len()).filter(|&i| builds[i].alive).collect();
            let prev: Vec<Gap> = alive.iter().map(|&i| builds[i].latest.clone()).collect();
            let matches = associate_propagated_gaps(&prev, &gaps);
            let mut matched = vec![false; alive.len()];
            for (a, j) in matches {
                matched[a] = true;
                let b = &mut builds[alive[a]];
                if b.key != keys[j] {
                    b.segments.push(TubeSegment {
                        gap: gaps[j].clone(),
                        start: t,
                        duration: 0.0,
                    });
                    b.key = keys[j];
                }
                b.latest = gaps[j].clone();
            }
            for (a, &bi) in alive.iter().enumerate() {
                if matched[a] {
                    continue;
                }
                let b = &mut builds[bi];
                let mut g = b.latest.clone();
                g.available = false;
                if b.key.available {
                    b.segments.push(TubeSegment {
                        gap: g,
                        start: t,
                        duration: 0.0,
                    });
                }
                b.alive = false;
            }
        }

        frames.push(PropagatedFrame {
            t_k: t,
            gaps,
            points: sorted,
        });
    }

    let tubes = builds
        .into_iter()
        .map(|b| {
            let mut segs = b.segments;
            let m = segs.len();
            for i in 0..m {
                let end = if i + 1 < m {
                    segs[i + 1].start
                } else {
                    horizon
                };
                segs[i].duration = end - segs[i].start;
            }
            GapTube {
                segments: segs,
                horizon,
            }
        })
        .collect();

    Propagation { frames, tubes }
}

pub fn propagate_gap_points(manip: &[Gap], ego: &EgoState, cfg: &PlannerConfig) -> Vec<GapTube> {
    propagate_frames(manip, ego, cfg).tubes
}
