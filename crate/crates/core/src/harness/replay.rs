//! Frame-indexed geometry for offline plotting.

use serde::{Deserialize, Serialize};

use crate::harness::monte_carlo::{TrialOutcome, TrialRecord};
use crate::sim::episode::{PlanRecord, TraceRow};
use crate::types::{rotate, Vec2};

/// World-frame planner geometry at one planning tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanGeometry {
    pub tick: usize,
    pub active: String,
    /// Gap arcs as `[right, left]` endpoint pairs.
    pub gaps: Vec<[[f64; 2]; 2]>,
    pub ungaps: Vec<[[f64; 2]; 2]>,
    pub tube_segments: Vec<usize>,
    pub candidates: Vec<Vec<[f64; 2]>>,
    pub trajectory: Vec<[f64; 2]>,
    pub waypoint: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayFrame {
    pub index: usize,
    pub row: TraceRow,
    pub plan: Option<PlanGeometry>,
}

fn to_world(ego: &[f64; 3], p: &[f64; 2]) -> [f64; 2] {
    let w = rotate(&Vec2::new(p[0], p[1]), ego[2]) + Vec2::new(ego[0], ego[1]);
    [w.x, w.y]
}

pub fn plan_geometry(r: &PlanRecord) -> PlanGeometry {
    let w = |p: &[f64; 2]| to_world(&r.ego, p);
    PlanGeometry {
        tick: r.tick,
        active: r.active.clone(),
        gaps: r.gaps.iter().map(|g| [w(&g.right), w(&g.left)]).collect(),
        ungaps: r.ungaps.iter().map(|u| [w(&u.right), w(&u.left)]).collect(),
        tube_segments: r.tubes.iter().map(|t| t.len()).collect(),
        candidates: r
            .candidates
            .iter()
            .map(|c| c.poses.iter().map(&w).collect())
            .collect(),
        trajectory: r.trajectory.iter().map(|q| w(&[q[1], q[2]])).collect(),
        waypoint: w(&r.p_star),
    }
}

/// One frame per trace row. A plan computed at time `t` is attached to the
/// first row stamped after `t`.
pub fn replay_episode(trace: &[TraceRow], plans: &[PlanRecord]) -> Vec<ReplayFrame> {
    let mut next = 0;
    trace
        .iter()
        .enumerate()
        .map(|(index, row)| {
            let plan = if next < plans.len() && plans[next].t < row.t {
                next += 1;
                Some(plan_geometry(&plans[next - 1]))
            } else {
                None
            };
            ReplayFrame {
                index,
                row: row.clone(),
                plan,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialGeometry {
    pub index: usize,
    pub outcome: TrialOutcome,
    /// `[right, left]` endpoints at t = 0.
    pub gap: [[f64; 2]; 2],
    pub inflated: Option<[[f64; 2]; 2]>,
    pub rollout: Vec<[f64; 2]>,
}

pub fn replay_trials(trials: &[TrialRecord]) -> Vec<TrialGeometry> {
    let xy = |p: &Vec2| [p.x, p.y];
    trials
        .iter()
        .map(|t| TrialGeometry {
            index: t.index,
            outcome: t.outcome,
            gap: [xy(&t.sample.p_r), xy(&t.sample.p_l)],
            inflated: t.inflated.map(|[r, l]| [xy(&r), xy(&l)]),
            rollout: t.rollout.iter().map(|q| [q[1], q[2]]).collect(),
        })
        .collect()
}
