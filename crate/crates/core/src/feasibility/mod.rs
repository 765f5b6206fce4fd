//! Gap tube construction and parallel-navigation feasibility.

pub mod pn;
pub mod propagate;

pub use pn::{pn_feasibility, FeasibilityResult, Reason};
pub use propagate::{
    associate_propagated_gaps, extract_propagated_gaps, gap_distance, propagate_frames,
    propagate_gap_points, PropagatedFrame, Propagation,
};

use crate::config::PlannerConfig;
use crate::trajectory::goal::{place_gap_goal, GapGoal};
use crate::types::{polar, GapTube, Vec2};

/// Constant-velocity motion over one tube segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMotion {
    pub segment: usize,
    pub start: f64,
    pub end: f64,
    pub p0: Vec2,
    pub vel: Vec2,
    pub goal: Option<GapGoal>,
    pub feas: Option<FeasibilityResult>,
}

impl SegmentMotion {
    pub fn position_at(&self, t: f64) -> Vec2 {
        self.p0 + self.vel * (t.clamp(self.start, self.end) - self.start)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeEvaluation {
    pub feasible: bool,
    pub reason: Reason,
    pub motions: Vec<SegmentMotion>,
    /// Time the final goal is reached, when inside the horizon.
    pub t_intercept: Option<f64>,
    pub idle_time: f64,
}

impl TubeEvaluation {
    fn reject(reason: Reason, motions: Vec<SegmentMotion>) -> Self {
        TubeEvaluation {
            feasible: false,
            reason,
            motions,
            t_intercept: None,
            idle_time: 0.0,
        }
    }

    pub fn gamma_e(&self) -> f64 {
        self.motions
            .iter()
            .find_map(|m| m.feas.map(|f| f.gamma_e))
            .unwrap_or(0.0)
    }

    pub fn end_time(&self) -> f64 {
        self.motions.last().map_or(0.0, |m| m.end)
    }

    pub fn position_at(&self, t: f64) -> Vec2 {
        match self.motions.iter().find(|m| t <= m.end) {
            Some(m) => m.position_at(t),
            None => self
                .motions
                .last()
                .map_or(Vec2::zeros(), |m| m.position_at(m.end)),
        }
    }
}

/// Evaluate every available segment of a tube in order, starting each from
/// where the previous one left the robot. A segment must be intercepted
/// before it ends only when no later segment reopens the gap. Unavailable
/// segments hold the robot in place. With `require_intercept` the final goal
/// must also be reached within the horizon.
pub fn tube_feasible(
    tube: &GapTube,
    p_star: Option<&Vec2>,
    require_intercept: bool,
    cfg: &PlannerConfig,
) -> TubeEvaluation {
    let segs = &tube.segments;
    let Some(last_avail) = segs.iter().rposition(|s| s.gap.available) else {
        return TubeEvaluation::reject(Reason::ClosesBeforeIntercept, Vec::new());
    };
    let mut pos = Vec2::zeros();
    let mut motions = Vec::new();
    let mut idle = 0.0;
    let mut t_intercept = None;

    for (k, seg) in segs.iter().enumerate() {
        if !seg.gap.available {
            idle += seg.duration;
            motions.push(SegmentMotion {
                segment: k,
                start: seg.start,
                end: seg.end(),
                p0: pos,
                vel: Vec2::zeros(),
                goal: None,
                feas: None,
            });
            continue;
        }
        let goal = match place_gap_goal(&seg.gap, p_star, false, cfg) {
            Ok(g) => g,
            Err(_) => return TubeEvaluation::reject(Reason::SpeedLimited, motions),
        };
        let closes_after = k == last_avail && k + 1 < segs.len();
        let deadline = if closes_after {
            seg.duration
        } else {
            f64::INFINITY
        };
        let res = pn_feasibility(&(goal.p - pos), &goal.v, cfg.v_e, deadline);
        if !res.feasible {
            return TubeEvaluation::reject(res.reason, motions);
        }
        let vel = polar(cfg.v_e, res.gamma_e);
        let hit = seg.start + res.t_intercept;
        let end = hit.min(seg.end());
        motions.push(SegmentMotion {
            segment: k,
            start: seg.start,
            end,
            p0: pos,
            vel,
            goal: Some(goal),
            feas: Some(res),
        });
        pos += vel * (end - seg.start);
        if hit <= seg.end() {
            t_intercept = Some(hit);
            break;
        }
    }

    if require_intercept && t_intercept.is_none() {
        return TubeEvaluation::reject(Reason::SpeedLimited, motions);
    }
    TubeEvaluation {
        feasible: true,
        reason: Reason::Ok,
        motions,
        t_intercept,
        idle_time: idle,
    }
}

/// Pursue a single goal over the horizon with no deadline.
pub fn evaluate_goal(goal: &GapGoal, cfg: &PlannerConfig) -> TubeEvaluation {
    let horizon = cfg.n_steps() as f64 * cfg.dt;
    let res = pn_feasibility(&goal.p, &goal.v, cfg.v_e, f64::INFINITY);
    if !res.feasible {
        return TubeEvaluation::reject(res.reason, Vec::new());
    }
    let vel = polar(cfg.v_e, res.gamma_e);
    let end = res.t_intercept.min(horizon);
    TubeEvaluation {
        feasible: true,
        reason: Reason::Ok,
        motions: vec![SegmentMotion {
            segment: 0,
            start: 0.0,
            end,
            p0: Vec2::zeros(),
            vel,
            goal: Some(*goal),
            feas: Some(res),
        }],
        t_intercept: (res.t_intercept <= horizon).then_some(res.t_intercept),
        idle_time: 0.0,
    }
}
