//! Trajectory scoring against propagated scans.

use crate::config::PlannerConfig;
use crate::trajectory::scan_prop::PropagatedScanSet;
use crate::types::{Cost, Trajectory, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTrajectory {
    pub traj: Trajectory,
    pub cost: Cost,
    pub terminal_cost: f64,
    pub mean_pose_cost: Cost,
}

/// Obstacle cost of a clearance `d`.
pub fn clearance_cost(d: f64, cfg: &PlannerConfig) -> Cost {
    let r_infl = cfg.r_infl();
    if d <= r_infl {
        Cost::Infinite
    } else if d < cfg.r_max_penalty {
        Cost::Finite(cfg.c_obs * (-cfg.w_2 * (d - r_infl)).exp())
    } else {
        Cost::Finite(0.0)
    }
}

pub fn nearest_distance(p: &Vec2, returns: &[Vec2]) -> f64 {
    returns
        .iter()
        .map(|q| (p - q).norm())
        .fold(f64::INFINITY, f64::min)
}

pub fn cost_at_pose(p: &Vec2, returns: &[Vec2], cfg: &PlannerConfig) -> Cost {
    clearance_cost(nearest_distance(p, returns), cfg)
}

/// Terminal distance to the waypoint plus the mean obstacle cost of poses
/// 1..N, each against the scan nearest in time.
pub fn score_trajectory(
    traj: &Trajectory,
    scans: &PropagatedScanSet,
    p_star: &Vec2,
    cfg: &PlannerConfig,
) -> ScoredTrajectory {
    let Some(last) = traj.poses.last() else {
        return ScoredTrajectory {
            traj: traj.clone(),
            cost: Cost::Infinite,
            terminal_cost: f64::INFINITY,
            mean_pose_cost: Cost::Infinite,
        };
    };
    let terminal = cfg.w * (last.p - p_star).norm();
    let rest = &traj.poses[1.min(traj.poses.len() - 1)..];
    let rest = if traj.poses.len() == 1 {
        &traj.poses[..0]
    } else {
        rest
    };
    let mut sum = Cost::Finite(0.0);
    for pose in rest {
        sum = sum + cost_at_pose(&pose.p, &scans.points[scans.index_at(pose.t)], cfg);
        if sum.is_infinite() {
            break;
        }
    }
    let mean = match sum {
        Cost::Finite(s) if !rest.is_empty() => Cost::Finite(s / rest.len() as f64),
        Cost::Finite(_) => Cost::Finite(0.0),
        Cost::Infinite => Cost::Infinite,
    };
    ScoredTrajectory {
        traj: traj.clone(),
        cost: Cost::Finite(terminal) + mean,
        terminal_cost: terminal,
        mean_pose_cost: mean,
    }
}

/// Relative-velocity penalty against moving agents `(p_h, v_h)`, averaged
/// over poses.
pub fn social_cost(traj: &Trajectory, agents: &[(Vec2, Vec2)]) -> Cost {
    if agents.is_empty() || traj.poses.is_empty() {
        return Cost::Finite(0.0);
    }
    let mut total = 0.0;
    for pose in &traj.poses {
        for (p_h, v_h) in agents {
            let rel = (p_h + v_h * pose.t) - pose.p;
            let d = rel.norm();
            if d == 0.0 {
                return Cost::Infinite;
            }
            let v_rel = pose.v - v_h;
            total += (v_rel.dot(&rel).max(0.0) + pose.v.norm()) / d;
        }
    }
    Cost::Finite(total / traj.poses.len() as f64)
}
