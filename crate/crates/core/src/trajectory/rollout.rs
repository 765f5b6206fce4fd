//! Sampling tube evaluations into timestamped trajectories.

use crate::config::PlannerConfig;
use crate::feasibility::TubeEvaluation;
use crate::types::{Pose, TrajSource, Trajectory, Vec2};

/// Poses on the planning grid up to the end of the evaluated motion, plus the
/// exact intercept pose when it falls between grid points.
pub fn rollout_pn_trajectory(
    eval: &TubeEvaluation,
    source: TrajSource,
    cfg: &PlannerConfig,
) -> Trajectory {
    let t_end = eval.end_time();
    let mut poses = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * cfg.dt;
        if t > t_end - 1e-9 {
            break;
        }
        poses.push(Pose {
            t,
            p: eval.position_at(t),
            v: velocity_at(eval, t),
        });
        k += 1;
    }
    let last = eval.motions.last().map_or(Vec2::zeros(), |m| m.vel);
    poses.push(Pose {
        t: t_end,
        p: eval.position_at(t_end),
        v: last,
    });
    if poses.len() > 1 && poses[0].t == poses[1].t {
        poses.remove(0);
    }
    Trajectory {
        poses,
        source,
        gamma_e: eval.gamma_e(),
        t_intercept: eval.t_intercept,
    }
}

/// Continue a trajectory past its last pose at constant velocity `v` up to
/// `horizon`, keeping station with a moving goal.
pub fn extend_at_velocity(traj: &mut Trajectory, v: &Vec2, horizon: f64, cfg: &PlannerConfig) {
    let Some(last) = traj.poses.last().cloned() else {
        return;
    };
    if v.norm() > cfg.v_max + 1e-9 {
        return;
    }
    if let Some(q) = traj.poses.last_mut() {
        q.v = *v;
    }
    let mut k = (last.t / cfg.dt).floor() as usize + 1;
    loop {
        let t = (k as f64 * cfg.dt).min(horizon);
        if t <= last.t + 1e-9 {
            break;
        }
        traj.poses.push(Pose {
            t,
            p: last.p + v * (t - last.t),
            v: *v,
        });
        if t >= horizon {
            break;
        }
        k += 1;
    }
}

fn velocity_at(eval: &TubeEvaluation, t: f64) -> Vec2 {
    eval.motions
        .iter()
        .find(|m| t >= m.start && t < m.end)
        .map_or(Vec2::zeros(), |m| m.vel)
}
