//! Trajectory tracking and the projection-operator safety filter.

use crate::config::PlannerConfig;
use crate::types::{Scan, Trajectory, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Command {
    pub v: Vec2,
    pub omega: f64,
}

/// Proportional feedback on the desired pose plus velocity feed-forward,
/// clamped componentwise. `p_ego` is in the trajectory's frame.
pub fn track_trajectory(traj: &Trajectory, p_ego: &Vec2, t: f64, cfg: &PlannerConfig) -> Command {
    let des = traj.sample(t.clamp(0.0, traj.duration()));
    let des_v = if t > traj.duration() {
        Vec2::zeros()
    } else {
        des.v
    };
    let u = (des.p - p_ego) * cfg.k_p + des_v;
    Command {
        v: Vec2::new(
            u.x.clamp(-cfg.v_max, cfg.v_max),
            u.y.clamp(-cfg.v_max, cfg.v_max),
        ),
        omega: 0.0,
    }
}

/// Blending weight of the filter at clearance `d`.
pub fn projection_weight(d: f64, cfg: &PlannerConfig) -> f64 {
    let (r_min, r_nom) = (cfg.r_min_po, cfg.r_nom_po);
    ((r_min / d - r_min / r_nom) / (1.0 - r_min / r_nom)).clamp(0.0, 1.0)
}

/// Attenuate the command component pointing at the nearest scan return.
pub fn projection_operator_filter(u: &Command, scan: &Scan, cfg: &PlannerConfig) -> Command {
    let nearest = (0..scan.len())
        .filter(|&i| !scan.is_max(i))
        .min_by(|&a, &b| scan.ranges[a].total_cmp(&scan.ranges[b]));
    let Some(i) = nearest else { return *u };
    let d = scan.ranges[i];
    let n = scan.point(i) / d;
    let inward = u.v.dot(&n);
    if inward <= 0.0 {
        return *u;
    }
    let psi = projection_weight(d, cfg);
    Command {
        v: u.v - n * (psi * inward),
        omega: u.omega,
    }
}
