//! Parallel navigation toward a constant-velocity goal.

use crate::types::{bearing_unchecked, normalize_angle, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Reason {
    Ok,
    SpeedLimited,
    ClosesBeforeIntercept,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub theta_e: f64,
    pub gamma_e: f64,
    pub t_intercept: f64,
    pub reason: Reason,
}

impl FeasibilityResult {
    fn infeasible(reason: Reason) -> Self {
        FeasibilityResult {
            feasible: false,
            theta_e: f64::NAN,
            gamma_e: f64::NAN,
            t_intercept: f64::INFINITY,
            reason,
        }
    }
}

/// Heading and intercept time for a pursuer at the origin moving at `v_e`
/// toward a goal at `p_g` moving at `v_g`, with the line of sight held fixed.
///
/// `t_f` is the latest acceptable intercept time.
pub fn pn_feasibility(p_g: &Vec2, v_g: &Vec2, v_e: f64, t_f: f64) -> FeasibilityResult {
    let r0 = p_g.norm();
    let beta_g = bearing_unchecked(p_g);
    let vg = v_g.norm();
    if r0 == 0.0 {
        return FeasibilityResult {
            feasible: true,
            theta_e: 0.0,
            gamma_e: beta_g,
            t_intercept: 0.0,
            reason: Reason::Ok,
        };
    }

    let (theta_e, t_int) = if vg == 0.0 {
        (0.0, r0 / v_e)
    } else {
        let theta_g = normalize_angle(bearing_unchecked(v_g) - beta_g);
        let k = v_e / vg;
        let s = theta_g.sin() / k;
        if s.abs() > 1.0 {
            return FeasibilityResult::infeasible(Reason::SpeedLimited);
        }
        let lim = theta_g.cos() / k;
        let t1 = s.asin();
        let t2 = normalize_angle(std::f64::consts::PI - t1);
        let theta_e = if t1.cos() > lim {
            t1
        } else if t2.cos() > lim {
            t2
        } else {
            return FeasibilityResult::infeasible(Reason::SpeedLimited);
        };
        (theta_e, (r0 / vg) / (k * theta_e.cos() - theta_g.cos()))
    };

    let gamma_e = normalize_angle(theta_e + beta_g);
    if t_int > t_f {
        return FeasibilityResult {
            feasible: false,
            theta_e,
            gamma_e,
            t_intercept: t_int,
            reason: Reason::ClosesBeforeIntercept,
        };
    }
    FeasibilityResult {
        feasible: true,
        theta_e,
        gamma_e,
        t_intercept: t_int,
        reason: Reason::Ok,
    }
}
