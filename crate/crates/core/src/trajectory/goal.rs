//! Gap goal placement.

use std::f64::consts::PI;

use crate::config::PlannerConfig;
use crate::error::DomainError;
use crate::manipulation::reduce_span;
use crate::types::{bearing_unchecked, Gap, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapGoal {
    pub p: Vec2,
    pub v: Vec2,
    pub kappa: f64,
}

/// Goal on the chord of `g` closest to the waypoint `p_star`; the chord
/// midpoint when no waypoint is given. Gaps wider than π are first reduced
/// to a `reduced_span`-wide sub-gap facing the waypoint. Ungap goals are
/// pulled toward the ego by `r_infl`.
pub fn place_gap_goal(
    g: &Gap,
    p_star: Option<&Vec2>,
    is_ungap: bool,
    cfg: &PlannerConfig,
) -> Result<GapGoal, DomainError> {
    let g = if g.span() > PI {
        let toward = match p_star {
            Some(p) => bearing_unchecked(p),
            None => g.right.bearing() + g.span() / 2.0,
        };
        reduce_span(g, toward, cfg.reduced_span)
    } else {
        g.clone()
    };
    let d = g.left.p - g.right.p;
    let len2 = d.norm_squared();
    if len2 < 1e-18 {
        return Err(DomainError::DegenerateGap);
    }
    let kappa = match p_star {
        Some(p) => ((p - g.right.p).dot(&d) / len2).clamp(cfg.kappa_margin, 1.0 - cfg.kappa_margin),
        None => 0.5,
    };
    let mut p = g.left.p * kappa + g.right.p * (1.0 - kappa);
    let v = g.left.v * kappa + g.right.v * (1.0 - kappa);
    if is_ungap {
        let r = p.norm();
        if r > cfg.r_infl() {
            p *= (r - cfg.r_infl()) / r;
        }
    }
    Ok(GapGoal { p, v, kappa })
}
