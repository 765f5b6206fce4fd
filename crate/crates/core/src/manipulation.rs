//! Gap manipulation: radial-to-swept conversion, inflation and span reduction.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::config::PlannerConfig;
use crate::error::DomainError;
use crate::types::{ccw_span, normalize_angle, polar, Gap, GapKind, GapPointState, Side, Vec2};

/// Pivot a radial gap about its nearer endpoint so both endpoints sit at the
/// nearer range. The pivot is capped at a quarter turn.
pub fn convert_radial_gap(g: &Gap) -> Gap {
    if g.kind != GapKind::Radial || g.left.ungap_id.is_some() || g.right.ungap_id.is_some() {
        return g.clone();
    }
    let left_far = g.left.range() > g.right.range();
    let (near, far) = if left_far {
        (&g.right, &g.left)
    } else {
        (&g.left, &g.right)
    };
    let r_n = near.range();
    let chord = (far.p - near.p).norm();
    let delta = 2.0 * (chord / (2.0 * r_n)).min(FRAC_PI_4.sin()).asin();
    let beta = if left_far {
        near.bearing() + delta
    } else {
        near.bearing() - delta
    };
    let mut moved = far.clone();
    moved.p = polar(r_n, normalize_angle(beta));
    let mut out = g.clone();
    out.kind = GapKind::Swept;
    if left_far {
        out.left = moved;
    } else {
        out.right = moved;
    }
    out
}

/// Inflation geometry for one endpoint: (α, h).
pub fn inflation_terms(rho: f64, r_infl: f64) -> (f64, f64) {
    let alpha = (r_infl / rho).asin();
    let beta = FRAC_PI_2 - alpha;
    (alpha, r_infl / beta.sin())
}

/// Shift an endpoint perpendicular to its bearing so the ray through the new
/// point is tangent to a circle of radius `r_infl` around the old one.
pub fn inflate_point(pt: &GapPointState, r_infl: f64) -> Result<GapPointState, DomainError> {
    let rho = pt.range();
    if rho <= r_infl {
        return Err(DomainError::InsideInflation);
    }
    if r_infl == 0.0 {
        return Ok(pt.clone());
    }
    let (_, h) = inflation_terms(rho, r_infl);
    let u = pt.p / rho;
    let n = match pt.side {
        Side::Left => Vec2::new(u.y, -u.x),
        Side::Right => Vec2::new(-u.y, u.x),
    };
    let mut out = pt.clone();
    out.p = pt.p + n * h;
    Ok(out)
}

pub fn inflate_gap(g: &Gap, cfg: &PlannerConfig) -> Result<Gap, DomainError> {
    inflate_gap_with(g, cfg.r_infl())
}

pub fn inflate_gap_with(g: &Gap, r_infl: f64) -> Result<Gap, DomainError> {
    let span = g.span();
    let left = inflate_point(&g.left, r_infl)?;
    let right = inflate_point(&g.right, r_infl)?;
    if r_infl == 0.0 {
        return Ok(g.clone());
    }
    let (a_l, _) = inflation_terms(g.left.range(), r_infl);
    let (a_r, _) = inflation_terms(g.right.range(), r_infl);
    if span - a_l - a_r <= 0.0 || (left.p - right.p).norm() < 1e-3 {
        return Err(DomainError::DegenerateGap);
    }
    Ok(Gap {
        left,
        right,
        ..g.clone()
    })
}

/// Replace a gap wider than π by a `width`-wide sub-gap centred as close to
/// `toward` as the original span allows. Both new endpoints sit at the
/// smaller endpoint range and keep their side's velocity model.
pub fn reduce_span(g: &Gap, toward: f64, width: f64) -> Gap {
    let span = g.span();
    if span <= std::f64::consts::PI {
        return g.clone();
    }
    let b_r = g.right.bearing();
    let half = width / 2.0;
    let offset = ccw_span(b_r, toward);
    let offset = if offset >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        offset
    };
    let centre = b_r + offset.clamp(half, span - half);
    let r = g.left.range().min(g.right.range());
    let mut out = g.clone();
    out.right.p = polar(r, normalize_angle(centre - half));
    out.left.p = polar(r, normalize_angle(centre + half));
    out
}

/// Full manipulation of one gap for planning. `None` when the gap cannot be
/// entered after inflation.
pub fn manipulate_gap(g: &Gap, cfg: &PlannerConfig) -> Option<Gap> {
    inflate_gap(&convert_radial_gap(g), cfg).ok()
}
