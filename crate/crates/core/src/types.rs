//! Shared geometric and planning types.
//!
//! Planner-side quantities are egocentric: positions and velocities are
//! expressed in the robot frame at the time of the scan they came from.
//! Bearings are stored normalized to `(-π, π]`.

use nalgebra::{Matrix4, Vector2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::DomainError;

pub type Vec2 = Vector2<f64>;
pub type Mat4 = Matrix4<f64>;

/// Four-quadrant bearing of `p`, in `(-π, π]`.
pub fn bearing(p: &Vec2) -> Result<f64, DomainError> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(DomainError::ZeroVector);
    }
    Ok(normalize_angle(p.y.atan2(p.x)))
}

/// Bearing without the zero check; the origin maps to 0.
pub fn bearing_unchecked(p: &Vec2) -> f64 {
    normalize_angle(p.y.atan2(p.x))
}

/// Wrap an angle into `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

/// Counterclockwise angular width from `beta_right` to `beta_left`, in `(0, 2π]`.
///
/// Equal bearings give `2π`.
pub fn ccw_span(beta_right: f64, beta_left: f64) -> f64 {
    let s = (beta_left - beta_right).rem_euclid(2.0 * PI);
    if s <= 0.0 {
        2.0 * PI
    } else {
        s
    }
}

pub fn polar(r: f64, beta: f64) -> Vec2 {
    Vec2::new(r * beta.cos(), r * beta.sin())
}

/// 2D cross product `a × b` (z component).
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// `ω × u` for a planar rotation rate.
pub fn omega_cross(omega: f64, u: &Vec2) -> Vec2 {
    Vec2::new(-omega * u.y, omega * u.x)
}

/// Rotate `u` counterclockwise by `a`.
pub fn rotate(u: &Vec2, a: f64) -> Vec2 {
    let (s, c) = a.sin_cos();
    Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub angle_min: f64,
    pub angle_increment: f64,
    pub ranges: Vec<f64>,
    pub range_max: f64,
    pub stamp: f64,
}

impl Scan {
    /// Full-circle scan starting at `-π` with a half-open sweep.
    pub fn new(ranges: Vec<f64>, range_max: f64, stamp: f64) -> Self {
        assert!(ranges.len() >= 3, "a scan needs at least three beams");
        let n = ranges.len();
        Scan {
            angle_min: -PI,
            angle_increment: 2.0 * PI / n as f64,
            ranges,
            range_max,
            stamp,
        }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn beam_bearing(&self, i: usize) -> f64 {
        self.angle_min + i as f64 * self.angle_increment
    }

    pub fn point(&self, i: usize) -> Vec2 {
        polar(self.ranges[i], self.beam_bearing(i))
    }

    pub fn is_max(&self, i: usize) -> bool {
        self.ranges[i] >= self.range_max
    }

    /// Nearest beam index to a bearing.
    pub fn index_of(&self, beta: f64) -> usize {
        let n = self.len() as i64;
        let k = ((beta - self.angle_min) / self.angle_increment).round() as i64;
        k.rem_euclid(n) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPointState {
    pub p: Vec2,
    pub v: Vec2,
    pub side: Side,
    pub ungap_id: Option<u32>,
    pub model_id: u64,
    pub cov: Mat4,
}

impl GapPointState {
    pub fn new(p: Vec2, side: Side, model_id: u64) -> Self {
        GapPointState {
            p,
            v: Vec2::zeros(),
            side,
            ungap_id: None,
            model_id,
            cov: Mat4::identity(),
        }
    }

    pub fn with_velocity(mut self, v: Vec2) -> Self {
        self.v = v;
        self
    }

    pub fn bearing(&self) -> f64 {
        bearing_unchecked(&self.p)
    }

    pub fn range(&self) -> f64 {
        self.p.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    Radial,
    Swept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub left: GapPointState,
    pub right: GapPointState,
    pub kind: GapKind,
    pub available: bool,
}

impl Gap {
    pub fn new(right: GapPointState, left: GapPointState, kind: GapKind) -> Self {
        Gap {
            left,
            right,
            kind,
            available: true,
        }
    }

    pub fn span(&self) -> f64 {
        ccw_span(self.right.bearing(), self.left.bearing())
    }

    pub fn chord(&self) -> f64 {
        (self.left.p - self.right.p).norm()
    }

    pub fn endpoint_ids(&self) -> (u64, u64) {
        (self.right.model_id, self.left.model_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ungap {
    pub id: u32,
    /// Left point of the gap clockwise of the occupied region.
    pub left_of_prev: GapPointState,
    /// Right point of the gap counterclockwise of the occupied region.
    pub right_of_next: GapPointState,
    pub receding: bool,
}

impl Ungap {
    /// The occupied region as a gap-shaped pair, clockwise end first.
    pub fn as_gap(&self) -> Gap {
        let mut right = self.left_of_prev.clone();
        right.side = Side::Right;
        let mut left = self.right_of_next.clone();
        left.side = Side::Left;
        Gap::new(right, left, GapKind::Swept)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeSegment {
    pub gap: Gap,
    pub start: f64,
    pub duration: f64,
}

impl TubeSegment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTube {
    pub segments: Vec<TubeSegment>,
    pub horizon: f64,
}

impl GapTube {
    pub fn idle_time(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| !s.gap.available)
            .map(|s| s.duration)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub t: f64,
    pub p: Vec2,
    pub v: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrajSource {
    Tube(usize),
    Ungap(u32),
    Idle,
}

impl TrajSource {
    pub fn label(&self) -> String {
        match self {
            TrajSource::Tube(i) => format!("tube{i}"),
            TrajSource::Ungap(i) => format!("ungap{i}"),
            TrajSource::Idle => "idle".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub poses: Vec<Pose>,
    pub source: TrajSource,
    pub gamma_e: f64,
    /// Time at which the rollout reaches its final goal, if it does.
    pub t_intercept: Option<f64>,
}

impl Trajectory {
    pub fn idle() -> Self {
        Trajectory {
            poses: vec![Pose {
                t: 0.0,
                p: Vec2::zeros(),
                v: Vec2::zeros(),
            }],
            source: TrajSource::Idle,
            gamma_e: 0.0,
            t_intercept: None,
        }
    }

    pub fn duration(&self) -> f64 {
        self.poses.last().map_or(0.0, |p| p.t)
    }

    pub fn is_idle(&self) -> bool {
        self.source == TrajSource::Idle
    }

    /// Desired pose at time `t`, linearly interpolated and clamped to the span.
    pub fn sample(&self, t: f64) -> Pose {
        let first = self.poses[0];
        if t <= first.t || self.poses.len() == 1 {
            return Pose { t, ..first };
        }
        let last = *self.poses.last().unwrap();
        if t >= last.t {
            return Pose {
                t,
                p: last.p,
                v: Vec2::zeros(),
            };
        }
        let k = self.poses.partition_point(|q| q.t <= t);
        let a = self.poses[k - 1];
        let b = self.poses[k];
        let s = (t - a.t) / (b.t - a.t);
        Pose {
            t,
            p: a.p + (b.p - a.p) * s,
            v: a.v,
        }
    }
}

/// Ego state. `p` and `theta` are only meaningful inside the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub p: Vec2,
    pub theta: f64,
    pub v: Vec2,
    pub omega: f64,
    pub a: Vec2,
    pub r_inscr: f64,
    pub v_max: f64,
}

impl Default for EgoState {
    fn default() -> Self {
        EgoState {
            p: Vec2::zeros(),
            theta: 0.0,
            v: Vec2::zeros(),
            omega: 0.0,
            a: Vec2::zeros(),
            r_inscr: 0.2,
            v_max: 1.0,
        }
    }
}

/// Trajectory cost with a dedicated infinite value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            Cost::Finite(v) => *v,
            Cost::Infinite => f64::INFINITY,
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value().partial_cmp(&other.value())
    }
}
