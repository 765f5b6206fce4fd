//! Kinematic world: holonomic ego, disk agents on waypoint paths, static
//! wall segments and a raycast laser.

use serde::{Deserialize, Serialize};

use crate::trajectory::Command;
use crate::types::{polar, rotate, EgoState, Scan, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub center: Vec2,
    pub radius: f64,
    pub waypoints: Vec<Vec2>,
    pub speed: f64,
    /// Return to the first waypoint after the last one instead of stopping.
    pub looped: bool,
    /// The agent holds still until this time.
    pub start_time: f64,
    /// Index of the waypoint being approached.
    pub next: usize,
    pub velocity: Vec2,
}

impl Agent {
    pub fn new(center: Vec2, radius: f64, waypoints: Vec<Vec2>, speed: f64, looped: bool) -> Self {
        Agent {
            center,
            radius,
            waypoints,
            speed,
            looped,
            start_time: 0.0,
            next: 0,
            velocity: Vec2::zeros(),
        }
    }

    fn advance(&mut self, t: f64, dt: f64) {
        self.velocity = Vec2::zeros();
        if t + dt <= self.start_time || self.speed <= 0.0 {
            return;
        }
        let mut budget = self.speed * (dt - (self.start_time - t).max(0.0));
        let start = self.center;
        while budget > 0.0 && self.next < self.waypoints.len() {
            let target = self.waypoints[self.next];
            let d = (target - self.center).norm();
            if d > budget {
                self.center += (target - self.center) * (budget / d);
                budget = 0.0;
            } else {
                self.center = target;
                budget -= d;
                self.next += 1;
                if self.next == self.waypoints.len() && self.looped {
                    self.next = 0;
                }
                if d == 0.0 && self.waypoints.len() == 1 {
                    break;
                }
            }
        }
        self.velocity = (self.center - start) / dt;
    }

    /// Unit heading toward the current target waypoint.
    pub fn heading(&self) -> Option<Vec2> {
        let target = self.waypoints.get(self.next)?;
        let d = target - self.center;
        (d.norm() > 0.0).then(|| d.normalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub ego: EgoState,
    pub agents: Vec<Agent>,
    pub segments: Vec<(Vec2, Vec2)>,
    pub t: f64,
    /// Whether the ego overlaps an obstacle after the last step.
    pub collision: bool,
}

impl WorldState {
    pub fn new(ego: EgoState, agents: Vec<Agent>, segments: Vec<(Vec2, Vec2)>) -> Self {
        let mut w = WorldState {
            ego,
            agents,
            segments,
            t: 0.0,
            collision: false,
        };
        w.collision = in_collision(&w);
        w
    }
}

pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let s = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    };
    (p - (a + ab * s)).norm()
}

pub fn in_collision(w: &WorldState) -> bool {
    let p = w.ego.p;
    let r = w.ego.r_inscr;
    w.agents
        .iter()
        .any(|a| (p - a.center).norm() < r + a.radius)
        || w.segments
            .iter()
            .any(|(a, b)| point_segment_distance(&p, a, b) < r)
}

fn ray_segment(o: &Vec2, d: &Vec2, a: &Vec2, b: &Vec2) -> Option<f64> {
    let e = b - a;
    let denom = d.x * e.y - d.y * e.x;
    if denom.abs() < 1e-12 {
        return None;
    }
    let w = a - o;
    let t = (w.x * e.y - w.y * e.x) / denom;
    let s = (w.x * d.y - w.y * d.x) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

fn ray_circle(o: &Vec2, d: &Vec2, c: &Vec2, r: f64) -> Option<f64> {
    let m = o - c;
    let b = m.dot(d);
    let q = m.norm_squared() - r * r;
    let disc = b * b - q;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = -b - sq;
    if t0 >= 0.0 {
        Some(t0)
    } else if -b + sq >= 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// Noise-free full-circle scan from the ego pose.
pub fn raycast_scan(world: &WorldState, n_beams: usize, range_max: f64) -> Scan {
    let mut scan = Scan::new(vec![range_max; n_beams], range_max, world.t);
    let o = world.ego.p;
    for i in 0..n_beams {
        let d = polar(1.0, world.ego.theta + scan.beam_bearing(i));
        let mut best = range_max;
        for (a, b) in &world.segments {
            if let Some(t) = ray_segment(&o, &d, a, b) {
                best = best.min(t);
            }
        }
        for ag in &world.agents {
            if let Some(t) = ray_circle(&o, &d, &ag.center, ag.radius) {
                best = best.min(t);
            }
        }
        scan.ranges[i] = best.max(1e-3);
    }
    scan
}

/// Integrate the ego command exactly and advance every agent.
pub fn step_world(world: &WorldState, u: &Command, dt: f64) -> WorldState {
    let mut w = world.clone();
    let v_world = rotate(&u.v, w.ego.theta);
    w.ego.p += v_world * dt;
    w.ego.theta += u.omega * dt;
    w.ego.v = u.v;
    w.ego.omega = u.omega;
    for a in w.agents.iter_mut() {
        a.advance(world.t, dt);
    }
    w.t = world.t + dt;
    w.collision = in_collision(&w);
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world() -> WorldState {
        WorldState::new(EgoState::default(), Vec::new(), Vec::new())
    }

    fn beam_at(scan: &Scan, b: f64) -> f64 {
        scan.ranges[scan.index_of(b)]
    }

    #[test]
    fn empty_world_reads_max() {
        let s = raycast_scan(&world(), 64, 5.0);
        assert!(s.ranges.iter().all(|&r| r == 5.0));
    }

    #[test]
    fn wall_ahead() {
        let mut w = world();
        w.segments.push((Vec2::new(2.0, -1.0), Vec2::new(2.0, 1.0)));
        let s = raycast_scan(&w, 360, 5.0);
        assert!((beam_at(&s, 0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn disk_ahead() {
        let mut w = world();
        w.agents
            .push(Agent::new(Vec2::new(2.0, 0.0), 0.3, vec![], 0.0, false));
        let s = raycast_scan(&w, 360, 5.0);
        assert!((beam_at(&s, 0.0) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn ego_integrates_command() {
        let u = Command {
            v: Vec2::new(1.0, 0.0),
            omega: 0.0,
        };
        let w = step_world(&world(), &u, 0.1);
        assert!((w.ego.p - Vec2::new(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn agent_turns_at_waypoint() {
        let mut w = world();
        w.ego.p = Vec2::new(-10.0, 0.0);
        w.agents.push(Agent::new(
            Vec2::new(0.0, 0.0),
            0.2,
            vec![Vec2::new(0.05, 0.0), Vec2::new(0.05, 1.0)],
            1.0,
            false,
        ));
        let w = step_world(&w, &Command::default(), 0.1);
        let a = &w.agents[0];
        assert!((a.center - Vec2::new(0.05, 0.05)).norm() < 1e-12);
        assert!((a.heading().unwrap() - Vec2::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn delayed_agent_waits() {
        let mut a = Agent::new(Vec2::zeros(), 0.2, vec![Vec2::new(1.0, 0.0)], 1.0, false);
        a.start_time = 0.5;
        a.advance(0.0, 0.1);
        assert_eq!(a.center, Vec2::zeros());
        a.advance(0.45, 0.1);
        assert!((a.center.x - 0.05).abs() < 1e-12);
    }

    #[test]
    fn touching_is_not_collision() {
        let mut w = world();
        w.agents
            .push(Agent::new(Vec2::new(0.5, 0.0), 0.3, vec![], 0.0, false));
        assert!(!in_collision(&w));
        w.agents[0].center.x = 0.5 - 1e-9;
        assert!(in_collision(&w));
        let mut w = world();
        w.segments.push((Vec2::new(0.2, -1.0), Vec2::new(0.2, 1.0)));
        assert!(!in_collision(&w));
    }

    #[test]
    fn looped_agent_wraps() {
        let mut a = Agent::new(
            Vec2::zeros(),
            0.2,
            vec![Vec2::new(1.0, 0.0), Vec2::zeros()],
            1.0,
            true,
        );
        for k in 0..25 {
            a.advance(k as f64 * 0.1, 0.1);
        }
        assert!((a.center - Vec2::new(0.5, 0.0)).norm() < 1e-9);
    }
}
