//! Closed-loop episodes: scan, plan and control on fixed rates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::planner::{CandidateLog, Odom, PlanOutput, Planner};
use crate::sim::scenario::{ControlSpec, Scenario};
use crate::sim::world::{raycast_scan, step_world, WorldState};
use crate::trajectory::{Command, SwitchReason};
use crate::types::{rotate, EgoState, GapKind, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Timeout,
    /// Reached the goal but collided on the way.
    Failure,
    FailureTimeout,
}

impl Outcome {
    pub fn classify(reached: bool, collisions: usize) -> Self {
        match (reached, collisions > 0) {
            (true, false) => Outcome::Success,
            (true, true) => Outcome::Failure,
            (false, false) => Outcome::Timeout,
            (false, true) => Outcome::FailureTimeout,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Timeout => "timeout",
            Outcome::Failure => "failure",
            Outcome::FailureTimeout => "failure+timeout",
        }
    }
}

/// One simulator step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub cmd_vx: f64,
    pub cmd_vy: f64,
    pub cmd_omega: f64,
    pub source: String,
    pub collision: bool,
    pub agents: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub right: [f64; 2],
    pub left: [f64; 2],
    pub swept: bool,
    /// World-frame endpoint velocities expressed in the ego frame.
    #[serde(default)]
    pub v_right: [f64; 2],
    #[serde(default)]
    pub v_left: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UngapRecord {
    pub id: u32,
    pub right: [f64; 2],
    pub left: [f64; 2],
    pub receding: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub start: f64,
    pub duration: f64,
    pub available: bool,
    pub right: [f64; 2],
    pub left: [f64; 2],
}

/// Planner state at one planning tick; geometry is in the ego frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub tick: usize,
    pub t: f64,
    pub ego: [f64; 3],
    pub p_star: [f64; 2],
    pub active: String,
    pub switched: Option<SwitchReason>,
    pub command: [f64; 2],
    pub gaps: Vec<ArcRecord>,
    pub ungaps: Vec<UngapRecord>,
    pub tubes: Vec<Vec<SegmentRecord>>,
    pub candidates: Vec<CandidateLog>,
    pub trajectory: Vec<[f64; 3]>,
}

fn xy(p: &Vec2) -> [f64; 2] {
    [p.x, p.y]
}

impl PlanRecord {
    fn from_output(tick: usize, t: f64, ego: &EgoState, p_star: &Vec2, out: &PlanOutput) -> Self {
        PlanRecord {
            tick,
            t,
            ego: [ego.p.x, ego.p.y, ego.theta],
            p_star: xy(p_star),
            active: out.active.label(),
            switched: out.switched,
            command: xy(&out.command.v),
            gaps: out
                .gaps
                .iter()
                .map(|g| ArcRecord {
                    right: xy(&g.right.p),
                    left: xy(&g.left.p),
                    swept: g.kind == GapKind::Swept,
                    v_right: xy(&(g.right.v + ego.v)),
                    v_left: xy(&(g.left.v + ego.v)),
                })
                .collect(),
            ungaps: out
                .ungaps
                .iter()
                .map(|u| UngapRecord {
                    id: u.id,
                    right: xy(&u.right_of_next.p),
                    left: xy(&u.left_of_prev.p),
                    receding: u.receding,
                })
                .collect(),
            tubes: out
                .tubes
                .iter()
                .map(|tube| {
                    tube.segments
                        .iter()
                        .map(|s| SegmentRecord {
                            start: s.start,
                            duration: s.duration,
                            available: s.gap.available,
                            right: xy(&s.gap.right.p),
                            left: xy(&s.gap.left.p),
                        })
                        .collect()
                })
                .collect(),
            candidates: out.candidates.clone(),
            trajectory: out
                .trajectory
                .poses
                .iter()
                .map(|q| [q.t, q.p.x, q.p.y])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub scenario: String,
    pub seed: u64,
    pub outcome: Outcome,
    pub reached: bool,
    pub collisions: usize,
    pub time_to_goal: Option<f64>,
    pub duration: f64,
    pub plan_ticks: usize,
    pub scans: usize,
    pub mean_plan_latency_ms: f64,
    pub max_plan_latency_ms: f64,
    pub sources: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub summary: EpisodeSummary,
    pub trace: Vec<TraceRow>,
    pub plans: Vec<PlanRecord>,
    /// Wall-clock plan latencies in seconds; not part of the deterministic
    /// record.
    pub latencies: Vec<f64>,
}

impl EpisodeResult {
    pub fn outcome(&self) -> Outcome {
        self.summary.outcome
    }

    /// Maximal runs of rows, away from the goal, whose command speed stays
    /// below `eps` for at least `min_len` seconds. Returned as `(start, end)`.
    pub fn idle_intervals(&self, eps: f64, min_len: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        let mut last_t = 0.0;
        for r in &self.trace {
            let still = r.cmd_vx.hypot(r.cmd_vy) < eps;
            match (still, start) {
                (true, None) => start = Some(r.t),
                (false, Some(s)) => {
                    if last_t - s >= min_len {
                        out.push((s, last_t));
                    }
                    start = None;
                }
                _ => {}
            }
            last_t = r.t;
        }
        if let Some(s) = start {
            if last_t - s >= min_len && !self.summary.reached {
                out.push((s, last_t));
            }
        }
        out
    }
}

/// Local waypoint: the farthest point of the start-goal segment within
/// `lookahead` of `p`, or a point `lookahead` toward the goal when the
/// segment is out of reach.
pub fn local_waypoint(start: &Vec2, goal: &Vec2, p: &Vec2, lookahead: f64) -> Vec2 {
    if (goal - p).norm() <= lookahead {
        return *goal;
    }
    let d = goal - start;
    let len2 = d.norm_squared();
    if len2 > 0.0 {
        // Solve |start + s d - p| = lookahead for the larger root.
        let m = start - p;
        let b = m.dot(&d) / len2;
        let c = (m.norm_squared() - lookahead * lookahead) / len2;
        let disc = b * b - c;
        if disc >= 0.0 {
            let s = (-b + disc.sqrt()).min(1.0);
            if s >= 0.0 {
                return start + d * s;
            }
        }
    }
    p + (goal - p).normalize() * lookahead
}

/// Run one episode. `seed` only drives scan noise.
pub fn run_episode(scenario: &Scenario, cfg: &PlannerConfig, seed: u64) -> EpisodeResult {
    let dt = scenario.limits.dt;
    let scan_every = ((1.0 / cfg.scan_rate) / dt).round().max(1.0) as usize;
    let plan_every = ((1.0 / cfg.plan_rate) / dt).round().max(1.0) as usize;
    let max_steps = (scenario.limits.timeout / dt).round() as usize;
    let goal = scenario.goal();
    let start = scenario.start();

    let mut cfg = cfg.clone();
    cfg.r_inscr = scenario.ego.radius;
    cfg.v_max = cfg.v_max.min(scenario.ego.v_max);
    let mut planner = Planner::new(cfg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = (scenario.sensor.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, scenario.sensor.noise_sigma).expect("valid sigma"));

    let mut world: WorldState = scenario.initial_world();
    let mut cmd = Command::default();
    let mut source = "idle".to_string();
    let mut v_prev_scan = Vec2::zeros();
    let mut trace = Vec::with_capacity(max_steps);
    let mut plans = Vec::new();
    let mut latencies = Vec::new();
    let mut collisions = 0usize;
    let mut in_contact = world.collision;
    if in_contact {
        collisions += 1;
    }
    let mut reached = false;
    let mut scans = 0usize;
    let mut sources: Vec<String> = Vec::new();
    let scan_dt = scan_every as f64 * dt;

    for step in 0..max_steps {
        let t = step as f64 * dt;
        world.t = t;
        let ego = EgoState {
            a: (world.ego.v - v_prev_scan) / scan_dt,
            ..world.ego
        };
        if step % scan_every == 0 {
            let mut scan = raycast_scan(&world, scenario.sensor.n_beams, scenario.sensor.range_max);
            if let Some(n) = &noise {
                for r in scan.ranges.iter_mut() {
                    *r = (*r + n.sample(&mut rng)).clamp(1e-3, scan.range_max);
                }
            }
            planner.on_scan(&scan, &ego);
            v_prev_scan = world.ego.v;
            scans += 1;
        }
        if step % plan_every == 0 {
            match &scenario.control {
                ControlSpec::Planner => {
                    let odom = Odom {
                        p: world.ego.p,
                        theta: world.ego.theta,
                    };
                    let wp = local_waypoint(&start, &goal, &world.ego.p, cfg.lookahead);
                    let p_star = rotate(&(wp - world.ego.p), -world.ego.theta);
                    let out = planner.plan(&ego, &odom, &p_star, t);
                    latencies.push(out.latency.as_secs_f64());
                    cmd = out.command;
                    source = out.active.label();
                    let kind = source
                        .trim_end_matches(|c: char| c.is_ascii_digit())
                        .to_string();
                    if !sources.contains(&kind) {
                        sources.push(kind);
                    }
                    plans.push(PlanRecord::from_output(
                        plans.len(),
                        t,
                        &world.ego,
                        &p_star,
                        &out,
                    ));
                }
                ControlSpec::Constant { velocity } => {
                    cmd = Command {
                        v: Vec2::new(velocity[0], velocity[1]),
                        omega: 0.0,
                    };
                    source = "constant".to_string();
                }
            }
        }

        world = step_world(&world, &cmd, dt);
        world.t = (step + 1) as f64 * dt;
        if world.collision && !in_contact {
            collisions += 1;
        }
        in_contact = world.collision;
        trace.push(TraceRow {
            t: world.t,
            x: world.ego.p.x,
            y: world.ego.p.y,
            theta: world.ego.theta,
            cmd_vx: cmd.v.x,
            cmd_vy: cmd.v.y,
            cmd_omega: cmd.omega,
            source: source.clone(),
            collision: world.collision,
            agents: world
                .agents
                .iter()
                .map(|a| [a.center.x, a.center.y])
                .collect(),
        });
        if (world.ego.p - goal).norm() < scenario.limits.goal_tolerance {
            reached = true;
            break;
        }
    }

    let duration = trace.last().map_or(0.0, |r| r.t);
    let mean = if latencies.is_empty() {
        0.0
    } else {
        latencies.iter().sum::<f64>() / latencies.len() as f64
    };
    let max = latencies.iter().cloned().fold(0.0, f64::max);
    EpisodeResult {
        summary: EpisodeSummary {
            scenario: scenario.name.clone(),
            seed,
            outcome: Outcome::classify(reached, collisions),
            reached,
            collisions,
            time_to_goal: reached.then_some(duration),
            duration,
            plan_ticks: plans.len(),
            scans,
            mean_plan_latency_ms: mean * 1e3,
            max_plan_latency_ms: max * 1e3,
            sources,
        },
        trace,
        plans,
        latencies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(extra: &str) -> Scenario {
        Scenario::parse(&format!(
            "name = \"t\"\n[ego]\nstart = [0.0, 0.0]\ngoal = [5.0, 0.0]\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn classification_table() {
        assert_eq!(Outcome::classify(true, 0), Outcome::Success);
        assert_eq!(Outcome::classify(true, 2), Outcome::Failure);
        assert_eq!(Outcome::classify(false, 0), Outcome::Timeout);
        assert_eq!(Outcome::classify(false, 1), Outcome::FailureTimeout);
    }

    #[test]
    fn waypoint_on_line() {
        let s = Vec2::zeros();
        let g = Vec2::new(10.0, 0.0);
        assert!(
            (local_waypoint(&s, &g, &Vec2::new(1.0, 0.0), 3.0) - Vec2::new(4.0, 0.0)).norm()
                < 1e-12
        );
        assert_eq!(local_waypoint(&s, &g, &Vec2::new(8.0, 0.0), 3.0), g);
        let off = local_waypoint(&s, &g, &Vec2::new(1.0, 5.0), 3.0);
        assert!(((off - Vec2::new(1.0, 5.0)).norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_world_reaches_goal() {
        let r = run_episode(&scenario(""), &PlannerConfig::default(), 0);
        assert_eq!(r.outcome(), Outcome::Success);
        let t = r.summary.time_to_goal.unwrap();
        assert!(t > 4.5 && t < 6.5, "{t}");
        let n = r.trace.len();
        assert_eq!(r.summary.plan_ticks, n.div_ceil(20));
        assert_eq!(r.summary.scans, n.div_ceil(4));
    }

    #[test]
    fn rate_contract() {
        let r = run_episode(
            &scenario(
                "[limits]\ntimeout = 2.0\n[control]\nmode = \"constant\"\nvelocity = [0.0, 0.0]\n",
            ),
            &PlannerConfig::default(),
            0,
        );
        assert_eq!(r.summary.scans, 50);
        assert!(r.plans.is_empty());
    }

    #[test]
    fn head_on_constant_command_collides() {
        let s = scenario(
            "[control]\nmode = \"constant\"\nvelocity = [1.0, 0.0]\n[[agents]]\ncenter = [4.0, 0.0]\nradius = 0.3\nwaypoints = [[-4.0, 0.0]]\nspeed = 1.0\n",
        );
        let r = run_episode(&s, &PlannerConfig::default(), 0);
        assert!(r.summary.collisions >= 1);
        assert!(matches!(
            r.outcome(),
            Outcome::Failure | Outcome::FailureTimeout
        ));
    }

    #[test]
    fn deterministic() {
        let s = scenario("[sensor]\nnoise_sigma = 0.01\n[[agents]]\ncenter = [3.0, 2.0]\nradius = 0.3\nwaypoints = [[3.0, -2.0]]\nspeed = 0.5\n");
        let a = run_episode(&s, &PlannerConfig::default(), 7);
        let b = run_episode(&s, &PlannerConfig::default(), 7);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.plans, b.plans);
        assert_eq!(a.summary.outcome, b.summary.outcome);
    }
}
