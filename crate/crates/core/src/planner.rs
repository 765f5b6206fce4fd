//! Scan-to-command pipeline.
//!
//! [`Planner::on_scan`] runs at the scan rate and keeps gap estimates fresh.
//! [`Planner::plan`] runs at the planning rate, builds tubes and candidate
//! trajectories, applies event-based switching and returns a filtered
//! velocity command in the current ego frame.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::feasibility::{evaluate_goal, propagate_frames, tube_feasible, TubeEvaluation};
use crate::manipulation::manipulate_gap;
use crate::perception::{detect_gaps, detect_ungaps, simplify_gaps};
use crate::tracking::GapTracker;
use crate::trajectory::{
    extend_at_velocity, place_gap_goal, projection_operator_filter, propagate_scan,
    rollout_pn_trajectory, score_trajectory, select_trajectory, social_cost, Candidate, Command,
    CurrentStatus, PropagatedScanSet, ScoredTrajectory, Selection, SwitchReason,
};
use crate::types::{
    bearing_unchecked, rotate, Cost, EgoState, Gap, GapPointState, GapTube, Pose, Scan, TrajSource,
    Trajectory, Ungap, Vec2,
};

/// Odometry pose of the ego in a fixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Odom {
    pub p: Vec2,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Held {
    traj: Trajectory,
    origin: Odom,
    t0: f64,
    ids: Option<(u64, u64)>,
}

impl Held {
    fn idle(origin: Odom, t0: f64) -> Self {
        Held {
            traj: Trajectory::idle(),
            origin,
            t0,
            ids: None,
        }
    }

    /// Ego position expressed in the trajectory frame.
    fn local(&self, odom: &Odom) -> Vec2 {
        rotate(&(odom.p - self.origin.p), -self.origin.theta)
    }

    /// Remaining part of the trajectory, re-expressed in the current ego frame
    /// with time measured from `now`.
    fn remaining(&self, odom: &Odom, now: f64) -> Trajectory {
        let elapsed = now - self.t0;
        let dth = self.origin.theta - odom.theta;
        let shift = rotate(&(self.origin.p - odom.p), -odom.theta);
        let to_ego = |q: &Pose, t: f64| Pose {
            t,
            p: rotate(&q.p, dth) + shift,
            v: rotate(&q.v, dth),
        };
        let mut poses = vec![to_ego(&self.traj.sample(elapsed), 0.0)];
        for q in self.traj.poses.iter().filter(|q| q.t > elapsed + 1e-9) {
            poses.push(to_ego(q, q.t - elapsed));
        }
        Trajectory {
            poses,
            ..self.traj.clone()
        }
    }
}

/// A scored candidate with the gap it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLog {
    pub source: TrajSource,
    pub feasible: bool,
    pub cost: Option<f64>,
    pub t_intercept: Option<f64>,
    pub idle_time: f64,
    pub poses: Vec<[f64; 2]>,
}

/// Per-cycle planner output.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutput {
    pub command: Command,
    /// Command before the safety filter.
    pub raw_command: Command,
    pub active: TrajSource,
    pub switched: Option<SwitchReason>,
    /// Active trajectory in the current ego frame, starting now.
    pub trajectory: Trajectory,
    pub gaps: Vec<Gap>,
    pub ungaps: Vec<Ungap>,
    pub tubes: Vec<GapTube>,
    pub candidates: Vec<CandidateLog>,
    pub latency: Duration,
}

impl PlanOutput {
    pub fn n_feasible(&self) -> usize {
        self.candidates.iter().filter(|c| c.feasible).count()
    }
}

#[derive(Debug, Clone)]
pub struct Planner {
    cfg: PlannerConfig,
    tracker: GapTracker,
    gaps: Vec<Gap>,
    scan: Option<Scan>,
    held: Option<Held>,
}

struct Built {
    traj: Trajectory,
    eval: TubeEvaluation,
    ids: (u64, u64),
}

impl Planner {
    pub fn new(cfg: PlannerConfig) -> Self {
        Planner {
            cfg,
            tracker: GapTracker::new(),
            gaps: Vec::new(),
            scan: None,
            held: None,
        }
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    pub fn tracker(&self) -> &GapTracker {
        &self.tracker
    }

    /// Latest tracked gaps.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn on_scan(&mut self, scan: &Scan, ego: &EgoState) {
        let raw = detect_gaps(scan, &self.cfg);
        let mut gaps = simplify_gaps(&raw, &self.cfg);
        self.tracker.update(&mut gaps, ego, scan.stamp, &self.cfg);
        self.gaps = gaps;
        self.scan = Some(scan.clone());
    }

    /// One planning cycle. `p_star` is the local waypoint in the ego frame.
    pub fn plan(&mut self, ego: &EgoState, odom: &Odom, p_star: &Vec2, now: f64) -> PlanOutput {
        let started = Instant::now();
        let cfg = self.cfg.clone();
        let Some(scan) = self.scan.clone() else {
            return PlanOutput {
                command: Command::default(),
                raw_command: Command::default(),
                active: TrajSource::Idle,
                switched: None,
                trajectory: Trajectory::idle(),
                gaps: Vec::new(),
                ungaps: Vec::new(),
                tubes: Vec::new(),
                candidates: Vec::new(),
                latency: started.elapsed(),
            };
        };

        let mut gaps = self.gaps.clone();
        // Endpoints at the edge of the sensor range slide with the ego; their
        // apparent motion is not obstacle motion.
        for g in gaps.iter_mut() {
            for pt in [&mut g.left, &mut g.right] {
                if pt.range() >= scan.range_max - cfg.range_edge {
                    pt.v = -ego.v;
                }
            }
        }
        let ungaps = detect_ungaps(&mut gaps, &ego.v, &cfg);
        let manip: Vec<Gap> = gaps
            .iter()
            .filter_map(|g| manipulate_gap(g, &cfg))
            .collect();
        let tubes = propagate_frames(&manip, ego, &cfg).tubes;

        let world_points: Vec<GapPointState> = gaps
            .iter()
            .flat_map(|g| [g.right.clone(), g.left.clone()])
            .map(|mut p| {
                p.v += ego.v;
                p
            })
            .collect();
        let scans = propagate_scan(&scan, &world_points, &cfg);
        let agents: Vec<(Vec2, Vec2)> = world_points
            .iter()
            .filter(|p| p.v.norm() >= cfg.v_min)
            .map(|p| (p.p, p.v))
            .collect();

        let mut built: Vec<Built> = Vec::new();
        for (i, tube) in tubes.iter().enumerate() {
            let eval = tube_feasible(tube, Some(p_star), false, &cfg);
            let traj = rollout_pn_trajectory(&eval, TrajSource::Tube(i), &cfg);
            built.push(Built {
                traj,
                eval,
                ids: tube.segments[0].gap.endpoint_ids(),
            });
        }
        for u in ungaps.iter().filter(|u| u.receding) {
            if let Some(b) = self.ungap_candidate(u, &scan, ego, p_star) {
                built.push(b);
            }
        }

        let score = |t: &Trajectory| -> ScoredTrajectory {
            let mut s = score_trajectory(t, &scans, p_star, &cfg);
            if cfg.social_weight > 0.0 {
                let social = match social_cost(t, &agents) {
                    Cost::Finite(c) => Cost::Finite(cfg.social_weight * c),
                    Cost::Infinite => Cost::Infinite,
                };
                s.cost = s.cost + social;
            }
            s
        };

        let mut candidates = Vec::new();
        let mut logs = Vec::new();
        for (index, b) in built.iter().enumerate() {
            let scored = score(&b.traj);
            logs.push(CandidateLog {
                source: b.traj.source,
                feasible: b.eval.feasible,
                cost: (!scored.cost.is_infinite()).then(|| scored.cost.value()),
                t_intercept: b.eval.t_intercept,
                idle_time: b.eval.idle_time,
                poses: b.traj.poses.iter().map(|q| [q.p.x, q.p.y]).collect(),
            });
            if b.eval.feasible {
                candidates.push(Candidate {
                    scored,
                    index,
                    deprioritized: b.eval.idle_time > cfg.horizon / 2.0,
                });
            }
        }

        let status = self
            .held
            .as_ref()
            .map(|h| self.status_of(h, odom, now, &built, &scans, &cfg));
        let selection = select_trajectory(status.as_ref(), &candidates);
        let switched = match selection {
            Selection::Keep => None,
            Selection::Switch { candidate, reason } => {
                let b = &built[candidates[candidate].index];
                self.held = Some(Held {
                    traj: b.traj.clone(),
                    origin: *odom,
                    t0: now,
                    ids: Some(b.ids),
                });
                Some(reason)
            }
            Selection::Idle { reason } => {
                self.held = Some(Held::idle(*odom, now));
                Some(reason)
            }
        };

        let held = self
            .held
            .as_ref()
            .expect("a trajectory is always held after selection");
        let raw_command = if held.traj.is_idle() {
            Command::default()
        } else {
            let local = held.local(odom);
            let c = crate::trajectory::track_trajectory(&held.traj, &local, now - held.t0, &cfg);
            Command {
                v: rotate(&c.v, held.origin.theta - odom.theta),
                omega: 0.0,
            }
        };
        let command = projection_operator_filter(&raw_command, &scan, &cfg);

        PlanOutput {
            command,
            raw_command,
            active: held.traj.source,
            switched,
            trajectory: held.remaining(odom, now),
            gaps,
            ungaps,
            tubes,
            candidates: logs,
            latency: started.elapsed(),
        }
    }

    fn ungap_candidate(
        &self,
        u: &Ungap,
        scan: &Scan,
        ego: &EgoState,
        p_star: &Vec2,
    ) -> Option<Built> {
        let cfg = &self.cfg;
        let mut g = u.as_gap();
        g.left.v += ego.v;
        g.right.v += ego.v;
        let mut goal = place_gap_goal(&g, Some(p_star), true, cfg).ok()?;
        // Keep the goal short of whatever the scan sees along its bearing.
        let b = bearing_unchecked(&goal.p);
        let limit = scan.ranges[scan.index_of(b)] - 2.0 * cfg.r_infl();
        let r = goal.p.norm();
        if r > limit {
            goal.p *= limit.max(0.0) / r;
        }
        // Within one control period of trailing distance: hold station.
        if goal.p.norm() < cfg.v_e / cfg.plan_rate {
            goal.p = Vec2::zeros();
        }
        let eval = evaluate_goal(&goal, cfg);
        let mut traj = rollout_pn_trajectory(&eval, TrajSource::Ungap(u.id), cfg);
        if eval.feasible {
            extend_at_velocity(&mut traj, &goal.v, cfg.horizon, cfg);
        }
        Some(Built {
            traj,
            eval,
            ids: (u.right_of_next.model_id, u.left_of_prev.model_id),
        })
    }

    fn status_of(
        &self,
        h: &Held,
        odom: &Odom,
        now: f64,
        built: &[Built],
        scans: &PropagatedScanSet,
        cfg: &PlannerConfig,
    ) -> CurrentStatus {
        if h.traj.is_idle() {
            return CurrentStatus {
                completed: true,
                collision_course: false,
                still_feasible: false,
            };
        }
        let elapsed = now - h.t0;
        let end = h.traj.poses.last().expect("non-empty").p;
        let completed =
            elapsed >= h.traj.duration() - 1e-9 || (h.local(odom) - end).norm() < cfg.eps_goal;
        let rest = h.remaining(odom, now);
        let collision_course = rest.poses.len() > 1
            && score_trajectory(&rest, scans, &Vec2::zeros(), cfg)
                .cost
                .is_infinite();
        let same_kind = |b: &&Built| {
            matches!(
                (b.traj.source, h.traj.source),
                (TrajSource::Tube(_), TrajSource::Tube(_))
                    | (TrajSource::Ungap(_), TrajSource::Ungap(_))
            )
        };
        let still_feasible = built
            .iter()
            .filter(same_kind)
            .any(|b| Some(b.ids) == h.ids && b.eval.feasible);
        CurrentStatus {
            completed,
            collision_course,
            still_feasible,
        }
    }
}
