//! Single-gap Monte Carlo over random dynamic gaps.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::error::DomainError;
use crate::feasibility::{propagate_gap_points, tube_feasible, Reason};
use crate::manipulation::inflate_gap_with;
use crate::trajectory::rollout_pn_trajectory;
use crate::types::{
    polar, EgoState, Gap, GapKind, GapPointState, Side, TrajSource, Trajectory, Vec2,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    /// Pursuer speed used for every trial.
    pub v_e: f64,
    pub r_robot: f64,
    /// Collision check step along each rollout (s).
    pub check_dt: f64,
    /// Sub-gap width used when a sampled gap spans more than π.
    pub reduced_span: f64,
    pub threads: usize,
    pub planner: PlannerConfig,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 10_000,
            seed: 0,
            v_e: 0.5,
            r_robot: 0.2,
            check_dt: 0.005,
            reduced_span: PI - 0.1,
            threads: 1,
            planner: PlannerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Passed,
    SpeedInfeasible,
    ClosedBeforePass,
    Collision,
}

/// Sampled gap endpoints in the robot frame. Velocities are world-frame and
/// the robot starts at rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub p_l: Vec2,
    pub p_r: Vec2,
    pub v_l: Vec2,
    pub v_r: Vec2,
}

impl GapSample {
    pub fn draw<R: Rng>(rng: &mut R) -> Self {
        let b_l = rng.gen_range(FRAC_PI_2..=3.0 * FRAC_PI_2);
        let r_l = rng.gen_range(0.25..=1.0);
        let b_r = rng.gen_range(-FRAC_PI_2..=FRAC_PI_2);
        let r_r = rng.gen_range(0.25..=1.0);
        let mut vel = || {
            let a = rng.gen_range(0.0..2.0 * PI);
            let m = rng.gen_range(0.0..=1.0);
            polar(m, a)
        };
        let v_l = vel();
        let v_r = vel();
        GapSample {
            p_l: polar(r_l, b_l),
            p_r: polar(r_r, b_r),
            v_l,
            v_r,
        }
    }

    pub fn gap(&self) -> Gap {
        Gap::new(
            GapPointState::new(self.p_r, Side::Right, 0).with_velocity(self.v_r),
            GapPointState::new(self.p_l, Side::Left, 1).with_velocity(self.v_l),
            GapKind::Swept,
        )
    }

    /// Smallest distance between `traj` and either moving endpoint, sampled
    /// every `step` seconds and at the final pose.
    pub fn min_clearance(&self, traj: &Trajectory, step: f64) -> f64 {
        let end = traj.duration();
        let n = (end / step).ceil() as usize;
        (0..=n)
            .map(|k| (k as f64 * step).min(end))
            .map(|t| {
                let p = traj.sample(t).p;
                let d_l = (p - (self.p_l + self.v_l * t)).norm();
                let d_r = (p - (self.p_r + self.v_r * t)).norm();
                d_l.min(d_r)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub sample: GapSample,
    pub outcome: TrialOutcome,
    pub reason: Option<String>,
    /// Inflated endpoints `[right, left]` when inflation succeeded.
    pub inflated: Option<[Vec2; 2]>,
    pub t_intercept: Option<f64>,
    pub min_clearance: Option<f64>,
    pub rollout: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub speed_infeasible: usize,
    pub closed_before_pass: usize,
    pub collisions: usize,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.passed + self.speed_infeasible + self.closed_before_pass + self.collisions
    }

    pub fn add(&mut self, o: TrialOutcome) {
        match o {
            TrialOutcome::Passed => self.passed += 1,
            TrialOutcome::SpeedInfeasible => self.speed_infeasible += 1,
            TrialOutcome::ClosedBeforePass => self.closed_before_pass += 1,
            TrialOutcome::Collision => self.collisions += 1,
        }
    }

    pub fn merge(&mut self, o: &Tally) {
        self.passed += o.passed;
        self.speed_infeasible += o.speed_infeasible;
        self.closed_before_pass += o.closed_before_pass;
        self.collisions += o.collisions;
    }

    pub fn fractions(&self) -> [f64; 4] {
        let n = self.total().max(1) as f64;
        [
            self.passed as f64 / n,
            self.speed_infeasible as f64 / n,
            self.closed_before_pass as f64 / n,
            self.collisions as f64 / n,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub tally: Tally,
    pub trials: Vec<TrialRecord>,
}

/// Independent generator for trial `index`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Inflate, build the single-gap tube, check feasibility with a required
/// intercept, roll out and measure clearance to the uninflated endpoints.
pub fn evaluate_sample(index: usize, sample: &GapSample, mc: &McConfig) -> TrialRecord {
    let mut cfg = mc.planner.clone();
    cfg.v_e = mc.v_e;
    cfg.r_inscr = mc.r_robot;
    cfg.reduced_span = mc.reduced_span;
    let mut rec = TrialRecord {
        index,
        sample: *sample,
        outcome: TrialOutcome::SpeedInfeasible,
        reason: None,
        inflated: None,
        t_intercept: None,
        min_clearance: None,
        rollout: Vec::new(),
    };
    let inflated = match inflate_gap_with(&sample.gap(), cfg.r_infl()) {
        Ok(g) => g,
        Err(e) => {
            rec.reason = Some(
                match e {
                    DomainError::InsideInflation => "inside_inflation",
                    _ => "degenerate",
                }
                .into(),
            );
            return rec;
        }
    };
    rec.inflated = Some([inflated.right.p, inflated.left.p]);
    let tubes = propagate_gap_points(&[inflated], &EgoState::default(), &cfg);
    let Some(tube) = tubes.first() else {
        rec.reason = Some("no_tube".into());
        return rec;
    };
    let eval = tube_feasible(tube, None, true, &cfg);
    if !eval.feasible {
        rec.outcome = match eval.reason {
            Reason::ClosesBeforeIntercept => TrialOutcome::ClosedBeforePass,
            _ => TrialOutcome::SpeedInfeasible,
        };
        rec.reason = Some(format!("{:?}", eval.reason));
        return rec;
    }
    let traj = rollout_pn_trajectory(&eval, TrajSource::Tube(0), &cfg);
    let clearance = sample.min_clearance(&traj, mc.check_dt);
    rec.t_intercept = eval.t_intercept;
    rec.min_clearance = Some(clearance);
    rec.rollout = traj.poses.iter().map(|q| [q.t, q.p.x, q.p.y]).collect();
    rec.outcome = if clearance < mc.r_robot {
        TrialOutcome::Collision
    } else {
        TrialOutcome::Passed
    };
    rec
}

fn run_range(mc: &McConfig, range: std::ops::Range<usize>) -> Vec<TrialRecord> {
    range
        .map(|i| {
            let s = GapSample::draw(&mut trial_rng(mc.seed, i));
            evaluate_sample(i, &s, mc)
        })
        .collect()
}

/// Run every trial. Results do not depend on `threads`.
pub fn run_monte_carlo(mc: &McConfig) -> McReport {
    let threads = mc.threads.max(1).min(mc.trials.max(1));
    let chunk = mc.trials.div_ceil(threads);
    let trials: Vec<TrialRecord> = if threads == 1 {
        run_range(mc, 0..mc.trials)
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|k| {
                    let lo = (k * chunk).min(mc.trials);
                    let hi = ((k + 1) * chunk).min(mc.trials);
                    s.spawn(move || run_range(mc, lo..hi))
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("trial worker panicked"))
                .collect()
        })
    };
    let mut tally = Tally::default();
    for t in &trials {
        tally.add(t.outcome);
    }
    McReport { tally, trials }
}
