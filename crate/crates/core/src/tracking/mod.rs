//! Frame-to-frame gap point association and per-point state estimation.

pub mod assignment;
pub mod ekf;

pub use assignment::solve_assignment;
pub use ekf::{gap_only_velocity, model_correct, model_predict, PointModel};

use crate::config::PlannerConfig;
use crate::types::{EgoState, Gap, GapPointState, Vec2};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Association {
    /// `(prev index, curr index)` pairs within the cutoff.
    pub matches: Vec<(usize, usize)>,
    /// Current points that need a fresh model.
    pub new_models: Vec<usize>,
}

pub fn associate_points(
    prev: &[GapPointState],
    curr: &[GapPointState],
    cfg: &PlannerConfig,
) -> Association {
    associate_positions(
        &prev.iter().map(|p| p.p).collect::<Vec<_>>(),
        &curr.iter().map(|p| p.p).collect::<Vec<_>>(),
        cfg.tau_assoc,
    )
}

fn associate_positions(prev: &[Vec2], curr: &[Vec2], tau: f64) -> Association {
    let cost: Vec<Vec<f64>> = prev
        .iter()
        .map(|a| curr.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let mut out = Association::default();
    let mut taken = vec![false; curr.len()];
    if !prev.is_empty() {
        for (i, j) in solve_assignment(&cost) {
            if cost[i][j] <= tau {
                out.matches.push((i, j));
                taken[j] = true;
            }
        }
    }
    out.new_models = (0..curr.len()).filter(|&j| !taken[j]).collect();
    out
}

/// Owns the point models and stamps model ids and velocities onto gaps.
#[derive(Debug, Clone, Default)]
pub struct GapTracker {
    models: Vec<PointModel>,
    next_id: u64,
    last_stamp: Option<f64>,
}

impl GapTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn models(&self) -> &[PointModel] {
        &self.models
    }

    /// Advance all models to `stamp`, associate them with the endpoints of
    /// `gaps`, and write model ids, relative velocities and covariances back.
    pub fn update(&mut self, gaps: &mut [Gap], ego: &EgoState, stamp: f64, cfg: &PlannerConfig) {
        let dt = self.last_stamp.map_or(0.0, |t| stamp - t);
        if dt > 0.0 {
            for m in self.models.iter_mut() {
                *m = model_predict(m, ego, dt, cfg);
            }
        }
        self.last_stamp = Some(stamp);

        let meas: Vec<Vec2> = gaps.iter().flat_map(|g| [g.right.p, g.left.p]).collect();
        let pred: Vec<Vec2> = self.models.iter().map(|m| m.p()).collect();
        let assoc = associate_positions(&pred, &meas, cfg.tau_assoc);

        let mut next: Vec<Option<PointModel>> = vec![None; meas.len()];
        for &(i, j) in &assoc.matches {
            next[j] = Some(model_correct(&self.models[i], &meas[j], cfg));
        }
        for &j in &assoc.new_models {
            next[j] = Some(PointModel::new(meas[j], &ego.v, stamp, self.next_id, cfg));
            self.next_id += 1;
        }
        self.models = next
            .into_iter()
            .map(|m| m.expect("every point has a model"))
            .collect();

        for (k, g) in gaps.iter_mut().enumerate() {
            for (pt, m) in [
                (&mut g.right, &self.models[2 * k]),
                (&mut g.left, &self.models[2 * k + 1]),
            ] {
                pt.model_id = m.model_id;
                pt.v = m.v();
                pt.cov = m.cov;
            }
        }
    }
}
