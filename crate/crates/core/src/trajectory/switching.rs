//! Event-based trajectory switching.

use crate::trajectory::scoring::ScoredTrajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub scored: ScoredTrajectory,
    pub index: usize,
    /// Tubes idling for more than half the horizon rank after all others.
    pub deprioritized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentStatus {
    pub completed: bool,
    pub collision_course: bool,
    pub still_feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SwitchReason {
    NoCurrent,
    Completed,
    CollisionCourse,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Keep,
    Switch {
        candidate: usize,
        reason: SwitchReason,
    },
    Idle {
        reason: SwitchReason,
    },
}

/// Keep the current trajectory unless it finished, is now on a collision
/// course, or lost feasibility; otherwise take the best finite candidate.
pub fn select_trajectory(current: Option<&CurrentStatus>, candidates: &[Candidate]) -> Selection {
    let reason = match current {
        None => SwitchReason::NoCurrent,
        Some(c) if c.completed => SwitchReason::Completed,
        Some(c) if c.collision_course => SwitchReason::CollisionCourse,
        Some(c) if !c.still_feasible => SwitchReason::Infeasible,
        Some(_) => return Selection::Keep,
    };
    match best_candidate(candidates) {
        Some(candidate) => Selection::Switch { candidate, reason },
        None => Selection::Idle { reason },
    }
}

/// Position in `candidates` of the lowest-cost finite candidate. Ties go to
/// the earlier intercept, then to the lower index.
pub fn best_candidate(candidates: &[Candidate]) -> Option<usize> {
    let key = |c: &Candidate| {
        (
            c.deprioritized,
            c.scored.cost.value(),
            c.scored.traj.t_intercept.unwrap_or(f64::INFINITY),
            c.index,
        )
    };
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.scored.cost.is_infinite())
        .min_by(|(_, a), (_, b)| {
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
                .then(ka.3.cmp(&kb.3))
        })
        .map(|(i, _)| i)
}
