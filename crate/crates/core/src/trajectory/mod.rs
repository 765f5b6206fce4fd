//! Goal placement, rollout, scan propagation, scoring, switching and control.

pub mod control;
pub mod goal;
pub mod rollout;
pub mod scan_prop;
pub mod scoring;
pub mod switching;

pub use control::{projection_operator_filter, track_trajectory, Command};
pub use goal::{place_gap_goal, GapGoal};
pub use rollout::{extend_at_velocity, rollout_pn_trajectory};
pub use scan_prop::{is_similar, propagate_scan, PropagatedScanSet};
pub use scoring::{clearance_cost, cost_at_pose, score_trajectory, social_cost, ScoredTrajectory};
pub use switching::{
    best_candidate, select_trajectory, Candidate, CurrentStatus, Selection, SwitchReason,
};
