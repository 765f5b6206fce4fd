//! Experiment drivers.

pub mod monte_carlo;
pub mod replay;

pub use monte_carlo::{
    evaluate_sample, run_monte_carlo, trial_rng, GapSample, McConfig, McReport, Tally,
    TrialOutcome, TrialRecord,
};
pub use replay::{
    plan_geometry, replay_episode, replay_trials, PlanGeometry, ReplayFrame, TrialGeometry,
};
