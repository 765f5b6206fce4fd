//! Deterministic kinematic simulator.

pub mod episode;
pub mod scenario;
pub mod trace;
pub mod world;

pub use episode::{
    local_waypoint, run_episode, EpisodeResult, EpisodeSummary, Outcome, PlanRecord, TraceRow,
};
pub use scenario::{ControlSpec, Scenario};
pub use trace::{read_trace, write_trace};
pub use world::{in_collision, raycast_scan, step_world, Agent, WorldState};
