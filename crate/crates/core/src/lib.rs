//! Dynamic gap local planning in perception space.
//!
//! The planner consumes a full-circle laser scan, finds free-space gaps,
//! tracks their endpoints with a rotating-frame filter, propagates them over
//! a short horizon into gap tubes and synthesizes parallel-navigation
//! trajectories through feasible tubes. A deterministic kinematic simulator
//! and a Monte Carlo harness sit alongside.

pub mod config;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod manipulation;
pub mod perception;
pub mod planner;
pub mod sim;
pub mod tracking;
pub mod trajectory;
pub mod types;

pub use config::PlannerConfig;
pub use error::{DomainError, LoadError};
pub use types::*;
