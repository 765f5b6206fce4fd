//! Fixtures shared by the benchmarks.

use dyngap::planner::{Odom, Planner};
use dyngap::sim::{raycast_scan, step_world, Scenario};
use dyngap::trajectory::Command;
use dyngap::{EgoState, PlannerConfig, Scan, Vec2};

/// A room with pillars and two moving agents, seen from the origin.
pub const CLUTTER: &str = r#"
name = "clutter"

[ego]
start = [0.0, 0.0]
goal = [6.0, 0.0]

[[walls]]
points = [[-3.0, 3.0], [4.0, 3.0], [4.0, 0.6]]

[[walls]]
points = [[4.0, -0.6], [4.0, -3.0], [-3.0, -3.0], [-3.0, 3.0]]

[[agents]]
center = [1.5, 1.2]
radius = 0.3

[[agents]]
center = [1.5, -1.4]
radius = 0.3

[[agents]]
center = [2.5, 1.6]
radius = 0.3
waypoints = [[2.5, -2.0]]
speed = 0.6

[[agents]]
center = [-1.5, -1.8]
radius = 0.3
waypoints = [[-1.5, 2.0]]
speed = 0.6
"#;

pub fn clutter_scenario() -> Scenario {
    Scenario::parse(CLUTTER).expect("fixture parses")
}

/// `n` consecutive scans at the scan rate with the agents advancing.
pub fn clutter_scans(n: usize, cfg: &PlannerConfig) -> Vec<Scan> {
    let sc = clutter_scenario();
    let mut world = sc.initial_world();
    let dt = 1.0 / cfg.scan_rate;
    (0..n)
        .map(|_| {
            let mut s = raycast_scan(&world, sc.sensor.n_beams, sc.sensor.range_max);
            s.stamp = world.t;
            world = step_world(&world, &Command::default(), dt);
            s
        })
        .collect()
}

/// A planner that has tracked a few scans of the clutter room.
pub fn warm_planner(cfg: &PlannerConfig) -> Planner {
    let mut p = Planner::new(cfg.clone());
    for s in clutter_scans(10, cfg) {
        p.on_scan(&s, &EgoState::default());
    }
    p
}

pub fn plan_once(p: &mut Planner, now: f64) -> usize {
    let out = p.plan(
        &EgoState::default(),
        &Odom::default(),
        &Vec2::new(3.0, 0.0),
        now,
    );
    out.gaps.len()
}
