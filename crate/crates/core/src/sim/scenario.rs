//! Scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::LoadError;
use crate::sim::world::{Agent, WorldState};
use crate::types::{EgoState, Vec2};

fn v2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoSpec {
    pub start: [f64; 2],
    #[serde(default)]
    pub theta: f64,
    pub goal: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
}

fn default_radius() -> f64 {
    0.2
}

fn default_v_max() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSpec {
    pub n_beams: usize,
    pub range_max: f64,
    pub noise_sigma: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        SensorSpec {
            n_beams: 512,
            range_max: 5.0,
            noise_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub timeout: f64,
    pub goal_tolerance: f64,
    pub dt: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            timeout: 180.0,
            goal_tolerance: 0.3,
            dt: 0.01,
        }
    }
}

/// How the ego is driven.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ControlSpec {
    #[default]
    Planner,
    /// Fixed ego-frame velocity with planning disabled.
    Constant { velocity: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default)]
    pub waypoints: Vec<[f64; 2]>,
    #[serde(default)]
    pub speed: f64,
    #[serde(default, rename = "loop")]
    pub looped: bool,
    #[serde(default)]
    pub start_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub ego: EgoSpec,
    #[serde(default)]
    pub sensor: SensorSpec,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub control: ControlSpec,
    #[serde(default)]
    pub walls: Vec<WallSpec>,
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let s: Scenario = toml::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), LoadError> {
        let bad = |m: String| Err(LoadError::Invalid(m));
        if self.sensor.n_beams < 3 {
            return bad("sensor.n_beams must be at least 3".into());
        }
        if self.sensor.range_max <= 0.0 || self.sensor.noise_sigma < 0.0 {
            return bad("sensor range must be positive and noise non-negative".into());
        }
        if self.limits.dt <= 0.0 || self.limits.timeout <= 0.0 || self.limits.goal_tolerance <= 0.0
        {
            return bad("limits must be positive".into());
        }
        if self.ego.radius <= 0.0 || self.ego.v_max <= 0.0 {
            return bad("ego radius and v_max must be positive".into());
        }
        for (i, w) in self.walls.iter().enumerate() {
            if w.points.len() < 2 {
                return bad(format!("wall {i} needs at least two points"));
            }
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.radius <= 0.0 {
                return bad(format!("agent {i} radius must be positive"));
            }
            if a.speed < 0.0 {
                return bad(format!("agent {i} speed must be non-negative"));
            }
            if a.speed > 0.0 && a.waypoints.is_empty() {
                return bad(format!("agent {i} moves but has no waypoints"));
            }
        }
        let all = self
            .walls
            .iter()
            .flat_map(|w| w.points.iter())
            .chain(
                self.agents
                    .iter()
                    .flat_map(|a| std::iter::once(&a.center).chain(&a.waypoints)),
            )
            .chain([&self.ego.start, &self.ego.goal]);
        if all.flatten().any(|x| !x.is_finite()) {
            return bad("coordinates must be finite".into());
        }
        Ok(())
    }

    pub fn start(&self) -> Vec2 {
        v2(self.ego.start)
    }

    pub fn goal(&self) -> Vec2 {
        v2(self.ego.goal)
    }

    pub fn segments(&self) -> Vec<(Vec2, Vec2)> {
        let mut out = Vec::new();
        for w in &self.walls {
            let pts: Vec<Vec2> = w.points.iter().map(|p| v2(*p)).collect();
            for pair in pts.windows(2) {
                out.push((pair[0], pair[1]));
            }
            if w.closed && pts.len() > 2 {
                out.push((pts[pts.len() - 1], pts[0]));
            }
        }
        out
    }

    pub fn initial_world(&self) -> WorldState {
        let ego = EgoState {
            p: self.start(),
            theta: self.ego.theta,
            r_inscr: self.ego.radius,
            v_max: self.ego.v_max,
            ..Default::default()
        };
        let agents = self
            .agents
            .iter()
            .map(|a| {
                let mut ag = Agent::new(
                    v2(a.center),
                    a.radius,
                    a.waypoints.iter().map(|p| v2(*p)).collect(),
                    a.speed,
                    a.looped,
                );
                ag.start_time = a.start_time;
                ag
            })
            .collect();
        WorldState::new(ego, agents, self.segments())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "minimal"
[ego]
start = [0.0, 0.0]
goal = [5.0, 0.0]
"#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.sensor, SensorSpec::default());
        assert_eq!(s.limits.timeout, 180.0);
        assert_eq!(s.control, ControlSpec::Planner);
        assert!(s.initial_world().agents.is_empty());
    }

    #[test]
    fn walls_and_agents() {
        let text = format!(
            "{MINIMAL}\n[[walls]]\npoints = [[0,1],[1,1],[1,2]]\nclosed = true\n\n[[agents]]\ncenter = [3,0]\nradius = 0.3\nwaypoints = [[0,0]]\nspeed = 0.5\nloop = true\n\n[control]\nmode = \"constant\"\nvelocity = [1.0, 0.0]\n"
        );
        let s = Scenario::parse(&text).unwrap();
        assert_eq!(s.segments().len(), 3);
        assert!(s.agents[0].looped);
        assert_eq!(
            s.control,
            ControlSpec::Constant {
                velocity: [1.0, 0.0]
            }
        );
    }

    #[test]
    fn malformed_is_a_parse_error() {
        assert!(matches!(
            Scenario::parse("name = "),
            Err(LoadError::Parse(_))
        ));
        assert!(matches!(
            Scenario::parse(&format!("{MINIMAL}\nbogus = 1\n")),
            Err(LoadError::Parse(_))
        ));
    }

    #[test]
    fn invalid_values_rejected() {
        let text = format!("{MINIMAL}\n[[agents]]\ncenter = [3,0]\nradius = -1.0\n");
        assert!(matches!(Scenario::parse(&text), Err(LoadError::Invalid(_))));
        let text = format!("{MINIMAL}\n[sensor]\nn_beams = 2\n");
        assert!(matches!(Scenario::parse(&text), Err(LoadError::Invalid(_))));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            Scenario::load("/nonexistent/x.toml"),
            Err(LoadError::Io { .. })
        ));
    }
}
