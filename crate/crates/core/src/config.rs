//! Planner parameters. Every field has a default and may be overridden from
//! a TOML table.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Robot inscribed radius (m).
    pub r_inscr: f64,
    /// Gap point association cutoff (m).
    pub tau_assoc: f64,
    /// Inflation ratio applied to `r_inscr`.
    pub tau_infl: f64,
    /// Speed above which a gap point counts as dynamic (m/s).
    pub v_min: f64,
    /// Propagation horizon (s).
    pub horizon: f64,
    /// Propagation and rollout step (s).
    pub dt: f64,
    /// Terminal distance weight.
    pub w: f64,
    pub c_obs: f64,
    pub w_2: f64,
    /// Obstacle distance beyond which pose cost is zero (m).
    pub r_max_penalty: f64,
    pub r_min_po: f64,
    pub r_nom_po: f64,
    /// Range jump that opens a radial gap (m).
    pub tau_radial: f64,
    /// Shortest run of max-range beams that forms a swept gap.
    pub swept_min_beams: usize,
    pub scan_rate: f64,
    pub plan_rate: f64,
    pub social_weight: f64,
    /// Speed used for parallel-navigation rollouts (m/s).
    pub v_e: f64,
    /// Componentwise command limit (m/s).
    pub v_max: f64,
    pub k_p: f64,
    pub eps_goal: f64,
    pub kappa_margin: f64,
    /// Width of the sub-gap replacing a gap wider than π (rad).
    pub reduced_span: f64,
    /// Gap points within this distance of the sensor range are planned as static (m).
    pub range_edge: f64,
    /// Local waypoint lookahead along the global line (m).
    pub lookahead: f64,
    pub q_pos: f64,
    pub q_vel: f64,
    pub r_meas: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let r_inscr = 0.2;
        let tau_infl = 1.2;
        let r_infl = r_inscr * tau_infl;
        PlannerConfig {
            r_inscr,
            tau_assoc: 0.8,
            tau_infl,
            v_min: 0.1,
            horizon: 3.0,
            dt: 0.1,
            w: 1.0,
            c_obs: 1.0,
            w_2: 2.0,
            r_max_penalty: 1.0,
            r_min_po: r_infl,
            r_nom_po: 2.0 * r_infl,
            tau_radial: 4.0 * r_inscr,
            swept_min_beams: 3,
            scan_rate: 25.0,
            plan_rate: 5.0,
            social_weight: 0.0,
            v_e: 1.0,
            v_max: 1.0,
            k_p: 2.0,
            eps_goal: 0.15,
            kappa_margin: 0.1,
            reduced_span: std::f64::consts::FRAC_PI_2,
            range_edge: 0.6,
            lookahead: 3.0,
            q_pos: 1e-4,
            q_vel: 5e-2,
            r_meas: 1e-3,
        }
    }
}

impl PlannerConfig {
    pub fn r_infl(&self) -> f64 {
        self.tau_infl * self.r_inscr
    }

    /// Number of propagation steps covering `[0, horizon]`.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), String> {
        let weights = [self.w, self.c_obs, self.w_2, self.social_weight, self.k_p];
        if self.tau_infl < 1.0 {
            return Err("tau_infl must be at least 1".into());
        }
        if self.r_min_po >= self.r_nom_po {
            return Err("r_min_po must be below r_nom_po".into());
        }
        if !(self.reduced_span > 0.0 && self.reduced_span < std::f64::consts::PI) {
            return Err("reduced_span must lie in (0, π)".into());
        }
        if self.dt <= 0.0 || self.horizon <= 0.0 {
            return Err("dt and horizon must be positive".into());
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err("weights must be non-negative".into());
        }
        if self.v_e <= 0.0 || self.v_max <= 0.0 {
            return Err("speeds must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PlannerConfig::default();
        c.validate().unwrap();
        assert!((c.r_infl() - 0.24).abs() < 1e-12);
        assert_eq!(c.n_steps(), 30);
    }

    #[test]
    fn partial_toml_override() {
        let c: PlannerConfig = toml::from_str("tau_infl = 1.5\nsocial_weight = 0.3").unwrap();
        assert_eq!(c.tau_infl, 1.5);
        assert_eq!(c.social_weight, 0.3);
        assert_eq!(c.dt, 0.1);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(toml::from_str::<PlannerConfig>("nope = 1").is_err());
    }
}
