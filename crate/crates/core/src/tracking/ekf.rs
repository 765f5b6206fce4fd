//! Constant-velocity point model in the rotating, accelerating ego frame.
//!
//! State `[p, v]` relative to the ego. Flow:
//! `ṗ = v − ω × p`, `v̇ = −a_e − ω × v`.
//! The flow is affine in the state for fixed ω and a_e, so the discrete
//! transition is an exact matrix exponential.

use nalgebra::{Matrix2, Matrix2x4, Matrix4x2, SMatrix, Vector4};

use crate::config::PlannerConfig;
use crate::types::{EgoState, Mat4, Vec2};

type Mat5 = SMatrix<f64, 5, 5>;

#[derive(Debug, Clone, PartialEq)]
pub struct PointModel {
    pub x: Vector4<f64>,
    pub cov: Mat4,
    pub last_update: f64,
    pub model_id: u64,
}

impl PointModel {
    /// Fresh model with the static-world prior `v_rel = −v_ego`.
    pub fn new(p: Vec2, ego_v: &Vec2, stamp: f64, model_id: u64, cfg: &PlannerConfig) -> Self {
        let cov = Mat4::from_diagonal(&Vector4::new(cfg.r_meas, cfg.r_meas, 1.0, 1.0));
        PointModel {
            x: Vector4::new(p.x, p.y, -ego_v.x, -ego_v.y),
            cov,
            last_update: stamp,
            model_id,
        }
    }

    pub fn p(&self) -> Vec2 {
        Vec2::new(self.x[0], self.x[1])
    }

    pub fn v(&self) -> Vec2 {
        Vec2::new(self.x[2], self.x[3])
    }
}

/// Exact transition over `dt` for constant ω and a_e: returns (Φ, offset).
pub fn transition(omega: f64, a: &Vec2, dt: f64) -> (Mat4, Vector4<f64>) {
    let j = Matrix2::new(0.0, -1.0, 1.0, 0.0) * omega;
    let mut g = Mat5::zeros();
    g.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-j));
    g.fixed_view_mut::<2, 2>(0, 2)
        .copy_from(&Matrix2::identity());
    g.fixed_view_mut::<2, 2>(2, 2).copy_from(&(-j));
    g[(2, 4)] = -a.x;
    g[(3, 4)] = -a.y;
    let e = (g * dt).exp();
    let phi: Mat4 = e.fixed_view::<4, 4>(0, 0).into_owned();
    let off: Vector4<f64> = e.fixed_view::<4, 1>(0, 4).into_owned();
    (phi, off)
}

pub fn model_predict(m: &PointModel, ego: &EgoState, dt: f64, cfg: &PlannerConfig) -> PointModel {
    let (phi, off) = transition(ego.omega, &ego.a, dt);
    let q = Mat4::from_diagonal(&Vector4::new(cfg.q_pos, cfg.q_pos, cfg.q_vel, cfg.q_vel)) * dt;
    let cov = phi * m.cov * phi.transpose() + q;
    PointModel {
        x: phi * m.x + off,
        cov: symmetrize(&cov),
        last_update: m.last_update + dt,
        model_id: m.model_id,
    }
}

/// Kalman correction with a position measurement.
pub fn model_correct(m: &PointModel, z: &Vec2, cfg: &PlannerConfig) -> PointModel {
    let h = Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    let r = Matrix2::identity() * cfg.r_meas;
    let s = h * m.cov * h.transpose() + r;
    let s_inv = s
        .try_inverse()
        .expect("innovation covariance is positive definite");
    let k: Matrix4x2<f64> = m.cov * h.transpose() * s_inv;
    let y = z - h * m.x;
    let ikh = Mat4::identity() - k * h;
    // Joseph form keeps the covariance symmetric and PSD.
    let cov = ikh * m.cov * ikh.transpose() + k * r * k.transpose();
    PointModel {
        x: m.x + k * y,
        cov: symmetrize(&cov),
        last_update: m.last_update,
        model_id: m.model_id,
    }
}

/// World-frame velocity of the tracked point, in ego-aligned axes.
pub fn gap_only_velocity(m: &PointModel, ego: &EgoState) -> Vec2 {
    m.v() + ego.v
}

fn symmetrize(c: &Mat4) -> Mat4 {
    (c + c.transpose()) * 0.5
}
