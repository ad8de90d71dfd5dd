//! Finite-difference Lagrangian oracle.
//!
//! Evaluates the Lagrangian and dissipation function in closed form and obtains
//! the Euler–Lagrange accelerations purely by numerical differentiation. It
//! shares no coefficient code with [`crate::dynamics`] and is used to check both
//! backends there.

use serde::Serialize;

use crate::dynamics::{forward_dynamics, DynamicsBackend, PathMode, State};
use crate::error::Result;
use crate::model::RobotParams;

/// Step for derivatives with respect to the angles.
pub const POSITION_STEP: f64 = 1e-6;
// The Lagrangian is quadratic in the rates, so central differences in the
// rates are exact for any step; a unit step keeps round-off negligible.
const RATE_STEP: f64 = 1.0;

#[derive(Debug, Clone, Copy)]
pub struct LagrangianOracle {
    m_s: f64,
    m_c: f64,
    radius: f64,
    i_s: f64,
    i_c: f64,
    a: f64,
    b: f64,
    g: f64,
    zeta_theta: f64,
    zeta_gamma: f64,
}

impl LagrangianOracle {
    pub fn new(params: &RobotParams, mode: PathMode) -> Self {
        let b = params.geometry.semi_major;
        let (a, i_c, zeta_gamma) = match mode {
            PathMode::MomentumMaker => (b, params.inertias.core_mm, params.friction.core_mm),
            PathMode::GravityBreaker => (
                params.geometry.semi_minor,
                params.inertias.core_gb,
                params.friction.core_gb,
            ),
        };
        Self {
            m_s: params.masses.shell,
            m_c: params.masses.core,
            radius: params.geometry.radius,
            i_s: params.inertias.sphere,
            i_c,
            a,
            b,
            g: params.gravity,
            zeta_theta: params.friction.sphere,
            zeta_gamma,
        }
    }

    /// `L(q, q_dot)` with `q = (theta, gamma)`.
    pub fn lagrangian(&self, q: [f64; 2], qd: [f64; 2]) -> f64 {
        let [theta, gamma] = q;
        let [td, gd] = qd;
        let phi = theta + gamma;
        let wd = td + gd;
        // Shell translation and spin.
        let vs = self.radius * td;
        let shell = 0.5 * self.m_s * vs * vs + 0.5 * self.i_s * td * td;
        // Core: shell velocity plus d/dt of (-a sin phi, -b cos phi).
        let vy = vs - self.a * wd * phi.cos();
        let vz = self.b * wd * phi.sin();
        let core = 0.5 * self.m_c * (vy * vy + vz * vz) + 0.5 * self.i_c * wd * wd;
        let ellipse_r = self.a * self.b
            / ((self.a * phi.cos()).powi(2) + (self.b * phi.sin()).powi(2)).sqrt();
        let potential = self.m_c * self.g * ellipse_r * phi.cos();
        shell + core - potential
    }

    pub fn dissipation(&self, qd: [f64; 2]) -> f64 {
        0.5 * (self.zeta_theta * qd[0] * qd[0] + self.zeta_gamma * qd[1] * qd[1])
    }

    fn momentum(&self, q: [f64; 2], qd: [f64; 2]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut hi = qd;
            let mut lo = qd;
            hi[i] += RATE_STEP;
            lo[i] -= RATE_STEP;
            *pi = (self.lagrangian(q, hi) - self.lagrangian(q, lo)) / (2.0 * RATE_STEP);
        }
        p
    }

    /// Accelerations `(theta_dd, gamma_dd)` solving
    /// `d/dt dL/dq_dot - dL/dq + dP/dq_dot = (0, tau_gamma)`.
    pub fn accelerations(&self, state: &State, tau_gamma: f64) -> [f64; 2] {
        let q = [state.theta, state.gamma];
        let qd = [state.theta_dot, state.gamma_dot];

        // Hessian in the rates (constant because L is quadratic in them).
        let h = RATE_STEP;
        let mut hess = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let eval = |si: f64, sj: f64| {
                    let mut v = qd;
                    v[i] += si * h;
                    v[j] += sj * h;
                    self.lagrangian(q, v)
                };
                hess[i][j] = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0)
                    + eval(-1.0, -1.0))
                    / (4.0 * h * h);
            }
        }

        // Directional derivative of the momenta along the motion: (dp/dq) q_dot.
        let speed = qd[0].abs().max(qd[1].abs());
        let mut convective = [0.0; 2];
        if speed > 0.0 {
            let eps = POSITION_STEP / speed;
            let fwd = [q[0] + eps * qd[0], q[1] + eps * qd[1]];
            let bwd = [q[0] - eps * qd[0], q[1] - eps * qd[1]];
            let pf = self.momentum(fwd, qd);
            let pb = self.momentum(bwd, qd);
            for i in 0..2 {
                convective[i] = (pf[i] - pb[i]) / (2.0 * eps);
            }
        }

        let mut grad = [0.0; 2];
        for (i, gi) in grad.iter_mut().enumerate() {
            let mut hi = q;
            let mut lo = q;
            hi[i] += POSITION_STEP;
            lo[i] -= POSITION_STEP;
            *gi = (self.lagrangian(hi, qd) - self.lagrangian(lo, qd)) / (2.0 * POSITION_STEP);
        }

        let mut damping = [0.0; 2];
        for (i, di) in damping.iter_mut().enumerate() {
            let mut hi = qd;
            let mut lo = qd;
            hi[i] += RATE_STEP;
            lo[i] -= RATE_STEP;
            *di = (self.dissipation(hi) - self.dissipation(lo)) / (2.0 * RATE_STEP);
        }

        let forces = [0.0, tau_gamma];
        let rhs: [f64; 2] =
            std::array::from_fn(|i| forces[i] - convective[i] + grad[i] - damping[i]);
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        [
            (rhs[0] * hess[1][1] - hess[0][1] * rhs[1]) / det,
            (hess[0][0] * rhs[1] - hess[1][0] * rhs[0]) / det,
        ]
    }
}

/// Mixed relative error `|x - ref|_inf / max(|ref|_inf, 1)`.
pub fn relative_error(x: [f64; 2], reference: [f64; 2]) -> f64 {
    let diff = (x[0] - reference[0]).abs().max((x[1] - reference[1]).abs());
    let scale = reference[0].abs().max(reference[1].abs()).max(1.0);
    diff / scale
}

#[derive(Debug, Clone, Serialize)]
pub struct BackendStats {
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
    pub worst_state: State,
}

/// Comparison of both backends against the oracle over a set of states.
#[derive(Debug, Clone, Serialize)]
pub struct BackendDiffReport {
    pub mode: PathMode,
    pub tau_gamma: f64,
    pub samples: usize,
    pub derived: BackendStats,
    pub paper: BackendStats,
}

impl BackendDiffReport {
    pub fn to_markdown(&self) -> String {
        let row = |name: &str, s: &BackendStats| {
            format!(
                "| {name} | {:.3e} | {:.3e} | ({:.4}, {:.4}, {:.4}, {:.4}) |\n",
                s.max_relative_error,
                s.mean_relative_error,
                s.worst_state.theta,
                s.worst_state.theta_dot,
                s.worst_state.gamma,
                s.worst_state.gamma_dot
            )
        };
        let mut out = format!(
            "# Backend vs oracle ({} mode, tau_gamma = {}, {} states)\n\n\
             | backend | max rel err | mean rel err | worst state |\n|---|---|---|---|\n",
            self.mode.as_str(),
            self.tau_gamma,
            self.samples
        );
        out.push_str(&row("derived", &self.derived));
        out.push_str(&row("paper", &self.paper));
        out
    }
}

pub fn backend_diff_report(
    params: &RobotParams,
    mode: PathMode,
    states: &[State],
    tau_gamma: f64,
) -> Result<BackendDiffReport> {
    let oracle = LagrangianOracle::new(params, mode);
    let stats = |backend: DynamicsBackend| -> Result<BackendStats> {
        let mut max = 0.0;
        let mut sum = 0.0;
        let mut worst = State::default();
        for s in states {
            let acc = forward_dynamics(s, params, mode, backend, tau_gamma)?;
            let e = relative_error([acc.theta_ddot, acc.gamma_ddot], oracle.accelerations(s, tau_gamma));
            sum += e;
            if e > max {
                max = e;
                worst = *s;
            }
        }
        Ok(BackendStats {
            max_relative_error: max,
            mean_relative_error: sum / states.len().max(1) as f64,
            worst_state: worst,
        })
    };
    Ok(BackendDiffReport {
        mode,
        tau_gamma,
        samples: states.len(),
        derived: stats(DynamicsBackend::Derived)?,
        paper: stats(DynamicsBackend::Paper)?,
    })
}
