//! Planar equations of motion of the sphere + core system.
//!
//! Generalized coordinates are the sphere roll angle `theta` and the core angle
//! `gamma` along its pipe; every configuration-dependent term is a function of
//! `phi = gamma + theta` only. `phi = 0` is the top of the pipe (potential maximum)
//! and `phi = ±pi` the bottom.
//!
//! The matrix system keeps the printed row order: row 1 is the `gamma` equation
//! (driven by `tau_gamma`), row 2 the `theta` equation (no direct torque).

use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RobotParams;

/// Accelerations below this magnitude at rest count as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub theta: f64,
    pub theta_dot: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
}

impl State {
    pub const fn new(theta: f64, theta_dot: f64, gamma: f64, gamma_dot: f64) -> Self {
        Self { theta, theta_dot, gamma, gamma_dot }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.theta, self.theta_dot, self.gamma, self.gamma_dot]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Core angle measured from the top of the pipe in the world frame.
    pub fn phi(&self) -> f64 {
        self.gamma + self.theta
    }

    pub fn phi_dot(&self) -> f64 {
        self.gamma_dot + self.theta_dot
    }
}

impl Neg for State {
    type Output = State;

    fn neg(self) -> State {
        State::new(-self.theta, -self.theta_dot, -self.gamma, -self.gamma_dot)
    }
}

impl From<[f64; 4]> for State {
    fn from(x: [f64; 4]) -> Self {
        Self::from_array(x)
    }
}

/// Which pipe the core occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PathMode {
    /// Momentum maker: the circular pipe of radius `b`.
    #[default]
    #[serde(rename = "MM")]
    MomentumMaker,
    /// Gravity breaker: the half-elliptic pipe with semi-axes `a`, `b`.
    #[serde(rename = "GB")]
    GravityBreaker,
}

impl PathMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PathMode::MomentumMaker => "MM",
            PathMode::GravityBreaker => "GB",
        }
    }
}

impl std::str::FromStr for PathMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MM" | "mm" => Ok(PathMode::MomentumMaker),
            "GB" | "gb" => Ok(PathMode::GravityBreaker),
            other => Err(Error::Config(format!("unknown path mode `{other}`"))),
        }
    }
}

/// Coefficient set used to form the velocity terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsBackend {
    /// Velocity terms derived from the Lagrangian (energy-consistent).
    #[default]
    Derived,
    /// Velocity terms transcribed as printed: identical rows apart from dissipation.
    Paper,
}

impl std::str::FromStr for DynamicsBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(DynamicsBackend::Derived),
            "paper" => Ok(DynamicsBackend::Paper),
            other => Err(Error::Config(format!(
                "unknown dynamics backend `{other}` (expected `derived` or `paper`)"
            ))),
        }
    }
}

/// Pipe-dependent quantities substituted into the equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveGeometry {
    pub semi_minor: f64,
    pub semi_major: f64,
    pub core_inertia: f64,
    pub core_friction: f64,
}

pub fn effective_geometry(params: &RobotParams, mode: PathMode) -> EffectiveGeometry {
    let b = params.geometry.semi_major;
    match mode {
        PathMode::MomentumMaker => EffectiveGeometry {
            semi_minor: b,
            semi_major: b,
            core_inertia: params.inertias.core_mm,
            core_friction: params.friction.core_mm,
        },
        PathMode::GravityBreaker => EffectiveGeometry {
            semi_minor: params.geometry.semi_minor,
            semi_major: b,
            core_inertia: params.inertias.core_gb,
            core_friction: params.friction.core_gb,
        },
    }
}

/// Core position `(y, z)` relative to the sphere centre, m.
pub fn core_position(state: &State, eg: &EffectiveGeometry) -> (f64, f64) {
    let (s, c) = state.phi().sin_cos();
    (-eg.semi_minor * s, -eg.semi_major * c)
}

/// Kinetic energy of shell and core.
///
/// The core translates with the shell centre (`R theta_dot` along y) plus the
/// time derivative of its offset `(-a sin phi, -b cos phi)`.
pub fn kinetic_energy(state: &State, params: &RobotParams, mode: PathMode) -> f64 {
    let eg = effective_geometry(params, mode);
    let r = params.geometry.radius;
    let m_s = params.masses.shell;
    let m_c = params.masses.core;
    let (s, c) = state.phi().sin_cos();
    let wd = state.phi_dot();
    let vy = r * state.theta_dot - eg.semi_minor * wd * c;
    let vz = eg.semi_major * wd * s;
    0.5 * (m_s * r * r + params.inertias.sphere) * state.theta_dot.powi(2)
        + 0.5 * eg.core_inertia * wd * wd
        + 0.5 * m_c * (vy * vy + vz * vz)
}

/// Gravitational potential of the core on its (possibly elliptic) path,
/// `m_c g a b cos(phi) / sqrt((a cos phi)^2 + (b sin phi)^2)`.
pub fn potential_energy(state: &State, params: &RobotParams, mode: PathMode) -> f64 {
    let eg = effective_geometry(params, mode);
    let (a, b) = (eg.semi_minor, eg.semi_major);
    let (s, c) = state.phi().sin_cos();
    let d = (a * c).powi(2) + (b * s).powi(2);
    params.masses.core * params.gravity * a * b * c / d.sqrt()
}

pub fn total_energy(state: &State, params: &RobotParams, mode: PathMode) -> f64 {
    kinetic_energy(state, params, mode) + potential_energy(state, params, mode)
}

/// `M [theta_dd; gamma_dd] + N + G = [tau_gamma; 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EomTerms {
    /// Acceleration coefficients, row-major in printed order.
    pub mass: [[f64; 2]; 2],
    /// Velocity and dissipation terms.
    pub velocity: [f64; 2],
    /// Gravity terms (equal in both rows).
    pub gravity: [f64; 2],
}

impl EomTerms {
    /// Determinant of the symmetric (Lagrangian-ordered) mass matrix.
    ///
    /// The printed row order swaps the two equations, so the determinant of
    /// `mass` as stored is the negative of this value.
    pub fn inertia_determinant(&self) -> f64 {
        let m = &self.mass;
        m[1][0] * m[0][1] - m[1][1] * m[0][0]
    }
}

/// Magnitude of `dV/dphi` scale used to judge proximity to an equilibrium.
pub fn gravity_term(state: &State, params: &RobotParams, mode: PathMode) -> f64 {
    let eg = effective_geometry(params, mode);
    gravity_coefficient(state.phi(), params, &eg)
}

// dV/dphi. The numerator `D + (b^2 - a^2) cos^2 phi` of the quotient rule collapses to b^2.
fn gravity_coefficient(phi: f64, params: &RobotParams, eg: &EffectiveGeometry) -> f64 {
    let (a, b) = (eg.semi_minor, eg.semi_major);
    let (s, c) = phi.sin_cos();
    let d = (a * c).powi(2) + (b * s).powi(2);
    -params.masses.core * params.gravity * a * b.powi(3) * s / (d * d.sqrt())
}

pub fn eom_terms(
    state: &State,
    params: &RobotParams,
    mode: PathMode,
    backend: DynamicsBackend,
) -> Result<EomTerms> {
    let eg = effective_geometry(params, mode);
    let (a, b) = (eg.semi_minor, eg.semi_major);
    let ic = eg.core_inertia;
    let m_c = params.masses.core;
    let m_s = params.masses.shell;
    let r = params.geometry.radius;
    let i_s = params.inertias.sphere;
    let (s, c) = state.phi().sin_cos();
    let ellip = b * b - a * a;

    let shared = ic + a * a * m_c + m_c * s * s * ellip;
    let coupling = a * r * m_c * c;
    let m11 = shared - coupling;
    let m12 = shared;
    let m21 = m_s * r * r + i_s + m_c * r * r - 2.0 * coupling + shared;
    let m22 = shared - coupling;

    let (td, gd) = (state.theta_dot, state.gamma_dot);
    let wd = td + gd;
    let (n1, n2) = match backend {
        DynamicsBackend::Derived => {
            let centripetal = m_c * s * c * ellip * wd * wd;
            let rolling = a * r * m_c * s * wd * wd;
            (centripetal, rolling + centripetal)
        }
        DynamicsBackend::Paper => {
            let v = -td * td * (a * r * m_c * s)
                - wd * wd * (m_c * s * c * ellip)
                - gd * td * (a * r * m_c * s);
            (v, v)
        }
    };
    let gvt = gravity_coefficient(state.phi(), params, &eg);

    let terms = EomTerms {
        mass: [[m11, m12], [m21, m22]],
        velocity: [n1 + eg.core_friction * gd, n2 + params.friction.sphere * td],
        gravity: [gvt, gvt],
    };
    let det = terms.inertia_determinant();
    let scale = (m21 * m12).abs() + (m22 * m11).abs();
    if !(det.abs() > 1e-12 * scale) || !det.is_finite() {
        return Err(Error::SingularDynamics { det, state: *state });
    }
    Ok(terms)
}

/// Angular accelerations `(theta_dd, gamma_dd)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accelerations {
    pub theta_ddot: f64,
    pub gamma_ddot: f64,
}

pub fn forward_dynamics(
    state: &State,
    params: &RobotParams,
    mode: PathMode,
    backend: DynamicsBackend,
    tau_gamma: f64,
) -> Result<Accelerations> {
    let t = eom_terms(state, params, mode, backend)?;
    let [[m11, m12], [m21, m22]] = t.mass;
    let r1 = tau_gamma - t.velocity[0] - t.gravity[0];
    let r2 = -t.velocity[1] - t.gravity[1];
    let det = m11 * m22 - m12 * m21;
    Ok(Accelerations {
        theta_ddot: (r1 * m22 - m12 * r2) / det,
        gamma_ddot: (m11 * r2 - m21 * r1) / det,
    })
}

/// State derivative `[theta_dot, theta_dd, gamma_dot, gamma_dd]`.
pub fn state_derivative(
    state: &State,
    params: &RobotParams,
    mode: PathMode,
    backend: DynamicsBackend,
    tau_gamma: f64,
) -> Result<[f64; 4]> {
    let acc = forward_dynamics(state, params, mode, backend, tau_gamma)?;
    Ok([state.theta_dot, acc.theta_ddot, state.gamma_dot, acc.gamma_ddot])
}

/// At rest with accelerations below [`EQUILIBRIUM_TOL`].
pub fn is_equilibrium(
    state: &State,
    params: &RobotParams,
    mode: PathMode,
    backend: DynamicsBackend,
    tau_gamma: f64,
) -> Result<bool> {
    if state.theta_dot != 0.0 || state.gamma_dot != 0.0 {
        return Ok(false);
    }
    let acc = forward_dynamics(state, params, mode, backend, tau_gamma)?;
    Ok(acc.theta_ddot.abs() < EQUILIBRIUM_TOL && acc.gamma_ddot.abs() < EQUILIBRIUM_TOL)
}
