//! Step-response and locomotion metrics computed from sampled trajectories.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::{EventKind, Trajectory};

/// Sphere rate below which the robot counts as at rest, rad/s.
pub const SETTLED_RATE: f64 = 0.01;
/// How long the rate must stay below [`SETTLED_RATE`], s.
pub const SETTLED_HOLD: f64 = 1.0;
/// Default settling band as a fraction of the total excursion.
pub const SETTLING_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettlingMetrics {
    /// Peak excursion beyond the final value, as a fraction of the step size.
    pub overshoot: f64,
    /// Time after which the signal stays within the band, s.
    pub settling_time: f64,
    /// The band was held for at least [`SETTLED_HOLD`] before the end.
    pub settled: bool,
}

/// Overshoot and settling time of `y(t)` about its final value.
///
/// The step runs from `y[0]` to `y[last]`. The settling time is the linearly
/// interpolated instant of the last exit from the band `|y - y_final| <= band |step|`.
/// A zero step gives `(0, 0)`. The result counts as settled only if the band is
/// then held for [`SETTLED_HOLD`].
pub fn step_response(t: &[f64], y: &[f64], band: f64) -> SettlingMetrics {
    let (Some(&y0), Some(&yf)) = (y.first(), y.last()) else {
        return SettlingMetrics { overshoot: 0.0, settling_time: 0.0, settled: true };
    };
    let step = yf - y0;
    if step == 0.0 {
        let still = y.iter().all(|&v| v == yf);
        return SettlingMetrics { overshoot: 0.0, settling_time: 0.0, settled: still };
    }
    let dir = step.signum();
    let peak = y.iter().map(|&v| (v - yf) * dir).fold(0.0, f64::max);
    let overshoot = peak / step.abs();

    let tol = band * step.abs();
    let outside = |v: f64| (v - yf).abs() > tol;
    let settling_time = match y.iter().rposition(|&v| outside(v)) {
        None => t[0],
        Some(k) if k + 1 >= y.len() => t[k],
        Some(k) => {
            // Interpolate where |y - yf| meets the band between k and k+1.
            let (ea, eb) = ((y[k] - yf).abs(), (y[k + 1] - yf).abs());
            let w = if ea == eb { 1.0 } else { ((ea - tol) / (ea - eb)).clamp(0.0, 1.0) };
            t[k] + w * (t[k + 1] - t[k])
        }
    };
    let settled = t.last().is_none_or(|&te| te - settling_time >= SETTLED_HOLD - 1e-9);
    SettlingMetrics { overshoot, settling_time, settled }
}

/// Step response of the sphere angle.
pub fn settling_metrics(traj: &Trajectory, band: f64) -> SettlingMetrics {
    step_response(&traj.times(), &traj.theta(), band)
}

/// First time the sphere rate stays below [`SETTLED_RATE`] for [`SETTLED_HOLD`].
pub fn settled_time(traj: &Trajectory) -> Option<f64> {
    let mut start: Option<f64> = None;
    for s in &traj.samples {
        if s.state.theta_dot.abs() < SETTLED_RATE {
            let t0 = *start.get_or_insert(s.t);
            if s.t - t0 >= SETTLED_HOLD - 1e-9 {
                return Some(t0);
            }
        } else {
            start = None;
        }
    }
    None
}

/// `|theta_a(t)| - |theta_b(t)|`.
pub fn offset_metric(a: &Trajectory, b: &Trajectory, t_eval: f64) -> Result<f64> {
    Ok(a.state_at(t_eval)?.theta.abs() - b.state_at(t_eval)?.theta.abs())
}

pub fn min_theta_dot(traj: &Trajectory) -> f64 {
    traj.samples.iter().map(|s| s.state.theta_dot).fold(f64::INFINITY, f64::min)
}

/// Number of strict sign changes in the sphere rate.
pub fn theta_dot_sign_changes(traj: &Trajectory) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for s in &traj.samples {
        let v = s.state.theta_dot;
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Peak-to-peak sphere angle over the trailing `window` seconds.
pub fn trailing_ripple(traj: &Trajectory, window: f64) -> f64 {
    let t_from = traj.t_end() - window;
    let (lo, hi) = traj
        .samples
        .iter()
        .filter(|s| s.t >= t_from)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.state.theta), hi.max(s.state.theta))
        });
    if hi >= lo { hi - lo } else { 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub t: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
    pub theta: f64,
}

/// Every GB exit in order.
pub fn jump_events(traj: &Trajectory) -> Vec<JumpEvent> {
    traj.events_of(EventKind::GbExit)
        .map(|e| JumpEvent { t: e.t, gamma: e.state.gamma, gamma_dot: e.state.gamma_dot, theta: e.state.theta })
        .collect()
}

/// Largest backward step of theta between consecutive samples from `t_from` on.
pub fn max_backward_step(traj: &Trajectory, t_from: f64) -> f64 {
    traj.samples
        .windows(2)
        .filter(|w| w[0].t >= t_from)
        .map(|w| w[0].state.theta - w[1].state.theta)
        .fold(0.0, f64::max)
}

/// Least-squares slope through the origin of `y` against `x`.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> Option<f64> {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    (sxx > 0.0).then(|| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx)
}
