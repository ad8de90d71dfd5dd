//! Dormand–Prince 5(4) integration with dense output on a fixed sampling grid.
//!
//! The right-hand side may change at sample instants (hybrid switching). When
//! [`OdeSystem::on_sample`] reports a change, the step in progress is cut at the
//! sample and integration restarts from the interpolated state.

use serde::{Deserialize, Serialize};

use crate::controller::Region;
use crate::dynamics::{PathMode, State};
use crate::error::{Error, Result};

/// Smallest step the adaptive controller may take before giving up.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_dt: f64,
    pub max_step: f64,
    pub t_end: f64,
    /// Use classic fixed-step RK4 with this step instead of the adaptive pair.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            sample_dt: 0.01,
            max_step: 0.01,
            t_end: 10.0,
            fixed_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive and finite");
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.t_end) {
            return bad("sample_dt must lie in (0, t_end]");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step must be positive");
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return bad("fixed_step must be positive");
            }
        }
        Ok(())
    }

    /// Sample instants `0, dt, 2 dt, ...` plus `t_end` when it is not on the grid.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_end / self.sample_dt + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * self.sample_dt).collect();
        let last = *times.last().unwrap_or(&0.0);
        if self.t_end - last > 1e-9 * self.sample_dt {
            times.push(self.t_end);
        } else if let Some(t) = times.last_mut() {
            *t = t.min(self.t_end);
        }
        times
    }
}

/// A first-order system `x' = f(t, x)` whose right-hand side may switch at
/// sample instants.
pub trait OdeSystem<const N: usize> {
    fn derivative(&self, t: f64, x: &[f64; N]) -> Result<[f64; N]>;

    /// Called at every sample instant, including `t = 0` and `t_end`.
    /// Returns `true` when the right-hand side changed.
    fn on_sample(&mut self, _t: f64, _x: &[f64; N]) -> Result<bool> {
        Ok(false)
    }
}

/// Wraps a plain closure as a non-switching system.
pub struct FnSystem<F>(pub F);

impl<const N: usize, F> OdeSystem<N> for FnSystem<F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn derivative(&self, t: f64, x: &[f64; N]) -> Result<[f64; N]> {
        Ok((self.0)(t, x))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    pub mode: PathMode,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    GbEntry,
    GbExit,
    RegionSwitch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub state: State,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.theta).collect()
    }

    pub fn final_state(&self) -> Option<State> {
        self.samples.last().map(|s| s.state)
    }

    /// Linearly interpolated state at `t`.
    pub fn state_at(&self, t: f64) -> Result<State> {
        let t_end = self.t_end();
        let first = self.samples.first().ok_or(Error::Range { t_eval: t, t_end })?;
        if !(t >= first.t && t <= t_end) {
            return Err(Error::Range { t_eval: t, t_end });
        }
        let k = self.samples.partition_point(|s| s.t < t);
        if k == 0 {
            return Ok(first.state);
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let w = (t - a.t) / (b.t - a.t);
        let (xa, xb) = (a.state.to_array(), b.state.to_array());
        Ok(State::from_array(std::array::from_fn(|i| xa[i] + w * (xb[i] - xa[i]))))
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI step-size control.
const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn combine<const N: usize>(x: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| x[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn checked<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t: f64,
    x: &[f64; N],
    stats: &mut SolverStats,
) -> Result<[f64; N]> {
    stats.evaluations += 1;
    let d = sys.derivative(t, x)?;
    if d.iter().all(|v| v.is_finite()) {
        Ok(d)
    } else {
        Err(Error::Numeric { t })
    }
}

/// Quartic dense-output polynomial of one accepted step.
struct Dense<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.r;
        std::array::from_fn(|i| {
            r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])))
        })
    }
}

fn error_norm<const N: usize>(err: &[f64; N], x: &[f64; N], y: &[f64; N], cfg: &IntegratorConfig) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * x[i].abs().max(y[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t: f64,
    x: &[f64; N],
    f0: &[f64; N],
    cfg: &IntegratorConfig,
    stats: &mut SolverStats,
) -> Result<f64> {
    let scale: [f64; N] = std::array::from_fn(|i| cfg.abs_tol + cfg.rel_tol * x[i].abs());
    let rms = |v: &[f64; N]| ((0..N).map(|i| (v[i] / scale[i]).powi(2)).sum::<f64>() / N as f64).sqrt();
    let (d0, d1) = (rms(x), rms(f0));
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(cfg.max_step);
    let x1 = combine(x, h0, &[(1.0, f0)]);
    let f1 = checked(sys, t + h0, &x1, stats)?;
    let df: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = rms(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(cfg.max_step))
}

/// Integrates `sys` from `x0` at `t = 0` to `cfg.t_end`, returning the states at
/// [`IntegratorConfig::sample_times`].
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    x0: [f64; N],
    cfg: &IntegratorConfig,
) -> Result<Solution<N>> {
    cfg.validate()?;
    let samples = cfg.sample_times();
    match cfg.fixed_step {
        Some(h) => integrate_rk4(sys, x0, &samples, h),
        None => integrate_dopri(sys, x0, &samples, cfg),
    }
}

fn integrate_dopri<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    x0: [f64; N],
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Solution<N>> {
    let mut stats = SolverStats::default();
    let mut times = Vec::with_capacity(samples.len());
    let mut states = Vec::with_capacity(samples.len());
    let t_end = *samples.last().expect("sample grid is never empty");

    let mut t = 0.0;
    let mut x = x0;
    times.push(t);
    states.push(x);
    sys.on_sample(t, &x)?;
    let mut next = 1;

    let mut f = checked(sys, t, &x, &mut stats)?;
    let mut h = initial_step(sys, t, &x, &f, cfg, &mut stats)?;
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;

    while next < samples.len() {
        h = h.min(cfg.max_step).min(t_end - t);
        if h < MIN_STEP {
            return Err(Error::Stiffness { t, step: h, state: x.to_vec() });
        }

        let k1 = f;
        let k2 = checked(sys, t + C2 * h, &combine(&x, h, &[(A21, &k1)]), &mut stats)?;
        let k3 = checked(sys, t + C3 * h, &combine(&x, h, &[(A31, &k1), (A32, &k2)]), &mut stats)?;
        let k4 = checked(
            sys,
            t + C4 * h,
            &combine(&x, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            &mut stats,
        )?;
        let k5 = checked(
            sys,
            t + C5 * h,
            &combine(&x, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            &mut stats,
        )?;
        let k6 = checked(
            sys,
            t + h,
            &combine(&x, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            &mut stats,
        )?;
        let y = combine(&x, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = checked(sys, t + h, &y, &mut stats)?;
        let err_vec: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = error_norm(&err_vec, &x, &y, cfg);

        let fac11 = err.powf(0.2 - 0.75 * BETA);
        if err <= 1.0 {
            stats.accepted += 1;
            let fac = (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if rejected_last {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            rejected_last = false;

            let t_new = if t_end - (t + h) < MIN_STEP { t_end } else { t + h };
            let ydiff: [f64; N] = std::array::from_fn(|i| y[i] - x[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let dense = Dense {
                t0: t,
                h,
                r: [
                    x,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i])
                    }),
                ],
            };

            let tol = 1e-12 * t_end.max(1.0);
            let mut restart = None;
            let mut switched = false;
            while next < samples.len() && samples[next] <= t_new + tol {
                let ts = samples[next];
                let xs = if (ts - t_new).abs() <= tol { y } else { dense.eval(ts) };
                times.push(ts);
                states.push(xs);
                next += 1;
                if sys.on_sample(ts, &xs)? {
                    switched = true;
                    if ts < t_new - tol {
                        restart = Some((ts, xs));
                        break;
                    }
                }
            }

            match restart {
                Some((ts, xs)) => {
                    stats.restarts += 1;
                    t = ts;
                    x = xs;
                    f = checked(sys, t, &x, &mut stats)?;
                    h = h_new.min(h);
                }
                None => {
                    t = t_new;
                    x = y;
                    f = if switched { checked(sys, t, &x, &mut stats)? } else { k7 };
                    h = h_new;
                }
            }
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
    Ok(Solution { times, states, stats })
}

fn integrate_rk4<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    x0: [f64; N],
    samples: &[f64],
    h_req: f64,
) -> Result<Solution<N>> {
    let mut stats = SolverStats::default();
    let mut times = vec![0.0];
    let mut states = vec![x0];
    let mut x = x0;
    sys.on_sample(0.0, &x)?;
    for w in samples.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let n = ((tb - ta) / h_req - 1e-9).ceil().max(1.0) as usize;
        let h = (tb - ta) / n as f64;
        for j in 0..n {
            let t = ta + j as f64 * h;
            let k1 = checked(sys, t, &x, &mut stats)?;
            let k2 = checked(sys, t + 0.5 * h, &combine(&x, h, &[(0.5, &k1)]), &mut stats)?;
            let k3 = checked(sys, t + 0.5 * h, &combine(&x, h, &[(0.5, &k2)]), &mut stats)?;
            let k4 = checked(sys, t + h, &combine(&x, h, &[(1.0, &k3)]), &mut stats)?;
            x = combine(&x, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
            stats.accepted += 1;
        }
        times.push(tb);
        states.push(x);
        if sys.on_sample(tb, &x)? {
            stats.restarts += 1;
        }
    }
    Ok(Solution { times, states, stats })
}
