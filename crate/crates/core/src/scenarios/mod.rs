//! Experiment definitions, the hybrid simulation loop, and per-experiment reports.

pub mod metrics;

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::{controller_step, ControllerConfig, ControllerState};
use crate::dynamics::{gravity_term, state_derivative, DynamicsBackend, PathMode, State};
use crate::error::{Error, Result};
use crate::hydraulics::core_torque;
use crate::integrator::{integrate, Event, EventKind, IntegratorConfig, OdeSystem, Sample, Trajectory};
use crate::model::RobotParams;

pub use metrics::{
    jump_events, max_backward_step, min_theta_dot, offset_metric, settled_time, settling_metrics,
    step_response, theta_dot_sign_changes, trailing_ripple, JumpEvent, SettlingMetrics, SETTLING_BAND,
};

pub const BUILTIN_NAMES: [&str; 7] = ["case1", "case2", "case3", "case4", "mass-sweep", "forward", "baseline"];

/// Run horizon of the free-response studies, s.
pub const FREE_RESPONSE_HORIZON: f64 = 15.0;
/// Run horizon of the pipe comparison and the forward run, s.
pub const DRIVEN_HORIZON: f64 = 10.0;
/// Core friction used for the pipe comparison, N·m·s.
pub const CASE4_CORE_FRICTION: f64 = 0.075;
/// Fraction of `m_c g b` below which the gravity term counts as an equilibrium.
pub const EQUILIBRIUM_PROXIMITY: f64 = 0.05;
/// Trailing window over which residual ripple is measured in the mass sweep, s.
pub const RIPPLE_WINDOW: f64 = 2.0;
/// Bisection steps used to refine a reversal threshold.
pub const BISECTION_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// `m* = m_c / M_s`, with `M_s` fixed.
    MassRatio,
    Gamma0,
    ThetaDot0,
    GammaDot0,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::MassRatio => "mass_ratio",
            SweepParam::Gamma0 => "gamma0",
            SweepParam::ThetaDot0 => "theta_dot0",
            SweepParam::GammaDot0 => "gamma_dot0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

/// Companion run used for offset metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Same run with the controller disabled and the core kept in MM.
    PendulumBaseline,
    /// Same run pinned to another pipe.
    PinnedMode(PathMode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub x0: State,
    pub params: RobotParams,
    #[serde(default)]
    pub controller: ControllerConfig,
    /// Constant core torque, N·m.
    #[serde(default)]
    pub torque: f64,
    #[serde(default)]
    pub mode0: PathMode,
    pub t_end: f64,
    #[serde(default)]
    pub backend: DynamicsBackend,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

impl ScenarioSpec {
    fn free_response(name: &str, params: RobotParams, x0: State) -> Self {
        Self {
            name: name.to_owned(),
            x0,
            params,
            controller: ControllerConfig::disabled(),
            torque: 0.0,
            mode0: PathMode::MomentumMaker,
            t_end: FREE_RESPONSE_HORIZON,
            backend: DynamicsBackend::Derived,
            integrator: IntegratorConfig::default(),
            reference: None,
            sweep: None,
        }
    }

    /// One of [`BUILTIN_NAMES`], built on `base` parameters.
    pub fn builtin(name: &str, base: &RobotParams) -> Result<Self> {
        let upper = -3.0 * PI / 4.0;
        let spec = match name {
            "case1" => Self {
                sweep: Some(Sweep {
                    parameter: SweepParam::Gamma0,
                    values: vec![-PI / 2.0, -7.0 * PI / 12.0, -2.0 * PI / 3.0, upper, -5.0 * PI / 6.0, -PI],
                }),
                ..Self::free_response(name, base.clone(), State::new(0.0, 0.0, upper, 0.0))
            },
            "case2" => Self {
                sweep: Some(Sweep { parameter: SweepParam::ThetaDot0, values: linspace(-PI, PI, 9) }),
                ..Self::free_response(name, base.clone(), State::new(0.0, 0.0, upper, 0.0))
            },
            "case3" => Self {
                sweep: Some(Sweep { parameter: SweepParam::GammaDot0, values: linspace(-3.0 * PI, 3.0 * PI, 25) }),
                ..Self::free_response(name, base.clone(), State::new(0.0, 0.0, upper, 0.0))
            },
            "case4" => Self {
                t_end: DRIVEN_HORIZON,
                reference: Some(Reference::PinnedMode(PathMode::GravityBreaker)),
                ..Self::free_response(
                    name,
                    base.with_core_friction(CASE4_CORE_FRICTION)?,
                    State::new(-PI - PI / 6.0, 0.1, 0.0, -PI / 8.0),
                )
            },
            "mass-sweep" => Self {
                sweep: Some(Sweep {
                    parameter: SweepParam::MassRatio,
                    values: (1..=25).map(|k| 0.02 * f64::from(k)).collect(),
                }),
                ..Self::free_response(name, base.clone(), State::new(0.0, 0.0, -3.0 * PI / 2.0, 0.0))
            },
            "forward" | "baseline" => {
                let forward = name == "forward";
                Self {
                    controller: if forward { ControllerConfig::default() } else { ControllerConfig::disabled() },
                    torque: core_torque(base, -1)?,
                    t_end: DRIVEN_HORIZON,
                    reference: forward.then_some(Reference::PendulumBaseline),
                    ..Self::free_response(name, base.clone(), State::new(0.0, 0.0, -PI / 2.0, 0.0))
                }
            }
            other => return Err(Error::UnknownScenario(other.to_owned())),
        };
        Ok(spec)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_owned()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter { name: "t_end", reason: format!("must be positive, got {}", self.t_end) });
        }
        if !self.x0.is_finite() {
            return Err(Error::InvalidParameter { name: "x0", reason: "must be finite".into() });
        }
        self.controller.validate()?;
        self.integrator_config().validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::EmptyGrid);
            }
        }
        Ok(())
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        self.integrator.with_t_end(self.t_end)
    }

    /// This spec with one sweep parameter set to `value`; the sweep is dropped.
    pub fn at(&self, parameter: SweepParam, value: f64) -> Result<Self> {
        let mut s = Self { sweep: None, ..self.clone() };
        match parameter {
            SweepParam::MassRatio => s.params = s.params.with_core_mass(value * s.params.masses.shell)?,
            SweepParam::Gamma0 => s.x0.gamma = value,
            SweepParam::ThetaDot0 => s.x0.theta_dot = value,
            SweepParam::GammaDot0 => s.x0.gamma_dot = value,
        }
        Ok(s)
    }

    /// The companion run described by `reference`, if any.
    pub fn reference_spec(&self) -> Option<Self> {
        let mode0 = match self.reference? {
            Reference::PendulumBaseline => PathMode::MomentumMaker,
            Reference::PinnedMode(m) => m,
        };
        Some(Self {
            name: format!("{}-reference", self.name),
            controller: ControllerConfig { enabled: false, ..self.controller },
            mode0,
            reference: None,
            sweep: None,
            ..self.clone()
        })
    }
}

/// The closed-loop system integrated by [`simulate`].
struct HybridSystem<'a> {
    spec: &'a ScenarioSpec,
    cs: ControllerState,
    samples: Vec<Sample>,
    events: Vec<Event>,
}

impl HybridSystem<'_> {
    fn near_equilibrium(&self, s: &State) -> bool {
        let p = &self.spec.params;
        let scale = p.masses.core * p.gravity * p.geometry.semi_major;
        gravity_term(s, p, self.cs.mode).abs() < EQUILIBRIUM_PROXIMITY * scale
    }
}

impl OdeSystem<4> for HybridSystem<'_> {
    fn derivative(&self, _t: f64, x: &[f64; 4]) -> Result<[f64; 4]> {
        let s = self.spec;
        state_derivative(&State::from_array(*x), &s.params, self.cs.mode, s.backend, s.torque)
    }

    fn on_sample(&mut self, t: f64, x: &[f64; 4]) -> Result<bool> {
        let state = State::from_array(*x);
        let before = self.cs;
        // A disabled controller leaves the core in its initial pipe.
        if self.spec.controller.enabled {
            let near = self.near_equilibrium(&state);
            self.cs = controller_step(&state, &before, &self.spec.controller, near);
        }
        let after = self.cs;
        match (before.mode, after.mode) {
            (PathMode::MomentumMaker, PathMode::GravityBreaker) => {
                self.events.push(Event { t, kind: EventKind::GbEntry, state })
            }
            (PathMode::GravityBreaker, PathMode::MomentumMaker) => {
                self.events.push(Event { t, kind: EventKind::GbExit, state })
            }
            _ => {}
        }
        if before.region != after.region {
            self.events.push(Event { t, kind: EventKind::RegionSwitch, state });
        }
        self.samples.push(Sample { t, state, mode: after.mode, region: after.region });
        Ok(before.mode != after.mode)
    }
}

/// Integrates one scenario; the controller runs at every sample instant.
pub fn simulate(spec: &ScenarioSpec) -> Result<Trajectory> {
    spec.validate()?;
    let mut cs = ControllerState::initial(&spec.x0);
    cs.mode = spec.mode0;
    let mut sys = HybridSystem { spec, cs, samples: Vec::new(), events: Vec::new() };
    integrate(&mut sys, spec.x0.to_array(), &spec.integrator_config())?;
    Ok(Trajectory { samples: sys.samples, events: sys.events })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub final_theta: f64,
    /// `|theta(t_end)| - |theta_ref(t_end)|` against the reference run.
    pub offset_vs_baseline: Option<f64>,
    pub overshoot: f64,
    pub settling_time: f64,
    /// Settling band was reached before the horizon.
    pub settled: bool,
    /// Start of the first interval with `|theta_dot| < 0.01 rad/s` held for 1 s.
    pub settled_at: Option<f64>,
    pub min_theta_dot: f64,
    pub reversal_threshold: Option<f64>,
    pub jump_events: Vec<JumpEvent>,
    pub gb_entries: usize,
    pub region_switches: usize,
    pub reference_final_theta: Option<f64>,
    pub reference_min_theta_dot: Option<f64>,
    pub reference_settled_at: Option<f64>,
}

impl Metrics {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let sm = settling_metrics(traj, SETTLING_BAND);
        Self {
            final_theta: traj.final_state().map_or(f64::NAN, |s| s.theta),
            offset_vs_baseline: None,
            overshoot: sm.overshoot,
            settling_time: sm.settling_time,
            settled: sm.settled,
            settled_at: settled_time(traj),
            min_theta_dot: min_theta_dot(traj),
            reversal_threshold: None,
            jump_events: jump_events(traj),
            gb_entries: traj.events_of(EventKind::GbEntry).count(),
            region_switches: traj.events_of(EventKind::RegionSwitch).count(),
            reference_final_theta: None,
            reference_min_theta_dot: None,
            reference_settled_at: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub reference: Option<Trajectory>,
    pub metrics: Metrics,
}

/// Runs a single (non-sweep) scenario and its reference run.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunOutcome> {
    let (trajectory, reference) = match spec.reference_spec() {
        Some(r) => {
            let (a, b) = rayon::join(|| simulate(spec), || simulate(&r));
            (a?, Some(b?))
        }
        None => (simulate(spec)?, None),
    };
    let mut metrics = Metrics::from_trajectory(&trajectory);
    if let Some(r) = &reference {
        metrics.offset_vs_baseline = Some(offset_metric(&trajectory, r, spec.t_end)?);
        metrics.reference_final_theta = r.final_state().map(|s| s.theta);
        metrics.reference_min_theta_dot = Some(min_theta_dot(r));
        metrics.reference_settled_at = settled_time(r);
    }
    Ok(RunOutcome { trajectory, reference, metrics })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    SettledUnderdamped,
    Abnormal,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::SettledUnderdamped => "settled-underdamped",
            StabilityClass::Abnormal => "abnormal",
        }
    }
}

/// Settled when the sphere comes to rest within the horizon and the residual
/// peak-to-peak swing over the last [`RIPPLE_WINDOW`] stays inside the settling band.
pub fn classify_stability(traj: &Trajectory) -> StabilityClass {
    let theta = traj.theta();
    let step = match (theta.first(), theta.last()) {
        (Some(a), Some(b)) => (b - a).abs(),
        _ => 0.0,
    };
    let ripple = trailing_ripple(traj, RIPPLE_WINDOW);
    if settled_time(traj).is_some() && ripple <= SETTLING_BAND * step.max(1e-3) {
        StabilityClass::SettledUnderdamped
    } else {
        StabilityClass::Abnormal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Still,
}

impl Direction {
    /// Sign of a final angle; magnitudes up to `1e-6` rad count as still.
    pub fn of(theta: f64) -> Self {
        if theta > 1e-6 {
            Direction::Forward
        } else if theta < -1e-6 {
            Direction::Backward
        } else {
            Direction::Still
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Still => "still",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Metrics,
    pub classification: String,
}

/// Locations where the final direction flips relative to the zero-rate run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    pub negative_threshold: Option<f64>,
    pub positive_threshold: Option<f64>,
    /// Final direction changes at most once on the negative side of the grid.
    pub monotone_negative: bool,
    pub monotone_positive: bool,
}

/// Extent of the settled interval of a mass sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityBoundaries {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub parameter: SweepParam,
    pub rows: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reversal: Option<ReversalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<StabilityBoundaries>,
    /// Slope of `theta_dot0` against `gamma_peak / g` for initial-rate sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_slope: Option<f64>,
}

fn final_theta(spec: &ScenarioSpec, parameter: SweepParam, value: f64) -> Result<f64> {
    let traj = simulate(&spec.at(parameter, value)?)?;
    Ok(traj.final_state().map_or(f64::NAN, |s| s.theta))
}

/// Runs every grid point concurrently; rows come back in grid order.
pub fn run_grid(spec: &ScenarioSpec, parameter: SweepParam, values: &[f64]) -> Result<Vec<(f64, Trajectory)>> {
    if values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    values
        .par_iter()
        .map(|&v| Ok((v, simulate(&spec.at(parameter, v)?)?)))
        .collect()
}

fn refine(spec: &ScenarioSpec, parameter: SweepParam, inside: f64, outside: f64, reference: Direction) -> Result<f64> {
    let (mut a, mut b) = (inside, outside);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        if Direction::of(final_theta(spec, parameter, mid)?) == reference {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Smallest `|value|` on each side of zero whose final direction differs from
/// the run at zero, refined by bisection between the bracketing grid points.
pub fn reversal_thresholds(
    spec: &ScenarioSpec,
    parameter: SweepParam,
    grid: &[(f64, f64)],
) -> Result<ReversalReport> {
    let reference = Direction::of(final_theta(spec, parameter, 0.0)?);
    let side = |negative: bool| -> Result<(Option<f64>, bool)> {
        let mut pts: Vec<(f64, f64)> =
            grid.iter().copied().filter(|(v, _)| if negative { *v < 0.0 } else { *v > 0.0 }).collect();
        pts.sort_by(|x, y| x.0.abs().total_cmp(&y.0.abs()));
        let mut prev_val = 0.0;
        let mut prev_dir = reference;
        let mut changes = 0;
        let mut threshold = None;
        for &(v, th) in &pts {
            let dir = Direction::of(th);
            if dir != prev_dir {
                changes += 1;
                if threshold.is_none() {
                    threshold = Some(refine(spec, parameter, prev_val, v, reference)?.abs());
                }
            }
            prev_val = v;
            prev_dir = dir;
        }
        if changes > 1 {
            log::warn!(
                "final direction changes {changes} times on the {} side; threshold is the first flip",
                if negative { "negative" } else { "positive" }
            );
        }
        Ok((threshold, changes <= 1))
    };
    let (negative_threshold, monotone_negative) = side(true)?;
    let (positive_threshold, monotone_positive) = side(false)?;
    Ok(ReversalReport { negative_threshold, positive_threshold, monotone_negative, monotone_positive })
}

/// Bounds of the contiguous settled run containing the nominal mass ratio (or
/// the longest one), placed midway between neighbouring grid points.
pub fn stability_boundaries(rows: &[(f64, StabilityClass)], nominal: f64) -> StabilityBoundaries {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = None;
    for (i, (_, c)) in rows.iter().enumerate() {
        match (c, start) {
            (StabilityClass::SettledUnderdamped, None) => start = Some(i),
            (StabilityClass::Abnormal, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, rows.len() - 1));
    }
    let chosen = runs
        .iter()
        .find(|(s, e)| rows[*s].0 <= nominal && nominal <= rows[*e].0)
        .or_else(|| runs.iter().max_by_key(|(s, e)| e - s));
    match chosen {
        None => StabilityBoundaries { lower: None, upper: None },
        Some(&(s, e)) => StabilityBoundaries {
            lower: (s > 0).then(|| 0.5 * (rows[s - 1].0 + rows[s].0)),
            upper: (e + 1 < rows.len()).then(|| 0.5 * (rows[e].0 + rows[e + 1].0)),
        },
    }
}

/// Runs the spec's sweep, or the given grid in its place.
pub fn run_sweep(spec: &ScenarioSpec, grid: Option<&[f64]>) -> Result<SweepReport> {
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config(format!("scenario `{}` has no sweep", spec.name)))?;
    let values = grid.unwrap_or(&sweep.values);
    let parameter = sweep.parameter;
    let runs = run_grid(spec, parameter, values)?;

    let mut rows = Vec::with_capacity(runs.len());
    let mut classes = Vec::with_capacity(runs.len());
    for (v, traj) in &runs {
        let metrics = Metrics::from_trajectory(traj);
        let classification = match parameter {
            SweepParam::MassRatio => {
                let c = classify_stability(traj);
                classes.push((*v, c));
                c.as_str().to_owned()
            }
            _ => Direction::of(metrics.final_theta).as_str().to_owned(),
        };
        rows.push(SweepRow { value: *v, metrics, classification });
    }

    let mut report = SweepReport {
        scenario: spec.name.clone(),
        parameter,
        rows,
        reversal: None,
        boundaries: None,
        rate_slope: None,
    };
    match parameter {
        SweepParam::MassRatio => {
            report.boundaries = Some(stability_boundaries(&classes, spec.params.masses.mass_ratio()));
        }
        SweepParam::GammaDot0 => {
            let finals: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.value, r.metrics.final_theta)).collect();
            let rev = reversal_thresholds(spec, parameter, &finals)?;
            for r in &mut report.rows {
                r.metrics.reversal_threshold = if r.value < 0.0 { rev.negative_threshold } else { rev.positive_threshold };
            }
            report.reversal = Some(rev);
        }
        SweepParam::ThetaDot0 => {
            let g = spec.params.gravity;
            let (x, y): (Vec<f64>, Vec<f64>) = runs
                .iter()
                .map(|(v, traj)| {
                    let peak = traj
                        .samples
                        .iter()
                        .map(|s| s.state.gamma)
                        .fold(0.0f64, |acc, gm| if gm.abs() > acc.abs() { gm } else { acc });
                    (peak / g, *v)
                })
                .unzip();
            report.rate_slope = metrics::slope_through_origin(&x, &y);
        }
        SweepParam::Gamma0 => {}
    }
    Ok(report)
}

/// Pendulum baseline companion of the forward run.
pub fn pendulum_baseline(base: &RobotParams) -> Result<Trajectory> {
    simulate(&ScenarioSpec::builtin("baseline", base)?)
}

#[derive(Debug, Clone)]
pub struct ForwardReport {
    pub forward: Trajectory,
    pub baseline: Trajectory,
    pub metrics: Metrics,
    /// Largest backward step of theta per sample after the first GB exit, rad.
    pub max_backward_after_jump: Option<f64>,
    pub baseline_sign_changes: usize,
}

pub fn run_forward_locomotion(base: &RobotParams) -> Result<ForwardReport> {
    let spec = ScenarioSpec::builtin("forward", base)?;
    let out = run_scenario(&spec)?;
    let baseline = out.reference.expect("forward run carries a baseline");
    let first_exit = out.metrics.jump_events.first().map(|j| j.t);
    Ok(ForwardReport {
        max_backward_after_jump: first_exit.map(|t| max_backward_step(&out.trajectory, t)),
        baseline_sign_changes: theta_dot_sign_changes(&baseline),
        forward: out.trajectory,
        baseline,
        metrics: out.metrics,
    })
}

#[derive(Debug, Clone)]
pub struct Case4Report {
    pub mm: Trajectory,
    pub gb: Trajectory,
    pub offset: f64,
    pub gb_min_theta_dot: f64,
    pub mm_settled_at: Option<f64>,
    pub gb_settled_at: Option<f64>,
}

pub fn run_case4(base: &RobotParams) -> Result<Case4Report> {
    let out = run_scenario(&ScenarioSpec::builtin("case4", base)?)?;
    let gb = out.reference.expect("case4 carries the GB run");
    Ok(Case4Report {
        offset: out.metrics.offset_vs_baseline.unwrap_or(f64::NAN),
        gb_min_theta_dot: min_theta_dot(&gb),
        mm_settled_at: out.metrics.settled_at,
        gb_settled_at: settled_time(&gb),
        mm: out.trajectory,
        gb,
    })
}

/// Final sphere angle for each initial core angle.
pub fn run_case1(base: &RobotParams, gamma0: &[f64]) -> Result<Vec<(f64, Metrics)>> {
    let spec = ScenarioSpec::builtin("case1", base)?;
    Ok(run_grid(&spec, SweepParam::Gamma0, gamma0)?
        .iter()
        .map(|(v, t)| (*v, Metrics::from_trajectory(t)))
        .collect())
}

pub fn run_case2(base: &RobotParams, theta_dot0: &[f64]) -> Result<SweepReport> {
    run_sweep(&ScenarioSpec::builtin("case2", base)?, Some(theta_dot0))
}

pub fn run_case3(base: &RobotParams, gamma_dot0: &[f64]) -> Result<SweepReport> {
    run_sweep(&ScenarioSpec::builtin("case3", base)?, Some(gamma_dot0))
}

pub fn mass_ratio_sweep(base: &RobotParams, m_star: &[f64]) -> Result<SweepReport> {
    run_sweep(&ScenarioSpec::builtin("mass-sweep", base)?, Some(m_star))
}
