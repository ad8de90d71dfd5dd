//! Forward-locomotion switching logic between the MM and GB pipes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{PathMode, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Region {
    #[default]
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "beta")]
    Beta,
}

impl Region {
    pub fn toggled(self) -> Self {
        match self {
            Region::Alpha => Region::Beta,
            Region::Beta => Region::Alpha,
        }
    }

    /// Region containing the core at angle `gamma`: alpha on even half-turns.
    pub fn from_gamma(gamma: f64) -> Self {
        if (gamma / PI).floor().rem_euclid(2.0) == 0.0 {
            Region::Alpha
        } else {
            Region::Beta
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Alpha => "alpha",
            Region::Beta => "beta",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Region::Alpha),
            "beta" => Ok(Region::Beta),
            other => Err(Error::Config(format!("unknown region `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    pub eta_theta: f64,
    pub eta_gamma: f64,
    pub cos_theta_thresh: f64,
    pub sin_theta_thresh: f64,
    pub cos_gamma_hi: f64,
    pub sin_gamma_thresh: f64,
    pub enabled: bool,
    /// Use the entry predicate exactly as printed, whose second branch is empty.
    pub strict_paper_constraints: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            eta_theta: PI / 12.0,
            eta_gamma: PI / 12.0,
            cos_theta_thresh: 0.95,
            sin_theta_thresh: 0.2,
            cos_gamma_hi: 0.9,
            sin_gamma_thresh: 0.2,
            enabled: true,
            strict_paper_constraints: false,
        }
    }
}

impl ControllerConfig {
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let thresholds = [
            ("cos_theta_thresh", self.cos_theta_thresh),
            ("sin_theta_thresh", self.sin_theta_thresh),
            ("cos_gamma_hi", self.cos_gamma_hi),
            ("sin_gamma_thresh", self.sin_gamma_thresh),
        ];
        for (name, v) in thresholds {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter { name, reason: format!("{v} not in (0, 1]") });
            }
        }
        for (name, v) in [("eta_theta", self.eta_theta), ("eta_gamma", self.eta_gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be positive") });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    /// Closed.
    I,
    /// Open to alpha, closed to beta.
    II,
    /// Open to beta, closed to alpha.
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Port {
    /// Off.
    O,
    /// Suction in tube.
    ST,
    /// Injection in tube.
    IT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl CycleLabel {
    pub const ALL: [CycleLabel; 8] = [
        CycleLabel::A,
        CycleLabel::B,
        CycleLabel::C,
        CycleLabel::D,
        CycleLabel::E,
        CycleLabel::F,
        CycleLabel::G,
        CycleLabel::H,
    ];

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }
}

impl FromStr for CycleLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='h'), None) => Ok(CycleLabel::ALL[(c as u8 - b'a') as usize]),
            _ => Err(Error::InvalidCycle(s.to_owned())),
        }
    }
}

pub type GateSet = [Gate; 4];
pub type PortSet = [Port; 4];

/// Gate and port settings for each step of the forward cycle.
pub fn gate_port_config(cycle: CycleLabel) -> (GateSet, PortSet) {
    use Gate::{I, II, III};
    use Port::{IT, O, ST};
    match cycle {
        CycleLabel::A => ([II, II, I, II], [O, IT, ST, O]),
        CycleLabel::B => ([II, I, I, II], [IT, O, ST, O]),
        CycleLabel::C => ([I, II, II, I], [O, ST, IT, O]),
        CycleLabel::D => ([II, I, I, II], [IT, O, ST, O]),
        CycleLabel::E => ([II, I, II, II], [IT, ST, ST, O]),
        CycleLabel::F => ([I, II, III, III], [ST, O, O, IT]),
        CycleLabel::G => ([I, III, III, I], [ST, O, IT, O]),
        CycleLabel::H => ([III, II, I, I], [O, IT, O, ST]),
    }
}

/// Like [`gate_port_config`] but parsing the label first.
pub fn gate_port_config_str(label: &str) -> Result<(GateSet, PortSet)> {
    Ok(gate_port_config(label.parse()?))
}

/// GB entry predicate.
///
/// The first branch is taken verbatim. The printed second branch asks for
/// `cos(gamma) <= -0.9` and `cos(gamma) >= -0.2` at once and is therefore empty;
/// unless `strict_paper_constraints` is set it is replaced by the mirror image of
/// the first branch.
pub fn gb_entry_condition(state: &State, cfg: &ControllerConfig) -> bool {
    let (st, ct) = state.theta.sin_cos();
    let (sg, cg) = state.gamma.sin_cos();
    let rates = state.theta_dot >= 0.0 && state.gamma_dot <= 0.0;
    let branch1 = ct <= -cfg.cos_theta_thresh
        && st >= -cfg.sin_theta_thresh
        && rates
        && cg >= cfg.cos_gamma_hi
        && sg <= cfg.sin_gamma_thresh;
    let branch2_gamma = if cfg.strict_paper_constraints {
        cg <= -cfg.cos_gamma_hi && cg >= -cfg.sin_gamma_thresh
    } else {
        cg <= -cfg.cos_gamma_hi && sg.abs() <= cfg.sin_gamma_thresh
    };
    let branch2 = ct >= cfg.cos_theta_thresh && st <= cfg.sin_theta_thresh && rates && branch2_gamma;
    branch1 || branch2
}

/// GB crossing predicate in its simplified form `|cos|gamma|| <= 0.9`.
pub fn gb_crossing_condition(state: &State, cfg: &ControllerConfig) -> bool {
    state.gamma.abs().cos().abs() <= cfg.cos_gamma_hi
}

/// The crossing predicate with both printed branches spelled out.
pub fn gb_crossing_condition_two_branch(state: &State, cfg: &ControllerConfig) -> bool {
    let g = state.gamma.abs();
    (g.cos().abs() <= cfg.cos_gamma_hi && g.sin() <= 0.0)
        || (g.cos().abs() <= cfg.cos_gamma_hi && g.sin() >= 0.0)
}

/// Half-open interval `(lo, hi]` or closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        above && x <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo || (self.hi == self.lo && !self.lo_closed)
    }
}

/// Location windows of the original pseudocode for turn index `k`. Reported for
/// reference; switching uses the trigonometric predicates above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbWindow {
    pub gamma_window: Interval,
    pub theta_window: Interval,
}

impl GbWindow {
    pub fn new(eta_theta: f64, eta_gamma: f64, k: i32) -> Self {
        let kp = f64::from(k) * PI;
        Self {
            gamma_window: Interval { lo: -kp - PI / eta_gamma, hi: -kp + PI / eta_gamma, lo_closed: false },
            theta_window: Interval {
                lo: kp + (eta_theta * PI - PI) / eta_theta,
                hi: kp + (eta_theta * PI + PI) / eta_theta,
                lo_closed: true,
            },
        }
    }

    pub fn contains(&self, state: &State) -> bool {
        self.gamma_window.contains(state.gamma) && self.theta_window.contains(state.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub region: Region,
    pub mode: PathMode,
    pub cycle_label: CycleLabel,
    pub gates: GateSet,
    pub ports: PortSet,
    /// The current GB pass has reached the crossing stretch.
    pub crossed: bool,
}

impl ControllerState {
    pub fn new(region: Region, mode: PathMode, cycle_label: CycleLabel) -> Self {
        let (gates, ports) = gate_port_config(cycle_label);
        Self { region, mode, cycle_label, gates, ports, crossed: false }
    }

    /// Initial state: region from the core angle, MM pipe.
    pub fn initial(state: &State) -> Self {
        let region = Region::from_gamma(state.gamma);
        Self::new(region, PathMode::MomentumMaker, label_for(region, PathMode::MomentumMaker, false, None))
    }
}

/// Cycle label for a (region, mode) pair.
///
/// Near an equilibrium the MM labels become the EP rows (`a` in alpha, `h` in
/// beta). A GB pass in alpha that starts straight after a GB pass in beta, with
/// no MM stretch in between, is the instantaneous cycle `e`, and the MM beta
/// stretch after it is `f`.
fn label_for(region: Region, mode: PathMode, near_equilibrium: bool, prev: Option<CycleLabel>) -> CycleLabel {
    use CycleLabel::*;
    match (mode, region) {
        (PathMode::MomentumMaker, Region::Alpha) if near_equilibrium => A,
        (PathMode::MomentumMaker, Region::Beta) if near_equilibrium => H,
        (PathMode::GravityBreaker, Region::Alpha) if prev == Some(G) => E,
        (PathMode::GravityBreaker, Region::Alpha) => B,
        (PathMode::GravityBreaker, Region::Beta) => G,
        (PathMode::MomentumMaker, Region::Alpha) => C,
        (PathMode::MomentumMaker, Region::Beta) if prev == Some(E) || prev == Some(F) => F,
        (PathMode::MomentumMaker, Region::Beta) => D,
    }
}

/// One controller update at a sample instant.
///
/// While the core is not faster than the sphere it stays in MM. Once it is, a
/// GB pass starts when [`gb_entry_condition`] holds. A pass continues while the
/// entry or crossing predicate holds; when both fail the core leaves GB, and the
/// region toggles if the pass went through the crossing stretch.
pub fn controller_step(
    state: &State,
    cs: &ControllerState,
    cfg: &ControllerConfig,
    near_equilibrium: bool,
) -> ControllerState {
    let mut next = *cs;
    if !cfg.enabled {
        next.mode = PathMode::MomentumMaker;
        next.crossed = false;
    } else {
        let entry = gb_entry_condition(state, cfg);
        let crossing = gb_crossing_condition(state, cfg);
        match cs.mode {
            PathMode::MomentumMaker => {
                let core_faster = state.theta_dot.abs() < state.gamma_dot.abs();
                if core_faster && entry {
                    next.mode = PathMode::GravityBreaker;
                    next.crossed = false;
                }
            }
            PathMode::GravityBreaker => {
                if crossing {
                    next.crossed = true;
                } else if !entry {
                    next.mode = PathMode::MomentumMaker;
                    if cs.crossed {
                        next.region = cs.region.toggled();
                    }
                    next.crossed = false;
                }
            }
        }
    }
    let label = label_for(next.region, next.mode, near_equilibrium, Some(cs.cycle_label));
    if label != cs.cycle_label {
        next.cycle_label = label;
        (next.gates, next.ports) = gate_port_config(label);
    }
    next
}
