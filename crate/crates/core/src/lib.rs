//! Planar dynamics, hydraulic actuation and hybrid MM/GB switching for a
//! fluid-driven spherical robot, with the experiment library built on them.

pub mod config;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod hydraulics;
pub mod integrator;
pub mod io;
pub mod model;
pub mod oracle;
pub mod scenarios;

pub use controller::{ControllerConfig, ControllerState, CycleLabel, Region};
pub use dynamics::{DynamicsBackend, PathMode, State};
pub use error::{Error, Result};
pub use integrator::{IntegratorConfig, Trajectory};
pub use model::RobotParams;
pub use scenarios::{Metrics, ScenarioSpec};
