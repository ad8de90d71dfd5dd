//! Lumped hydraulic actuation: force demand on the core, force delivered by the
//! actuator-driven cylinder, the feasibility gate between the two, and the
//! resulting core torque.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Geometry, RobotParams};

/// Core radius used by the default hydraulic block, m.
pub const DEFAULT_CORE_RADIUS: f64 = 0.02;
/// Magnitude of the reference core torque the defaults are back-solved for, N·m.
pub const REFERENCE_TORQUE: f64 = 0.075;
/// Default pressure difference across the core, Pa. Negative values assist the drive.
pub const DEFAULT_PRESSURE_DIFFERENCE: f64 = -1600.0;
const DEFAULT_BORE: f64 = 0.02;
const DEFAULT_ROD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydraulicParams {
    /// Actual core mass `m_lc`, kg.
    #[serde(rename = "m_lc")]
    pub core_mass: f64,
    /// Mass of fluid displaced by the core `m_b`, kg.
    #[serde(rename = "m_b")]
    pub displaced_fluid_mass: f64,
    /// Pressure difference between the bottom and top of the core, Pa.
    #[serde(rename = "delta_P")]
    pub pressure_difference: f64,
    /// Projected core area `A_c = pi r_c^2`, m².
    #[serde(rename = "A_c")]
    pub core_area: f64,
    /// Linear actuator input force `F_LA`, N.
    #[serde(rename = "F_LA")]
    pub actuator_force: f64,
    /// Full-bore piston diameter `D1`, m.
    #[serde(rename = "D1")]
    pub bore_diameter: f64,
    /// Piston rod diameter `D2`, m.
    #[serde(rename = "D2")]
    pub rod_diameter: f64,
    /// Number of hydraulic circuits driving the core, 1..=4.
    #[serde(rename = "s")]
    pub circuits: u8,
}

impl HydraulicParams {
    /// Defaults for a given geometry: no buoyancy, and an actuator force chosen so
    /// that a single circuit delivers [`REFERENCE_TORQUE`] on the momentum-maker radius.
    pub fn default_for(geometry: &Geometry, core_mass: f64) -> Self {
        let r = geometry.core_radius;
        let mut h = Self {
            core_mass,
            displaced_fluid_mass: 0.0,
            pressure_difference: DEFAULT_PRESSURE_DIFFERENCE,
            core_area: PI * r * r,
            actuator_force: 1.0,
            bore_diameter: DEFAULT_BORE,
            rod_diameter: DEFAULT_ROD,
            circuits: 1,
        };
        let per_newton = transmission_gain(&h).expect("default cylinder is valid");
        let target = REFERENCE_TORQUE / (geometry.semi_major * f64::from(h.circuits));
        h.actuator_force = target / per_newton;
        h
    }

    pub fn apparent_core_mass(&self) -> f64 {
        self.core_mass - self.displaced_fluid_mass
    }

    pub fn core_radius(&self) -> f64 {
        (self.core_area / PI).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.displaced_fluid_mass >= 0.0 && self.core_mass > self.displaced_fluid_mass) {
            return Err(Error::InvalidParameter {
                name: "m_lc",
                reason: format!(
                    "need m_lc > m_b >= 0, got m_lc={} m_b={}",
                    self.core_mass, self.displaced_fluid_mass
                ),
            });
        }
        if !(self.core_area > 0.0 && self.core_area.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "A_c",
                reason: format!("must be positive, got {}", self.core_area),
            });
        }
        if !(self.actuator_force >= 0.0 && self.actuator_force.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "F_LA",
                reason: format!("must be >= 0, got {}", self.actuator_force),
            });
        }
        if !self.pressure_difference.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta_P",
                reason: "must be finite".into(),
            });
        }
        if !(1..=4).contains(&self.circuits) {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("must be in 1..=4, got {}", self.circuits),
            });
        }
        check_cylinder(self)
    }
}

fn check_cylinder(h: &HydraulicParams) -> Result<()> {
    if h.rod_diameter > 0.0 && h.bore_diameter > h.rod_diameter && h.bore_diameter.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidGeometry { bore: h.bore_diameter, rod: h.rod_diameter })
    }
}

/// Force on the core per newton of actuator input.
fn transmission_gain(h: &HydraulicParams) -> Result<f64> {
    check_cylinder(h)?;
    let d1 = h.bore_diameter * h.bore_diameter;
    let d2 = h.rod_diameter * h.rod_diameter;
    let r2 = h.core_area / PI;
    Ok(8.0 * r2 * (2.0 * d1 - d2) / (d1 * (d1 - d2)))
}

/// Worst-case force needed to move the core: apparent weight plus pressure load.
/// Pipe friction is neglected.
pub fn max_required_force(h: &HydraulicParams, g: f64) -> f64 {
    h.apparent_core_mass() * g + h.pressure_difference * h.core_area
}

/// Force delivered to the core by the upper and lower cylinder chambers together.
pub fn transmitted_force(h: &HydraulicParams) -> Result<f64> {
    Ok(transmission_gain(h)? * h.actuator_force)
}

/// Strict comparison: the delivered force must exceed the demand.
pub fn actuation_feasible(h: &HydraulicParams, g: f64) -> Result<bool> {
    Ok(transmitted_force(h)? > max_required_force(h, g))
}

/// Core torque `direction * b * s * F_c_T`. The sphere itself receives no direct torque.
///
/// `direction` is the sign of the request: `-1` drives the core counterclockwise,
/// `0` requests nothing.
pub fn core_torque(params: &RobotParams, direction: i8) -> Result<f64> {
    let h = &params.hydraulics;
    if direction == 0 {
        return Ok(0.0);
    }
    let transmitted = transmitted_force(h)?;
    let required = max_required_force(h, params.gravity);
    if transmitted <= required {
        return Err(Error::ActuationInfeasible { transmitted, required });
    }
    let sign = f64::from(direction.signum());
    Ok(sign * params.geometry.semi_major * f64::from(h.circuits) * transmitted)
}
