//! TOML parameter files.
//!
//! A file holds the physical parameters under their conventional symbols, an
//! optional `[hydraulics]` table, and optionally `dynamics_backend` and a
//! `[controller]` table. Missing keys fall back to the reference data set;
//! unknown keys are rejected by name.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::ControllerConfig;
use crate::dynamics::DynamicsBackend;
use crate::error::{Error, Result};
use crate::hydraulics::HydraulicParams;
use crate::model::{inertia_discrepancies, Friction, Geometry, InertiaDiscrepancy, Masses, RobotParams};

/// Hydraulic block; every key is optional and defaults from the geometry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydraulicsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_lc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_b: Option<f64>,
    #[serde(rename = "delta_P", skip_serializing_if = "Option::is_none")]
    pub delta_p: Option<f64>,
    #[serde(rename = "A_c", skip_serializing_if = "Option::is_none")]
    pub a_c: Option<f64>,
    #[serde(rename = "F_LA", skip_serializing_if = "Option::is_none")]
    pub f_la: Option<f64>,
    #[serde(rename = "D1", skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(rename = "D2", skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u8>,
}

impl From<HydraulicParams> for HydraulicsConfig {
    fn from(h: HydraulicParams) -> Self {
        Self {
            m_lc: Some(h.core_mass),
            m_b: Some(h.displaced_fluid_mass),
            delta_p: Some(h.pressure_difference),
            a_c: Some(h.core_area),
            f_la: Some(h.actuator_force),
            d1: Some(h.bore_diameter),
            d2: Some(h.rod_diameter),
            s: Some(h.circuits),
        }
    }
}

/// Physical parameters keyed by their symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct ParamsConfig {
    pub g: f64,
    pub M_s: f64,
    pub m_c: f64,
    pub R: f64,
    pub a: f64,
    pub b: f64,
    pub zeta_theta: f64,
    pub zeta_gamma_MM: f64,
    pub zeta_gamma_GB: f64,
    pub delta: f64,
    pub m_c_TT: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub I_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub I_c_MM: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub I_c_GB: Option<f64>,
    pub hydraulics: HydraulicsConfig,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = RobotParams::default();
        Self {
            hydraulics: HydraulicsConfig::default(),
            ..Self::from(p)
        }
    }
}

impl From<RobotParams> for ParamsConfig {
    fn from(p: RobotParams) -> Self {
        Self {
            g: p.gravity,
            M_s: p.masses.shell,
            m_c: p.masses.core,
            R: p.geometry.radius,
            a: p.geometry.semi_minor,
            b: p.geometry.semi_major,
            zeta_theta: p.friction.sphere,
            zeta_gamma_MM: p.friction.core_mm,
            zeta_gamma_GB: p.friction.core_gb,
            delta: p.masses.turner_increment,
            m_c_TT: p.masses.turner_core,
            I_s: None,
            I_c_MM: None,
            I_c_GB: None,
            hydraulics: p.hydraulics.into(),
        }
    }
}

impl ParamsConfig {
    /// Builds and validates the parameter set, also returning any supplied
    /// inertia that disagrees with the derived one.
    pub fn build(&self) -> Result<(RobotParams, Vec<InertiaDiscrepancy>)> {
        let h = &self.hydraulics;
        let core_radius = match h.a_c {
            Some(area) if area > 0.0 => (area / PI).sqrt(),
            Some(area) => {
                return Err(Error::InvalidParameter { name: "A_c", reason: format!("must be positive, got {area}") })
            }
            None => crate::hydraulics::DEFAULT_CORE_RADIUS,
        };
        let geometry = Geometry { radius: self.R, semi_minor: self.a, semi_major: self.b, core_radius };
        let masses = Masses {
            shell: self.M_s,
            core: self.m_c,
            turner_increment: self.delta,
            turner_core: self.m_c_TT,
        };
        let friction = Friction { sphere: self.zeta_theta, core_mm: self.zeta_gamma_MM, core_gb: self.zeta_gamma_GB };
        let base = HydraulicParams::default_for(&geometry, self.m_c);
        let m_b = h.m_b.unwrap_or(base.displaced_fluid_mass);
        let hydraulics = HydraulicParams {
            core_mass: h.m_lc.unwrap_or(self.m_c + m_b),
            displaced_fluid_mass: m_b,
            pressure_difference: h.delta_p.unwrap_or(base.pressure_difference),
            core_area: h.a_c.unwrap_or(base.core_area),
            actuator_force: h.f_la.unwrap_or(base.actuator_force),
            bore_diameter: h.d1.unwrap_or(base.bore_diameter),
            rod_diameter: h.d2.unwrap_or(base.rod_diameter),
            circuits: h.s.unwrap_or(base.circuits),
        };
        let params = RobotParams::new(geometry, masses, friction, hydraulics, self.g)?;
        let discrepancies = inertia_discrepancies(&params.inertias, self.I_s, self.I_c_MM, self.I_c_GB);
        Ok((params, discrepancies))
    }
}

impl TryFrom<ParamsConfig> for RobotParams {
    type Error = Error;
    fn try_from(c: ParamsConfig) -> Result<Self> {
        c.build().map(|(p, _)| p)
    }
}

/// A complete configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub params: ParamsConfig,
    pub dynamics_backend: Option<DynamicsBackend>,
    pub controller: Option<ControllerConfig>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_owned()))?;
        let dynamics_backend = match table.remove("dynamics_backend") {
            Some(v) => Some(
                v.try_into::<DynamicsBackend>()
                    .map_err(|e| Error::Config(format!("dynamics_backend: {}", e.message())))?,
            ),
            None => None,
        };
        let controller = match table.remove("controller") {
            Some(v) => Some(
                v.try_into::<ControllerConfig>()
                    .map_err(|e| Error::Config(format!("controller: {}", e.message())))?,
            ),
            None => None,
        };
        let params: ParamsConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_owned()))?;
        if let Some(c) = &controller {
            c.validate()?;
        }
        Ok(Self { params, dynamics_backend, controller })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn robot_params(&self) -> Result<RobotParams> {
        self.params.build().map(|(p, _)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_parameters() {
        let c = ConfigFile::from_toml_str("").unwrap();
        assert_eq!(c.robot_params().unwrap(), RobotParams::default());
        assert!(c.dynamics_backend.is_none() && c.controller.is_none());
    }

    #[test]
    fn overrides_and_sections() {
        let c = ConfigFile::from_toml_str(
            "m_c = 0.2\nzeta_gamma_GB = 0.075\ndynamics_backend = \"paper\"\n\
             [hydraulics]\nF_LA = 0.0\n[controller]\nenabled = false\n",
        )
        .unwrap();
        let p = c.robot_params().unwrap();
        assert_eq!(p.masses.core, 0.2);
        assert_eq!(p.hydraulics.core_mass, 0.2);
        assert_eq!(p.friction.core_gb, 0.075);
        assert_eq!(p.hydraulics.actuator_force, 0.0);
        assert_eq!(c.dynamics_backend, Some(DynamicsBackend::Paper));
        assert!(!c.controller.unwrap().enabled);
    }

    #[test]
    fn unknown_keys_are_named() {
        for (text, key) in [
            ("m_core = 1.0", "m_core"),
            ("[hydraulics]\nbore = 0.1", "bore"),
            ("[controller]\neta = 1.0", "eta"),
        ] {
            let err = ConfigFile::from_toml_str(text).unwrap_err().to_string();
            assert!(err.contains(key), "{err}");
        }
    }

    #[test]
    fn invalid_values_are_named() {
        let err = ConfigFile::from_toml_str("a = 0.2").unwrap().robot_params().unwrap_err().to_string();
        assert!(err.contains("`a`") || err.contains("`b`"), "{err}");
        let err = ConfigFile::from_toml_str("[controller]\ncos_gamma_hi = 2.0").unwrap_err().to_string();
        assert!(err.contains("cos_gamma_hi"), "{err}");
    }

    #[test]
    fn supplied_inertia_is_reported() {
        let c = ConfigFile::from_toml_str("I_c_MM = 0.0402\nI_c_GB = 7.744e-4").unwrap();
        let (_, d) = c.params.build().unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].name, "I_c_MM");
    }

    #[test]
    fn params_round_trip_through_toml() {
        let p = RobotParams::default().with_core_mass(0.3).unwrap();
        let text = toml::to_string(&p).unwrap();
        let back: RobotParams = toml::from_str(&text).unwrap();
        assert_eq!(back.masses, p.masses);
        approx::assert_relative_eq!(back.geometry.core_radius, p.geometry.core_radius, max_relative = 1e-15);
    }
}
