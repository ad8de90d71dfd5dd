//! Physical parameters of the robot and the validity gates on its mass ratios.
//!
//! Everything here is immutable once built. [`RobotParams`] always derives its
//! inertias from geometry and masses; externally supplied inertia values are only
//! compared against the derived ones (see [`inertia_discrepancies`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydraulics::HydraulicParams;

/// Relative divergence above which a supplied inertia is reported.
pub const INERTIA_WARN_REL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Sphere radius `R`, m.
    pub radius: f64,
    /// Semi-minor axis `a` of the gravity-breaker ellipse, m.
    pub semi_minor: f64,
    /// Semi-major axis `b` of the gravity-breaker ellipse, also the momentum-maker radius, m.
    pub semi_major: f64,
    /// Core radius `r_c`, m.
    pub core_radius: f64,
}

impl Geometry {
    /// Checks `0 < a <= b < R` and `0 < r_c < a`.
    ///
    /// `a == b` is accepted: it is the circular degenerate case where both pipes coincide.
    pub fn validate(&self) -> Result<()> {
        positive("R", self.radius)?;
        positive("a", self.semi_minor)?;
        positive("b", self.semi_major)?;
        positive("r_c", self.core_radius)?;
        if self.semi_minor > self.semi_major {
            return Err(invalid("a", format!("a={} exceeds b={}", self.semi_minor, self.semi_major)));
        }
        if self.semi_major >= self.radius {
            return Err(invalid("b", format!("b={} must be below R={}", self.semi_major, self.radius)));
        }
        if self.core_radius >= self.semi_minor {
            return Err(invalid("r_c", format!("r_c={} must be below a={}", self.core_radius, self.semi_minor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Masses {
    /// Shell mass `M_s` excluding cores, kg.
    pub shell: f64,
    /// Apparent core mass `m_c`, kg.
    pub core: f64,
    /// Mass increment `delta` of the turner-tube core, kg.
    pub turner_increment: f64,
    /// Turner-tube core mass `m_c_TT`, kg.
    pub turner_core: f64,
}

impl Masses {
    /// Dimensionless ratio `m* = m_c / M_s`.
    pub fn mass_ratio(&self) -> f64 {
        self.core / self.shell
    }

    pub fn validate(&self) -> Result<()> {
        positive("M_s", self.shell)?;
        positive("m_c", self.core)?;
        positive("m_c_TT", self.turner_core)?;
        if !(self.turner_increment >= 0.0 && self.turner_increment.is_finite()) {
            return Err(invalid("delta", format!("must be >= 0, got {}", self.turner_increment)));
        }
        Ok(())
    }
}

/// Scalar moments of inertia about the rolling axis, kg·m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertias {
    pub sphere: f64,
    pub core_mm: f64,
    pub core_gb: f64,
}

/// Viscous coefficients of the dissipation function, N·m·s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Friction {
    pub sphere: f64,
    pub core_mm: f64,
    pub core_gb: f64,
}

impl Friction {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("zeta_theta", self.sphere),
            ("zeta_gamma_MM", self.core_mm),
            ("zeta_gamma_GB", self.core_gb),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Thin-shell sphere and solid-sphere core inertias.
///
/// The gravity-breaker inertia uses the mean of the two semi-axes as the
/// effective core distance.
pub fn derive_inertias(geometry: &Geometry, masses: &Masses) -> Inertias {
    let b = geometry.semi_major;
    let mean_axis = 0.5 * (geometry.semi_minor + geometry.semi_major);
    Inertias {
        sphere: 2.0 / 3.0 * masses.shell * geometry.radius * geometry.radius,
        core_mm: 2.0 / 5.0 * masses.core * b * b,
        core_gb: 2.0 / 5.0 * masses.core * mean_axis * mean_axis,
    }
}

/// `1/10 <= m_c/M_s < 1/3`.
pub fn validate_mass_ratio(core: f64, shell: f64) -> Result<bool> {
    positive("m_c", core)?;
    positive("M_s", shell)?;
    let ratio = core / shell;
    Ok((0.1..1.0 / 3.0).contains(&ratio))
}

/// Half-open admissible interval `[M_s/10 + delta, M_s/3 + delta)` for the turner-tube core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassInterval {
    pub lo: f64,
    pub hi: f64,
}

impl MassInterval {
    pub fn contains(&self, m: f64) -> bool {
        m >= self.lo && m < self.hi
    }
}

pub fn tt_core_mass_bounds(shell: f64, delta: f64) -> Result<MassInterval> {
    positive("M_s", shell)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("must be >= 0, got {delta}")));
    }
    Ok(MassInterval {
        lo: shell / 10.0 + delta,
        hi: shell / 3.0 + delta,
    })
}

/// One supplied inertia that differs from its derived value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InertiaDiscrepancy {
    pub name: &'static str,
    pub supplied: f64,
    pub derived: f64,
    pub relative: f64,
}

/// Compares user-supplied inertias against the derived ones and logs every entry
/// diverging by more than [`INERTIA_WARN_REL`].
pub fn inertia_discrepancies(
    derived: &Inertias,
    sphere: Option<f64>,
    core_mm: Option<f64>,
    core_gb: Option<f64>,
) -> Vec<InertiaDiscrepancy> {
    let mut out = Vec::new();
    for (name, supplied, derived) in [
        ("I_s", sphere, derived.sphere),
        ("I_c_MM", core_mm, derived.core_mm),
        ("I_c_GB", core_gb, derived.core_gb),
    ] {
        let Some(supplied) = supplied else { continue };
        let relative = (supplied - derived).abs() / derived.abs();
        if relative > INERTIA_WARN_REL {
            log::warn!(
                "{name}: supplied {supplied:e} kg·m² differs from derived {derived:e} kg·m² \
                 by {:.1}%; using the derived value",
                relative * 100.0
            );
            out.push(InertiaDiscrepancy { name, supplied, derived, relative });
        }
    }
    out
}

/// The complete, validated parameter set consumed by the dynamics.
///
/// Serialized through [`crate::config::ParamsConfig`], so deserializing runs the
/// same validation as [`RobotParams::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::config::ParamsConfig", into = "crate::config::ParamsConfig")]
pub struct RobotParams {
    pub geometry: Geometry,
    pub masses: Masses,
    pub inertias: Inertias,
    pub friction: Friction,
    pub hydraulics: HydraulicParams,
    /// Gravitational acceleration, m/s².
    pub gravity: f64,
}

impl RobotParams {
    pub fn new(
        geometry: Geometry,
        masses: Masses,
        friction: Friction,
        hydraulics: HydraulicParams,
        gravity: f64,
    ) -> Result<Self> {
        geometry.validate()?;
        masses.validate()?;
        friction.validate()?;
        hydraulics.validate()?;
        positive("g", gravity)?;
        let apparent = hydraulics.apparent_core_mass();
        if (apparent - masses.core).abs() > 1e-12 * masses.core {
            return Err(invalid(
                "m_lc",
                format!("m_lc - m_b = {apparent} must equal m_c = {}", masses.core),
            ));
        }
        let hyd_radius = hydraulics.core_radius();
        if (hyd_radius - geometry.core_radius).abs() > 1e-9 * geometry.core_radius {
            return Err(invalid(
                "A_c",
                format!("A_c implies r_c = {hyd_radius}, geometry has {}", geometry.core_radius),
            ));
        }
        Ok(Self {
            inertias: derive_inertias(&geometry, &masses),
            geometry,
            masses,
            friction,
            hydraulics,
            gravity,
        })
    }

    /// Same robot with a different apparent core mass; the hydraulic core mass
    /// follows so that `m_lc - m_b` stays consistent.
    pub fn with_core_mass(&self, core: f64) -> Result<Self> {
        let masses = Masses { core, ..self.masses };
        let hydraulics = HydraulicParams {
            core_mass: core + self.hydraulics.displaced_fluid_mass,
            ..self.hydraulics
        };
        Self::new(self.geometry, masses, self.friction, hydraulics, self.gravity)
    }

    /// Same robot with the core friction set to `zeta` on both pipes.
    pub fn with_core_friction(&self, zeta: f64) -> Result<Self> {
        let friction = Friction { core_mm: zeta, core_gb: zeta, ..self.friction };
        Self::new(self.geometry, self.masses, friction, self.hydraulics, self.gravity)
    }

    pub fn with_geometry(&self, geometry: Geometry) -> Result<Self> {
        Self::new(geometry, self.masses, self.friction, self.hydraulics, self.gravity)
    }

    pub fn with_friction(&self, friction: Friction) -> Result<Self> {
        Self::new(self.geometry, self.masses, friction, self.hydraulics, self.gravity)
    }
}

/// Reference data set: `g = 9.8`, `M_s = 1`, `m_c = 0.25`, `R = 0.145`,
/// `a = 0.045`, `b = 0.131`, `zeta_theta = 0.2`, `zeta_gamma = 0.01`.
impl Default for RobotParams {
    fn default() -> Self {
        let geometry = Geometry {
            radius: 0.145,
            semi_minor: 0.045,
            semi_major: 0.131,
            core_radius: crate::hydraulics::DEFAULT_CORE_RADIUS,
        };
        let masses = Masses {
            shell: 1.0,
            core: 0.25,
            turner_increment: 0.01,
            turner_core: 0.26,
        };
        let friction = Friction { sphere: 0.2, core_mm: 0.01, core_gb: 0.01 };
        let hydraulics = HydraulicParams::default_for(&geometry, masses.core);
        Self::new(geometry, masses, friction, hydraulics, 9.8)
            .expect("reference parameters are valid")
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}
