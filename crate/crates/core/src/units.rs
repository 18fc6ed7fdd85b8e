//! Physical constants, material presets and the handful of unit
//! conversions the rate formulas need.
//!
//! Everything inside the crate is Gaussian CGS (erg, g, cm, s, statC).
//! GHz, SI wavenumbers and kelvin only appear at the edges, through the
//! helpers below.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fundamental constants in Gaussian CGS units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// statC
    pub elementary_charge: f64,
    /// g
    pub electron_mass: f64,
    /// erg s
    pub reduced_planck: f64,
    /// cm/s
    pub light_speed: f64,
    /// erg/K
    pub boltzmann: f64,
}

impl PhysicalConstants {
    /// CODATA 2018.
    ///
    /// | constant | value                        | source                              |
    /// |----------|------------------------------|-------------------------------------|
    /// | e        | 4.80320471e-10 statC         | 1.602176634e-19 C x 2997924580 (exact) |
    /// | m_e      | 9.10938370e-28 g             | 9.1093837015(28)e-31 kg             |
    /// | hbar     | 1.05457182e-27 erg s         | 1.054571817...e-34 J s (exact h)     |
    /// | c        | 2.99792458e10 cm/s           | exact                               |
    /// | k_B      | 1.38064900e-16 erg/K         | exact                               |
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        elementary_charge: 4.803_204_712_570_263e-10,
        electron_mass: 9.109_383_701_5e-28,
        reduced_planck: 1.054_571_817e-27,
        light_speed: 2.997_924_58e10,
        boltzmann: 1.380_649e-16,
    };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("elementary_charge", self.elementary_charge),
            ("electron_mass", self.electron_mass),
            ("reduced_planck", self.reduced_planck),
            ("light_speed", self.light_speed),
            ("boltzmann", self.boltzmann),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain("physical constants", format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// A host or substrate material.
///
/// `epsilon` and `rho` are optional because substrates only enter through
/// their sound velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Relative permittivity.
    pub epsilon: Option<f64>,
    /// Mass density, g/cm^3.
    pub rho: Option<f64>,
    /// Longitudinal sound velocity, cm/s.
    pub c_long: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, epsilon: Option<f64>, rho: Option<f64>, c_long: f64) -> Result<Self> {
        let m = Material {
            name: name.into(),
            epsilon,
            rho,
            c_long,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 1.0) {
                return Err(Error::domain(
                    "material",
                    format!("{}: epsilon must exceed 1, got {eps}", self.name),
                ));
            }
        }
        if let Some(rho) = self.rho {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(Error::domain(
                    "material",
                    format!("{}: rho must be positive, got {rho}", self.name),
                ));
            }
        }
        if !(self.c_long.is_finite() && self.c_long > 0.0) {
            return Err(Error::domain(
                "material",
                format!("{}: c_long must be positive, got {}", self.name, self.c_long),
            ));
        }
        Ok(())
    }

    /// Solid neon.
    pub fn neon() -> Self {
        Material {
            name: "Ne".into(),
            epsilon: Some(1.244),
            rho: Some(1.444),
            c_long: 1.133e5,
        }
    }

    /// Silicon, acoustic data only (8480 m/s).
    pub fn silicon() -> Self {
        Material {
            name: "Si".into(),
            epsilon: None,
            rho: None,
            c_long: 8.48e5,
        }
    }

    /// Sapphire, acoustic data only (11350 m/s).
    pub fn sapphire() -> Self {
        Material {
            name: "sapphire".into(),
            epsilon: None,
            rho: None,
            c_long: 1.135e6,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ne" | "neon" => Some(Self::neon()),
            "si" | "silicon" => Some(Self::silicon()),
            "sapphire" | "al2o3" => Some(Self::sapphire()),
            _ => None,
        }
    }

    pub(crate) fn require_epsilon(&self) -> Result<f64> {
        self.epsilon
            .ok_or_else(|| Error::domain("material", format!("{} has no dielectric constant", self.name)))
    }

    pub(crate) fn require_rho(&self) -> Result<f64> {
        self.rho
            .ok_or_else(|| Error::domain("material", format!("{} has no mass density", self.name)))
    }
}

/// Angular frequency in rad/s from a frequency in GHz.
pub fn angular_frequency(f_ghz: f64) -> Result<f64> {
    if !(f_ghz.is_finite() && f_ghz > 0.0) {
        return Err(Error::domain(
            "angular_frequency",
            format!("frequency must be positive and finite, got {f_ghz} GHz"),
        ));
    }
    Ok(2.0 * PI * f_ghz * 1e9)
}

/// Inverse of [`angular_frequency`].
pub fn frequency_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

/// Angular frequency (rad/s) from an ordinary frequency in MHz.
pub fn angular_from_mhz(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

/// Bose-Einstein occupation of a mode at `omega` (rad/s) and temperature
/// `temperature` (K). Returns exactly 0 at zero temperature.
pub fn thermal_occupation(omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(
            "thermal_occupation",
            format!("omega must be positive, got {omega}"),
        ));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::domain(
            "thermal_occupation",
            format!("temperature must be non-negative, got {temperature}"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = k.reduced_planck * omega / (k.boltzmann * temperature);
    Ok(1.0 / x.exp_m1())
}

/// 1/cm -> 1/m
pub fn per_cm_to_per_m(v: f64) -> f64 {
    v * 100.0
}

/// cm -> nm
pub fn cm_to_nm(v: f64) -> f64 {
    v * 1e7
}

/// erg -> K (energy over k_B)
pub fn erg_to_kelvin(e: f64, k: &PhysicalConstants) -> f64 {
    e / k.boltzmann
}

/// statV/cm -> V/m
pub fn statvolt_per_cm_to_volt_per_m(v: f64) -> f64 {
    v * 2.997_924_58e4
}
