//! Radiative decay: free-space spontaneous emission and Purcell decay
//! through a detuned single-mode resonator.
//!
//! All cavity rates (`g`, `kappa`, detuning) are angular, in rad/s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::Trap;
use crate::units::{angular_frequency, PhysicalConstants};

/// Default ceiling on `g / |Delta|` for the dispersive formula.
pub const DISPERSIVE_RATIO_LIMIT: f64 = 0.1;

/// Single-mode resonator coupled to the lateral dipole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Coupling, rad/s.
    pub g: f64,
    /// Linewidth, rad/s.
    pub kappa: f64,
    /// Resonator frequency, GHz.
    pub f_r: f64,
}

impl CavityParams {
    pub fn new(g: f64, kappa: f64, f_r: f64) -> Result<Self> {
        let c = CavityParams { g, kappa, f_r };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::domain(
                "CavityParams",
                format!("g must be positive, got {}", self.g),
            ));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::domain(
                "CavityParams",
                format!("kappa must be non-negative, got {}", self.kappa),
            ));
        }
        angular_frequency(self.f_r).map(|_| ())
    }

    /// `omega_x - omega_r`, rad/s.
    pub fn detuning(&self, trap: &Trap) -> f64 {
        trap.omega_x() - 2.0 * std::f64::consts::PI * self.f_r * 1e9
    }

    /// `g / |omega_x - omega_r|`; the formula needs this small.
    pub fn dispersive_ratio(&self, trap: &Trap) -> f64 {
        self.g / self.detuning(trap).abs()
    }
}

/// `Gamma = |d_x|^2 omega_x^3 / (3 hbar c^3)`, 1/s.
///
/// `d_x` carries `a_x^2 ~ 1/omega_x`, so the rate is quadratic in frequency.
pub fn gamma_vacuum(trap: &Trap, constants: &PhysicalConstants) -> f64 {
    let w = trap.omega_x();
    let c = constants.light_speed;
    trap.d_x * trap.d_x * w * w * w / (3.0 * constants.reduced_planck * c * c * c)
}

/// `Gamma = g^2 kappa / (omega_x - omega_r)^2`, 1/s.
pub fn gamma_purcell(trap: &Trap, cavity: &CavityParams) -> Result<f64> {
    cavity.validate()?;
    let delta = cavity.detuning(trap);
    if delta == 0.0 {
        return Err(Error::domain(
            "gamma_purcell",
            "zero detuning: dispersive formula diverges",
        ));
    }
    Ok(cavity.g * cavity.g * cavity.kappa / (delta * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular_from_mhz;

    const K: PhysicalConstants = PhysicalConstants::CODATA_2018;

    #[test]
    fn vacuum_lifetime_at_operating_point() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        let t1 = 1.0 / gamma_vacuum(&t, &K);
        assert!((t1 / 99.0 - 1.0).abs() < 0.02, "{t1}");
    }

    #[test]
    fn vacuum_rate_is_quadratic() {
        for f in [1.0, 3.3, 6.4] {
            let g1 = gamma_vacuum(&Trap::isotropic(f, &K).unwrap(), &K);
            let g2 = gamma_vacuum(&Trap::isotropic(2.0 * f, &K).unwrap(), &K);
            assert!((g2 / g1 - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purcell_hand_value() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        let cav = CavityParams::new(angular_from_mhz(5.0), angular_from_mhz(0.5), 5.9).unwrap();
        let g = gamma_purcell(&t, &cav).unwrap();
        // 2 pi (5e6)^2 (0.5e6) / (5e8)^2 = 2 pi 50
        let hand = 2.0 * std::f64::consts::PI * 5e6 * 5e6 * 0.5e6 / (5e8 * 5e8);
        assert!((g / hand - 1.0).abs() < 1e-12, "{g} vs {hand}");
        assert!((1.0 / g - 3.18e-3).abs() < 1e-5);
        assert!((cav.dispersive_ratio(&t) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn purcell_scaling_and_limits() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        let g = angular_from_mhz(5.0);
        let k = angular_from_mhz(0.5);
        let near = gamma_purcell(&t, &CavityParams::new(g, k, 5.9).unwrap()).unwrap();
        let far = gamma_purcell(&t, &CavityParams::new(g, k, 5.4).unwrap()).unwrap();
        assert!((far / near - 0.25).abs() < 1e-12);
        let above = gamma_purcell(&t, &CavityParams::new(g, k, 6.9).unwrap()).unwrap();
        assert!((above / near - 1.0).abs() < 1e-12);
        assert_eq!(
            gamma_purcell(&t, &CavityParams::new(g, 0.0, 5.9).unwrap()).unwrap(),
            0.0
        );
        assert!(gamma_purcell(&t, &CavityParams::new(g, k, 6.4).unwrap()).is_err());
        assert!(CavityParams::new(0.0, k, 5.9).is_err());
    }
}
