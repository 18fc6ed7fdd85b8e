//! Relaxation through phonon-driven modulation of the dielectric constant.
//!
//! A longitudinal phonon changes the local density by `rho'`, which shifts
//! the dielectric constant by `(eps - 1) rho'/rho` and with it the image
//! potential felt by the electron.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::displacement::{ENDPOINT_INSET, HEIGHT_CUTOFF};
use crate::error::{Error, Result};
use crate::numerics::bessel::k1_unchecked;
use crate::numerics::{
    try_integrate_1d, try_integrate_semi_infinite_oscillatory, Estimate, NestedSpec, QuadratureSpec,
};
use crate::surface::{SurfaceStateModel, Trap};
use crate::units::Material;

/// Electron-to-phonon wavenumber ratio above which a substrate channel is
/// flagged as suppressed.
pub const SUPPRESSION_RATIO: f64 = 2.0;

/// `delta eps = (eps - 1) rho' / rho`.
pub fn dielectric_variation(material: &Material, rho_variation: f64) -> Result<f64> {
    let eps = material.require_epsilon()?;
    let rho = material.require_rho()?;
    if !rho_variation.is_finite() || rho_variation.abs() >= rho {
        return Err(Error::domain(
            "dielectric_variation",
            format!("|rho'| must be below rho = {rho}, got {rho_variation}"),
        ));
    }
    Ok((eps - 1.0) * rho_variation / rho)
}

/// `J(b) = int_0^inf ds s^2 e^{-2s} int_0^inf ds' sin(b s') / (s + s')^2`.
///
/// The `s'` integral runs over half-periods of the sine. `s^2` is folded
/// into the inner integrand, which keeps it bounded by 1 and gives the
/// envelope `max(1, s^2) / (1 + s')^2`.
pub fn height_kernel(b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(
            "height_kernel",
            format!("b must be non-negative, got {b}"),
        ));
    }
    if b == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut evaluations = 0;
    let mut est = try_integrate_1d(
        |s| {
            if s == 0.0 {
                return Ok(0.0);
            }
            let s2 = s * s;
            let inner = try_integrate_semi_infinite_oscillatory(
                |t| {
                    let d = s + t;
                    Ok(s2 * (b * t).sin() / (d * d))
                },
                b,
                s2.max(1.0),
                spec,
            )?;
            evaluations += inner.evaluations;
            Ok((-2.0 * s).exp() * inner.value)
        },
        0.0,
        HEIGHT_CUTOFF,
        spec,
    )
    .map_err(|e| e.context("height_kernel"))?;
    est.evaluations += evaluations;
    Ok(est)
}

/// Squared vertical matrix element of the modulation coupling with the
/// full Bessel kernel:
/// `F = |<1_z| int_{-inf}^0 dz' sin(q_z z') K1(q_par (z - z')) / (z - z') |1_z>|^2`.
///
/// In `s = z / r_B`, `s' = -z'/r_B` this is
/// `16 (int ds s^2 e^{-2s} int ds' sin(beta s') K1(p (s + s')) / (s + s'))^2`
/// with `p = q_par r_B`, `beta = q_z r_B`.
pub fn f_kernel_exact(model: &SurfaceStateModel, q_par: f64, q_z: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(q_par > 0.0) || !q_par.is_finite() {
        return Err(Error::domain(
            "f_kernel_exact",
            format!("q_par must be positive, got {q_par}"),
        ));
    }
    if !q_z.is_finite() {
        return Err(Error::domain("f_kernel_exact", format!("q_z = {q_z}")));
    }
    if q_z == 0.0 {
        return Ok(0.0);
    }
    let p = q_par * model.bohr_radius;
    let beta = q_z.abs() * model.bohr_radius;
    // x K1(x) <= 1, so |s^2 K1(p d) / d| <= s^2 / (p d^2)
    let outer = try_integrate_1d(
        |s| {
            if s == 0.0 {
                return Ok(0.0);
            }
            let s2 = s * s;
            let inner = try_integrate_semi_infinite_oscillatory(
                |t| {
                    let d = s + t;
                    Ok(s2 * (beta * t).sin() * k1_unchecked(p * d) / d)
                },
                beta,
                s2.max(1.0) / p,
                spec,
            )?;
            Ok((-2.0 * s).exp() * inner.value)
        },
        0.0,
        HEIGHT_CUTOFF,
        spec,
    )
    .map_err(|e| e.context("f_kernel_exact"))?;
    Ok(16.0 * outer.value * outer.value)
}

/// Dimensionless pieces of the angular integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationIntegrand {
    /// `(omega_0 / c) r_B`
    pub alpha: f64,
    /// `hbar omega_0 / (2 m_e c^2)`
    pub exponent_scale: f64,
}

impl ModulationIntegrand {
    pub fn new(model: &SurfaceStateModel, trap: &Trap) -> Result<Self> {
        let w0 = trap.isotropic_omega("gamma_modulation")?;
        let c = model.material.c_long;
        let k = &model.constants;
        Ok(ModulationIntegrand {
            alpha: w0 / c * model.bohr_radius,
            exponent_scale: k.reduced_planck * w0 / (2.0 * k.electron_mass * c * c),
        })
    }

    /// Integrand in `gamma = cos(theta)` on `[0, 1]`; the sine argument
    /// carries the in-plane wavevector, `u = sin(theta)`.
    pub fn eval(&self, gamma: f64, inner: &QuadratureSpec) -> Result<f64> {
        let sin2 = 1.0 - gamma * gamma;
        if sin2 <= 0.0 {
            return Ok(0.0);
        }
        let j = height_kernel(self.alpha * sin2.sqrt(), inner)?.value;
        Ok(sin2 * (-self.exponent_scale * sin2).exp() * j * j)
    }
}

/// Rate prefactor `8 R^2 omega_0^4 / (pi m_e rho c^7)`, 1/s.
fn prefactor(model: &SurfaceStateModel, w0: f64) -> Result<f64> {
    let rho = model.material.require_rho()?;
    let c = model.material.c_long;
    let r = model.rydberg;
    Ok(8.0 * r * r * w0.powi(4) / (PI * model.constants.electron_mass * rho * c.powi(7)))
}

/// Relaxation rate through dielectric-constant modulation, 1/s.
pub fn gamma_modulation(model: &SurfaceStateModel, trap: &Trap, spec: &NestedSpec) -> Result<Estimate> {
    spec.validate()?;
    let integrand = ModulationIntegrand::new(model, trap)?;
    let pre = prefactor(model, trap.omega_x())?;
    let angular = try_integrate_1d(
        |g| integrand.eval(g, &spec.inner),
        0.0,
        1.0 - ENDPOINT_INSET,
        &spec.outer,
    )
    .map_err(|e| e.context("gamma_modulation"))?;
    Ok(Estimate {
        value: pre * angular.value,
        error: pre * angular.error,
        evaluations: angular.evaluations,
    })
}

/// Wavenumber mismatch between the trapped electron and a resonant
/// substrate phonon. All wavenumbers in 1/cm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateReport {
    pub substrate: String,
    /// `sqrt(m_e omega_0 / hbar)`
    pub electron_wavenumber: f64,
    /// `omega_0 / c_sub`
    pub phonon_wavenumber: f64,
    /// electron / phonon
    pub ratio: f64,
    /// `(q a_x)^2 / 2` at the phonon wavenumber
    pub gaussian_exponent: f64,
    /// `exp(-(q a_x)^2 / 2)`
    pub gaussian_form_factor: f64,
    pub suppressed: bool,
}

pub fn substrate_channel_report(trap: &Trap, substrate: &Material) -> SubstrateReport {
    substrate_channel_report_with_threshold(trap, substrate, SUPPRESSION_RATIO)
}

pub fn substrate_channel_report_with_threshold(trap: &Trap, substrate: &Material, threshold: f64) -> SubstrateReport {
    let electron = trap.electron_wavenumber();
    let phonon = trap.omega_x() / substrate.c_long;
    let ratio = electron / phonon;
    let qa = phonon * trap.a_x;
    let exponent = 0.5 * qa * qa;
    SubstrateReport {
        substrate: substrate.name.clone(),
        electron_wavenumber: electron,
        phonon_wavenumber: phonon,
        ratio,
        gaussian_exponent: exponent,
        gaussian_form_factor: (-exponent).exp(),
        suppressed: ratio > threshold,
    }
}
