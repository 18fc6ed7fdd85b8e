//! Relaxation through phonon-induced displacement of the neon surface.
//!
//! Only the polarization (surface-curvature) term of the coupling is kept.
//! The kinematic terms, which carry the in-plane and vertical momentum
//! operators, only connect to out-of-plane excitations, and the pressing
//! field term is negligible beside the polarization term.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bessel::u_p_unchecked;
use crate::numerics::{try_integrate_1d, Estimate, NestedSpec, QuadratureSpec};
use crate::surface::{SurfaceStateModel, Trap};

/// Upper cutoff for the dimensionless height `s = z / r_B`; `e^{-2s}` is
/// below `2e-35` there.
pub const HEIGHT_CUTOFF: f64 = 40.0;

/// Keeps the angular integral off `gamma = 1`, where `ln(0)` would be evaluated.
pub const ENDPOINT_INSET: f64 = 1e-12;

/// How the vertical matrix element of `U_p(q z)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// Small-`q z` logarithm, as used for the published table.
    #[default]
    LogApprox,
    /// Quadrature of `U_p` over the ground-state density.
    ExactKernel,
}

impl KernelMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMode::LogApprox => "log_approx",
            KernelMode::ExactKernel => "exact_kernel",
        }
    }
}

/// `<1_z| U_p(q_par z) |1_z>` as a function of `p = q_par r_B`.
pub fn mean_polarization_kernel(p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(
            "mean_polarization_kernel",
            format!("q r_B must be positive, got {p}"),
        ));
    }
    try_integrate_1d(
        |s| Ok(4.0 * s * s * (-2.0 * s).exp() * u_p_unchecked(p * s)),
        0.0,
        HEIGHT_CUTOFF,
        spec,
    )
    .map_err(|e| e.context("mean_polarization_kernel"))
}

/// Squared vertical matrix element `U` of the polarization coupling, erg^2/cm^2.
///
/// `LogApprox` returns `-(1/2) Lambda^2 q^4 ln(q r_B)`, valid only for
/// `q r_B < 1`. `ExactKernel` returns `|Lambda q^2 <U_p(q z)>|^2`.
pub fn matrix_element_up(
    model: &SurfaceStateModel,
    q_par: f64,
    mode: KernelMode,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(q_par >= 0.0) || !q_par.is_finite() {
        return Err(Error::domain("matrix_element_up", format!("q_par = {q_par}")));
    }
    if q_par == 0.0 {
        return Ok(0.0);
    }
    let p = q_par * model.bohr_radius;
    let lq2 = model.lambda * q_par * q_par;
    match mode {
        KernelMode::LogApprox => {
            if p >= 1.0 {
                return Err(Error::domain(
                    "matrix_element_up",
                    format!("log approximation needs q r_B < 1, got {p}"),
                ));
            }
            Ok(-0.5 * lq2 * lq2 * p.ln())
        }
        KernelMode::ExactKernel => {
            let mean = mean_polarization_kernel(p, spec)?.value;
            Ok((lq2 * mean).powi(2))
        }
    }
}

/// Dimensionless pieces of the angular integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementIntegrand {
    /// `(omega_0 / c) r_B`
    pub alpha: f64,
    /// `hbar omega_0 / (2 m_e c^2)`
    pub exponent_scale: f64,
    pub mode: KernelMode,
}

impl DisplacementIntegrand {
    pub fn new(model: &SurfaceStateModel, trap: &Trap, mode: KernelMode) -> Result<Self> {
        let w0 = trap.isotropic_omega("gamma_displacement")?;
        let c = model.material.c_long;
        let k = &model.constants;
        let alpha = w0 / c * model.bohr_radius;
        if mode == KernelMode::LogApprox && alpha >= 1.0 {
            return Err(Error::domain(
                "gamma_displacement",
                format!("log approximation needs (omega/c) r_B < 1, got {alpha}"),
            ));
        }
        Ok(DisplacementIntegrand {
            alpha,
            exponent_scale: k.reduced_planck * w0 / (2.0 * k.electron_mass * c * c),
            mode,
        })
    }

    /// Integrand in `gamma = cos(theta)` on `[0, 1]`.
    pub fn eval(&self, gamma: f64, inner: &QuadratureSpec) -> Result<f64> {
        let sin2 = 1.0 - gamma * gamma;
        if sin2 <= 0.0 {
            return Ok(0.0);
        }
        let p = self.alpha * sin2.sqrt();
        let kernel = match self.mode {
            KernelMode::LogApprox => p.ln().powi(2),
            // ln^2 stands for (2 <U_p>)^2 in the small-q limit
            KernelMode::ExactKernel => (2.0 * mean_polarization_kernel(p, inner)?.value).powi(2),
        };
        Ok(gamma * gamma * sin2.powi(3) * (-self.exponent_scale * sin2).exp() * kernel)
    }
}

/// Rate prefactor `R^2 r_B^2 omega_0^6 / (8 pi m_e rho c^9)`, 1/s.
fn prefactor(model: &SurfaceStateModel, w0: f64) -> Result<f64> {
    let rho = model.material.require_rho()?;
    let c = model.material.c_long;
    let r = model.rydberg;
    let rb = model.bohr_radius;
    Ok(r * r * rb * rb * w0.powi(6) / (8.0 * PI * model.constants.electron_mass * rho * c.powi(9)))
}

/// Relaxation rate through surface displacement, 1/s.
pub fn gamma_displacement(
    model: &SurfaceStateModel,
    trap: &Trap,
    mode: KernelMode,
    spec: &NestedSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let integrand = DisplacementIntegrand::new(model, trap, mode)?;
    let pre = prefactor(model, trap.omega_x())?;
    let angular = try_integrate_1d(
        |g| integrand.eval(g, &spec.inner),
        0.0,
        1.0 - ENDPOINT_INSET,
        &spec.outer,
    )
    .map_err(|e| e.context("gamma_displacement"))?;
    Ok(Estimate {
        value: pre * angular.value,
        error: pre * angular.error,
        evaluations: angular.evaluations,
    })
}
