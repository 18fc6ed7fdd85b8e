//! Hydrogenic vertical states bound by the image potential, and the
//! harmonic lateral trap.
//!
//! The pressing field `E_z` is carried on [`Trap`] for bookkeeping only. Its
//! energy `e E_z z` is small next to the polarization coupling and is left
//! out of every rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{angular_frequency, Material, PhysicalConstants};

/// Smallest `(eps - 1)/(eps + 1)` accepted before the Bohr radius blows up.
pub const MIN_POLARIZATION: f64 = 1e-6;

/// Image-potential surface state above a dielectric half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStateModel {
    /// Effective Coulomb parameter, erg cm.
    pub lambda: f64,
    /// Effective Bohr radius, cm.
    pub bohr_radius: f64,
    /// Effective Rydberg energy, erg.
    pub rydberg: f64,
    pub material: Material,
    pub constants: PhysicalConstants,
}

/// `Lambda = e^2/4 (eps-1)/(eps+1)`, `r_B = hbar^2/(Lambda m_e)`,
/// `R = hbar^2/(2 m_e r_B^2)`.
pub fn derive_model(material: &Material, constants: &PhysicalConstants) -> Result<SurfaceStateModel> {
    constants.validate()?;
    let eps = material.require_epsilon()?;
    let polarization = (eps - 1.0) / (eps + 1.0);
    if !(polarization >= MIN_POLARIZATION) {
        return Err(Error::DegenerateMaterial {
            name: material.name.clone(),
            polarization,
            threshold: MIN_POLARIZATION,
        });
    }
    let e = constants.elementary_charge;
    let m = constants.electron_mass;
    let hbar = constants.reduced_planck;
    let lambda = 0.25 * e * e * polarization;
    let bohr_radius = hbar * hbar / (lambda * m);
    let rydberg = hbar * hbar / (2.0 * m * bohr_radius * bohr_radius);
    Ok(SurfaceStateModel {
        lambda,
        bohr_radius,
        rydberg,
        material: material.clone(),
        constants: *constants,
    })
}

impl SurfaceStateModel {
    /// `E_n = -R / n^2`.
    pub fn rydberg_energy(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::domain("rydberg_energy", "n must be at least 1"));
        }
        let n = f64::from(n);
        Ok(-self.rydberg / (n * n))
    }

    /// `|psi_1(z)|^2 = (4/r_B) (z/r_B)^2 exp(-2 z / r_B)`, in 1/cm.
    pub fn groundstate_density(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) || !z.is_finite() {
            return Err(Error::domain(
                "groundstate_density",
                format!("z must be a finite non-negative height, got {z}"),
            ));
        }
        let s = z / self.bohr_radius;
        Ok(4.0 / self.bohr_radius * s * s * (-2.0 * s).exp())
    }
}

/// Lateral harmonic confinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trap {
    /// GHz
    pub f_x: f64,
    /// GHz
    pub f_y: f64,
    /// statV/cm; informational.
    pub pressing_field: f64,
    /// cm
    pub a_x: f64,
    /// cm
    pub a_y: f64,
    /// Transition dipole `sqrt(2) e a_x`, statC cm.
    pub d_x: f64,
}

impl Trap {
    pub fn new(f_x: f64, f_y: f64, pressing_field: f64, constants: &PhysicalConstants) -> Result<Self> {
        let w_x = angular_frequency(f_x)?;
        let w_y = angular_frequency(f_y)?;
        if !pressing_field.is_finite() {
            return Err(Error::domain("Trap", format!("pressing field {pressing_field}")));
        }
        let width = |w: f64| (constants.reduced_planck / (constants.electron_mass * w)).sqrt();
        let a_x = width(w_x);
        let a_y = width(w_y);
        Ok(Trap {
            f_x,
            f_y,
            pressing_field,
            a_x,
            a_y,
            d_x: std::f64::consts::SQRT_2 * constants.elementary_charge * a_x,
        })
    }

    /// `f_x = f_y = f0`, no pressing field.
    pub fn isotropic(f0: f64, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(f0, f0, 0.0, constants)
    }

    pub fn omega_x(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_x * 1e9
    }

    pub fn omega_y(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_y * 1e9
    }

    /// The phonon rates assume `omega_x = omega_y`; returns that common value.
    pub fn isotropic_omega(&self, what: &'static str) -> Result<f64> {
        if ((self.f_x - self.f_y) / self.f_x).abs() > 1e-12 {
            return Err(Error::domain(
                what,
                format!("needs f_x = f_y, got {} and {} GHz", self.f_x, self.f_y),
            ));
        }
        Ok(self.omega_x())
    }

    /// In-plane electron wavenumber `sqrt(m_e omega_x / hbar) = 1/a_x`, 1/cm.
    pub fn electron_wavenumber(&self) -> f64 {
        1.0 / self.a_x
    }
}

fn check_wavevector(what: &'static str, q_x: f64, q_y: f64) -> Result<()> {
    if q_x.is_finite() && q_y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("non-finite wavevector ({q_x}, {q_y})")))
    }
}

/// `|<0|exp(i q.r)|1_x>|^2 = (1/2)(q_x a_x)^2 exp(-(q_x^2 a_x^2 + q_y^2 a_y^2)/2)`.
pub fn form_factor(trap: &Trap, q_x: f64, q_y: f64) -> Result<f64> {
    check_wavevector("form_factor", q_x, q_y)?;
    let px = q_x * trap.a_x;
    let py = q_y * trap.a_y;
    Ok(0.5 * px * px * (-0.5 * (px * px + py * py)).exp())
}

/// Dephasing weight `(1/4)(q_x a_x)^4 exp(-(q_x^2 a_x^2 + q_y^2 a_y^2)/2)`:
/// the squared difference of the diagonal phase matrix elements.
pub fn dephasing_form_factor(trap: &Trap, q_x: f64, q_y: f64) -> Result<f64> {
    check_wavevector("dephasing_form_factor", q_x, q_y)?;
    let px = q_x * trap.a_x;
    let py = q_y * trap.a_y;
    let px2 = px * px;
    Ok(0.25 * px2 * px2 * (-0.5 * (px2 + py * py)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_semi_infinite, QuadratureSpec};

    const K: PhysicalConstants = PhysicalConstants::CODATA_2018;

    fn neon() -> SurfaceStateModel {
        derive_model(&Material::neon(), &K).unwrap()
    }

    #[test]
    fn neon_scales() {
        let m = neon();
        assert!((m.bohr_radius / 1.947e-7 - 1.0).abs() < 1e-3, "{}", m.bohr_radius);
        assert!((m.rydberg / 1.611e-14 - 1.0).abs() < 1e-3, "{}", m.rydberg);
        let kelvin = crate::units::erg_to_kelvin(m.rydberg, &K);
        assert!((kelvin / 116.7 - 1.0).abs() < 1e-3, "{kelvin}");
        assert!((m.lambda / (2.0 * m.rydberg * m.bohr_radius) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_material_is_refused() {
        let almost_vacuum = Material::new("thin", Some(1.0 + 1e-7), None, 1e5).unwrap();
        assert!(matches!(
            derive_model(&almost_vacuum, &K),
            Err(Error::DegenerateMaterial { .. })
        ));
        assert!(derive_model(&Material::silicon(), &K).is_err());
    }

    #[test]
    fn spectrum() {
        let m = neon();
        assert_eq!(m.rydberg_energy(1).unwrap(), -m.rydberg);
        assert_eq!(m.rydberg_energy(2).unwrap(), -m.rydberg / 4.0);
        assert_eq!(m.rydberg_energy(10).unwrap(), -m.rydberg / 100.0);
        assert!(m.rydberg_energy(0).is_err());
    }

    #[test]
    fn ground_state_density_moments() {
        let m = neon();
        let rb = m.bohr_radius;
        let spec = QuadratureSpec::INNER.with_rel_tol(1e-11);
        // integrate in s = z / r_B so the mapped interval sees the peak
        let moment = |n: i32| {
            integrate_semi_infinite(
                |s| (s * rb).powi(n) * m.groundstate_density(s * rb).unwrap() * rb,
                0.0,
                &spec,
            )
            .unwrap()
            .value
        };
        assert!((moment(0) - 1.0).abs() < 1e-9, "{}", moment(0));
        assert!((moment(1) / (1.5 * rb) - 1.0).abs() < 1e-9);
        // <z^2> = 3 r_B^2
        assert!((moment(2) / (3.0 * rb * rb) - 1.0).abs() < 1e-9);
        assert_eq!(m.groundstate_density(0.0).unwrap(), 0.0);
        assert!(m.groundstate_density(-1e-9).is_err());
        // maximum at z = r_B
        let peak = m.groundstate_density(rb).unwrap();
        assert!(peak > m.groundstate_density(rb * 0.99).unwrap());
        assert!(peak > m.groundstate_density(rb * 1.01).unwrap());
    }

    #[test]
    fn trap_widths_at_operating_point() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        assert!((t.a_x / 5.37e-6 - 1.0).abs() < 2e-3, "{}", t.a_x);
        let k_per_m = crate::units::per_cm_to_per_m(t.electron_wavenumber());
        assert!((k_per_m / 1.9e7 - 1.0).abs() < 0.02, "{k_per_m}");
        assert!((t.d_x / (2f64.sqrt() * K.elementary_charge * t.a_x) - 1.0).abs() < 1e-15);
        assert!(Trap::new(6.4, 6.5, 0.0, &K).unwrap().isotropic_omega("x").is_err());
        assert!(Trap::isotropic(0.0, &K).is_err());
    }

    #[test]
    fn form_factor_values() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        let q = 1.0 / t.a_x;
        assert_eq!(form_factor(&t, 0.0, q).unwrap(), 0.0);
        assert!((form_factor(&t, q, 0.0).unwrap() - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((form_factor(&t, q, 0.0).unwrap() - 0.303_265_329_856_316_7).abs() < 1e-12);
        assert!((dephasing_form_factor(&t, q, 0.0).unwrap() - 0.151_632_664_928_158_4).abs() < 1e-12);
        assert_eq!(dephasing_form_factor(&t, 0.0, 0.0).unwrap(), 0.0);
        assert!(form_factor(&t, f64::NAN, 0.0).is_err());
        assert!(dephasing_form_factor(&t, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn form_factor_peaks_at_root_two() {
        let t = Trap::isotropic(6.4, &K).unwrap();
        let peak = 2f64.sqrt() / t.a_x;
        let g = |q: f64| form_factor(&t, q, 0.0).unwrap();
        assert!(g(peak) > g(peak * 0.999));
        assert!(g(peak) > g(peak * 1.001));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lambda_identity(eps in 1.001f64..20.0) {
                let mat = Material::new("x", Some(eps), Some(1.0), 1e5).unwrap();
                let m = derive_model(&mat, &K).unwrap();
                prop_assert!((m.lambda / (2.0 * m.rydberg * m.bohr_radius) - 1.0).abs() < 1e-12);
            }

            #[test]
            fn form_factor_symmetries(qx in -5.0f64..5.0, qy in -5.0f64..5.0, f in 0.5f64..20.0) {
                let t = Trap::new(f, f * 1.3, 0.0, &K).unwrap();
                let (qx, qy) = (qx / t.a_x, qy / t.a_y);
                let g = form_factor(&t, qx, qy).unwrap();
                prop_assert_eq!(g, form_factor(&t, -qx, qy).unwrap());
                prop_assert_eq!(g, form_factor(&t, qx, -qy).unwrap());
                let d = dephasing_form_factor(&t, qx, qy).unwrap();
                let x2 = (qx * t.a_x).powi(2);
                prop_assert!((d - g * x2 / 2.0).abs() <= 1e-14 * d.abs().max(1e-300));
            }
        }
    }
}
