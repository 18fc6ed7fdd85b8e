//! Special functions and quadrature used by the rate integrals.

pub mod bessel;
pub mod oscillatory;
pub mod quad;

pub use bessel::{bessel_k1, bessel_k1_scaled, u_p, EULER_GAMMA};
pub use oscillatory::{integrate_semi_infinite_oscillatory, try_integrate_semi_infinite_oscillatory};
pub use quad::{
    integrate_1d, integrate_semi_infinite, try_integrate_1d, try_integrate_semi_infinite, Estimate, NestedSpec,
    QuadratureSpec,
};
