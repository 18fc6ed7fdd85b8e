//! Relaxation (T1) and coherence (T2) times of the lateral motional states
//! of a single electron trapped above a solid-neon surface.
//!
//! Channels: spontaneous emission into vacuum, Purcell decay through a
//! detuned resonator, and one-phonon emission through surface displacement
//! and through modulation of the dielectric constant.

// `!(x > 0.0)` guards deliberately reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants keep every digit the oracle produced.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod displacement;
pub mod error;
pub mod modulation;
pub mod numerics;
pub mod photon;
pub mod report;
pub mod surface;
pub mod units;

pub use error::{Error, Result};
