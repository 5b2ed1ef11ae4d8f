//! Numerical library for the classical and quantum motion of a charged
//! particle in a uniform magnetic field on a noncommutative plane, where
//! the position operators obey [q̂¹, q̂²] = iθ.
//!
//! The crate covers:
//! * derived parameters and critical-θ bookkeeping ([`params`]),
//! * closed-form and integrated classical trajectories in the Landau and
//!   symmetric gauges ([`classical`]),
//! * a dense truncated-Fock operator algebra: ladder operators, both
//!   gauge Hamiltonians, angular momentum, center/relative coordinates
//!   and the squeezed lowering operator Ẑ_λ ([`fock`]),
//! * Malkin–Man'ko and λ-coherent-state families with their series
//!   functions and semiclassical diagnostics ([`cstates`]),
//! * the coherent-state (anti-Wick) quantization map driven by the λ-CS
//!   weight function and its moment problem ([`quantize`]).

pub mod classical;
pub mod cstates;
pub mod error;
pub mod fock;
pub mod params;
pub mod quadrature;
pub mod quantize;
pub mod special;

pub use error::{CoreError, Result};
