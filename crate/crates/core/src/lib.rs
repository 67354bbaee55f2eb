//! Semiclassical and quantum dynamics of the Dicke model: a spin of length
//! `j` coupled linearly to a single bosonic mode,
//!
//! ```text
//! H = Δ Jz + λ (a + a†) Jx + Ω a†a
//! ```
//!
//! The classical side works in the planar (stereographic) spin chart `z`
//! and the scaled boson amplitude `ᾱ = (Ω / jλ) ⟨a⟩`. The quantum side uses
//! a truncated spin ⊗ Fock basis, Chebyshev propagation and kernel
//! polynomial spectra.

// `!(x > 0.0)` style checks deliberately reject NaN; fixed-size numeric
// kernels index several arrays in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chebyshev;
pub mod classical;
pub mod error;
pub mod io;
pub mod model;
pub mod modes;
pub mod phase_space;
pub mod quantum;

pub use error::{Error, Result};
pub use model::{ClassicalState, ModelParams, SpinTriple};
