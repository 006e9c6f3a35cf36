//! Numerical model of how Schwarzschild curvature degrades photonic
//! quantum-communication links between observers at different
//! gravitational potentials.
//!
//! The crate is organised bottom-up:
//!
//! - [`spacetime`]: metric factor, redshifts, tortoise coordinate and
//!   radial light travel.
//! - [`wavepacket`]: normalized frequency distributions, their transport
//!   between stations and the mode overlap Δ.
//! - [`fidelity`]: single-photon, coherent and two-mode-squeezed channel
//!   fidelities as functions of Δ.
//! - [`entangleswap`]: six-mode Fock simulation of single-click
//!   entanglement distribution, negativity and QBER.
//! - [`cvhomodyne`]: balanced homodyne detection with a co-propagating
//!   local oscillator.
//! - [`scenario`]: configuration, end-to-end pipeline, sweeps and the
//!   reference-value table used by the CLI.

pub mod constants;
pub mod cvhomodyne;
pub mod entangleswap;
mod error;
pub mod fidelity;
pub mod scenario;
pub mod spacetime;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
