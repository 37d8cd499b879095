//! Spontaneous-emission decoherence of the relative position of two cold
//! two-level atoms.
//!
//! Each emitted photon kicks the emitting atom by `ħ k sin φ`. Tracing out
//! the photons leaves the relative coordinate in a mixed state whose
//! coherences are multiplied by the decoherence factor
//! `F(x, x') = J0²(π (x - x') / λ)`.
//!
//! The crate is `no_std` (with `alloc`) and holds every numerical piece:
//!
//! * [`model`]: parameters in natural units (`ħ = c = 1`) and the bare
//!   frequencies of the three amplitude sectors.
//! * [`modes`]: discrete photon mode grids and their couplings.
//! * [`specfun`]: Bessel `J0` and its integral-identity oracle.
//! * [`amplitudes`]: closed-form Weisskopf-Wigner amplitudes `A`, `B`, `D`.
//! * [`wavepacket`]: free Gaussian packets of the relative coordinate.
//! * [`density`]: reduced density matrices, coherence length, scenarios.
//! * [`oracle`]: brute-force checks (discrete-mode ODE integration,
//!   unexpanded angular quadrature, golden-rule rate sum).
//!
//! IO, configuration and the command line live in the `recoil-sim` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod amplitudes;
pub mod density;
mod error;
pub mod model;
pub mod modes;
pub mod ode;
pub mod oracle;
pub mod specfun;
pub mod wavepacket;

pub use error::{Error, Result};
pub use model::ModelParams;
pub use model::ModeVector;
pub use modes::{Coupling, ModeGrid};
pub use num_complex::Complex64 as C64;
