//! Unexpanded angular average behind the decoherence factor.
//!
//! Before the Bessel reduction, tracing out the two photons leaves
//!
//! ```text
//! ⟨ e^{-iz(sin φ - sin φ')} ψ(x + δs, t) ψ*(x' + δs, t) ⟩_{φ, φ'}
//! z = π (x - x') / λ,   s = sin φ + sin φ',   δ = ħ ω0 t / (2μc)
//! ```
//!
//! With `δ = 0` the average factorizes into `J0(z)² ψ(x) ψ*(x')`.

use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::model::{ModelParams, C, HBAR};
use crate::wavepacket::FreeWave;

/// Smallest accepted number of angle nodes per axis.
pub const MIN_ANGLE_NODES: usize = 128;

/// Shift applied to the packet arguments by the recoil of both photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecoilOffset {
    /// `δ = ħ ω0 t / (2μc)`.
    Physical,
    /// `δ = 0`: the reduction the decoherence factor rests on.
    Zero,
    /// An explicit `δ`, in length units.
    Fixed(f64),
}

impl RecoilOffset {
    pub fn delta(&self, t: f64, params: &ModelParams) -> f64 {
        match *self {
            RecoilOffset::Physical => HBAR * params.omega0() * t / (2.0 * params.mu() * C),
            RecoilOffset::Zero => 0.0,
            RecoilOffset::Fixed(d) => d,
        }
    }
}

/// Periodic trapezoid rule on an `n_phi × n_phi` grid of emission angles.
pub fn density_quadrature<W: FreeWave + ?Sized>(
    x: f64,
    x2: f64,
    t: f64,
    wave: &W,
    params: &ModelParams,
    n_phi: usize,
    offset: RecoilOffset,
) -> Result<C64> {
    if n_phi < MIN_ANGLE_NODES {
        return Err(domain(format!("angular quadrature needs n_phi >= {MIN_ANGLE_NODES}, got {n_phi}")));
    }
    let mu = params.mu();
    let z = PI * (x - x2) / params.lambda();
    let delta = offset.delta(t, params);
    let h = 2.0 * PI / n_phi as f64;
    let sines: alloc::vec::Vec<f64> = (0..n_phi).map(|j| (h * j as f64).sin()).collect();

    if delta == 0.0 {
        // the packets do not depend on the angles; the sum still runs over both
        let pair = wave.psi(x, t, mu) * wave.psi(x2, t, mu).conj();
        let mut sum = C64::new(0.0, 0.0);
        for &s1 in &sines {
            let mut row = C64::new(0.0, 0.0);
            for &s2 in &sines {
                row += C64::from_polar(1.0, -z * (s1 - s2));
            }
            sum += row;
        }
        return Ok(pair * sum / (n_phi * n_phi) as f64);
    }

    let mut sum = C64::new(0.0, 0.0);
    for &s1 in &sines {
        let mut row = C64::new(0.0, 0.0);
        for &s2 in &sines {
            let shift = delta * (s1 + s2);
            let pair = wave.psi(x + shift, t, mu) * wave.psi(x2 + shift, t, mu).conj();
            row += pair * C64::from_polar(1.0, -z * (s1 - s2));
        }
        sum += row;
    }
    Ok(sum / (n_phi * n_phi) as f64)
}
