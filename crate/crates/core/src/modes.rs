//! Discrete photon mode grids for the brute-force oracles.
//!
//! The continuum of emitted photons is replaced by a uniform wavenumber
//! grid around the resonance `k0 = ω0/c`, optionally crossed with a set of
//! emission angles. Each mode carries a quadrature weight (in wavenumber,
//! times its share of the full angle), and the coupling is fixed by the
//! golden rule so that `Γ/2 = π Σ g² δ(ω - ω0)` in the continuum limit.

use alloc::{format, vec::Vec};
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{config, Result};
use crate::model::{check_wavenumber, ModeVector, ModelParams, C};

/// Mode coupling `g(k) = g(k0) √(k/k0)`.
///
/// The mode volume and the permittivity never appear separately; only the
/// resonant value is kept, and it is tied to `Γ` by the mode grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub at_resonance: f64,
    pub k0: f64,
}

impl Coupling {
    pub fn at(&self, k: f64) -> Result<f64> {
        check_wavenumber(k)?;
        Ok(self.at_resonance * (k / self.k0).sqrt())
    }
}

/// `g(k)` for the given reference coupling. Fails for `k <= 0`.
pub fn coupling_g(k: f64, coupling: &Coupling) -> Result<f64> {
    coupling.at(k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    k_values: Vec<f64>,
    phi_values: Vec<f64>,
    modes: Vec<ModeVector>,
    weights: Vec<f64>,
    half_width: f64,
    k0: f64,
    coupling: Coupling,
}

impl ModeGrid {
    /// Uniform midpoint grid of `n_k` wavenumbers covering
    /// `[k0 - W, k0 + W]` with `W = half_width_gamma · Γ / c`, crossed with
    /// the given emission angles (each taking an equal share of `2π`).
    pub fn uniform(
        params: &ModelParams,
        n_k: usize,
        half_width_gamma: f64,
        phi_values: &[f64],
    ) -> Result<Self> {
        if n_k == 0 {
            return Err(config("mode grid needs at least one wavenumber"));
        }
        if phi_values.is_empty() {
            return Err(config("mode grid needs at least one emission angle"));
        }
        if !(half_width_gamma.is_finite() && half_width_gamma > 0.0) {
            return Err(config(format!("bandwidth must be > 0, got {half_width_gamma}")));
        }
        let k0 = params.k0();
        let half_width = half_width_gamma * params.gamma() / C;
        if half_width >= k0 {
            return Err(config("bandwidth reaches k <= 0; increase omega0/gamma"));
        }
        for &phi in phi_values {
            if !(0.0..2.0 * PI).contains(&phi) {
                return Err(config(format!("emission angle {phi} outside [0, 2pi)")));
            }
        }
        let dk = 2.0 * half_width / n_k as f64;
        let k_values: Vec<f64> =
            (0..n_k).map(|i| k0 - half_width + (i as f64 + 0.5) * dk).collect();
        let weight = dk / phi_values.len() as f64;
        let mut modes = Vec::with_capacity(n_k * phi_values.len());
        for &k in &k_values {
            for &phi in phi_values {
                modes.push(ModeVector::new(k, phi));
            }
        }
        let weights = alloc::vec![weight; modes.len()];
        let coupling = Coupling {
            at_resonance: (params.gamma() * C * weight / (2.0 * PI)).sqrt(),
            k0,
        };
        Ok(Self {
            k_values,
            phi_values: phi_values.to_vec(),
            modes,
            weights,
            half_width,
            k0,
            coupling,
        })
    }

    /// `n` equally spaced angles `2π j / n`.
    pub fn uniform_angles(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    /// Replaces the golden-rule coupling with an explicit `g(k0)`.
    pub fn with_coupling(mut self, at_resonance: f64) -> Self {
        self.coupling.at_resonance = at_resonance;
        self
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeVector] {
        &self.modes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi_values
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    /// Half-width `W` of the wavenumber band.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Coupling of every mode, in grid order.
    pub fn couplings(&self) -> Vec<f64> {
        self.modes
            .iter()
            .map(|m| self.coupling.at_resonance * (m.k / self.k0).sqrt())
            .collect()
    }

    /// Frequency spacing between neighbouring wavenumbers.
    pub fn omega_spacing(&self) -> f64 {
        C * 2.0 * self.half_width / self.k_values.len() as f64
    }

    /// Time after which the discrete bath refeeds the atoms, `2π / Δω`.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.omega_spacing()
    }

    /// Weighted sum `Σ w f(k)`, the grid's stand-in for `∫ f(k) dk`.
    pub fn integrate_k(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.modes.iter().zip(&self.weights).map(|(m, w)| w * f(m.k)).sum()
    }

    /// Indices of the `n` modes closest to resonance, ascending by index.
    pub fn central_modes(&self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.modes.len()).collect();
        idx.sort_by(|&a, &b| {
            let da = (self.modes[a].k - self.k0).abs();
            let db = (self.modes[b].k - self.k0).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        idx.truncate(n);
        idx.sort_unstable();
        idx
    }
}
