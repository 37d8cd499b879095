//! Physical parameters and the bare frequencies of the amplitude sectors.
//!
//! Everything is expressed in natural units with `ħ = c = 1`: `ω0` sets the
//! frequency scale, `1/Γ` the time scale, and `λ = 2π c / ω0` the length
//! scale of the decoherence factor.

use alloc::format;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{config, domain, Result};

/// Reduced Planck constant in the internal unit system.
pub const HBAR: f64 = 1.0;
/// Speed of light in the internal unit system.
pub const C: f64 = 1.0;

/// Smallest `ω0 / Γ` accepted for density-matrix scenarios.
pub const MIN_SCENARIO_FREQUENCY_RATIO: f64 = 10.0;

/// Physical constants of the two-atom model and their derived scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega0: f64,
    gamma: f64,
    mu: f64,
    cap_m: f64,
    lambda: f64,
    dipole: Option<f64>,
}

impl ModelParams {
    /// Builds the parameter set from the transition frequency, the decay
    /// rate and the reduced mass `μ = m/2`.
    pub fn new(omega0: f64, gamma: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("gamma", gamma), ("mu", mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            omega0,
            gamma,
            mu,
            cap_m: total_mass(mu),
            lambda: wavelength(omega0),
            dipole: None,
        })
    }

    /// Builds the parameter set with `Γ` derived from the combined dipole
    /// factor `|d|² / (4 ε0 ħ c²)`.
    pub fn from_dipole(omega0: f64, dipole_factor: f64, mu: f64) -> Result<Self> {
        let gamma = decay_rate(omega0, Some(dipole_factor))?;
        let mut params = Self::new(omega0, gamma, mu)?;
        params.dipole = Some(dipole_factor);
        Ok(params)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Total mass `M = 2m = 4μ`.
    pub fn cap_m(&self) -> f64 {
        self.cap_m
    }

    /// Radiation wavelength `λ = 2π c / ω0`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Resonant wavenumber `k0 = ω0 / c`.
    pub fn k0(&self) -> f64 {
        self.omega0 / C
    }

    pub fn dipole_factor(&self) -> Option<f64> {
        self.dipole
    }

    /// Rejects parameter sets outside the `ω0 ≫ Γ` regime the reduced
    /// density matrix is derived in.
    pub fn check_scenario_regime(&self) -> Result<()> {
        let ratio = self.omega0 / self.gamma;
        if ratio < MIN_SCENARIO_FREQUENCY_RATIO {
            return Err(config(format!(
                "omega0/gamma = {ratio} is below {MIN_SCENARIO_FREQUENCY_RATIO}; scenarios need omega0 >> gamma"
            )));
        }
        Ok(())
    }
}

/// `M = 4μ`.
pub fn total_mass(mu: f64) -> f64 {
    4.0 * mu
}

/// `λ = 2π c / ω0`.
pub fn wavelength(omega0: f64) -> f64 {
    2.0 * PI * C / omega0
}

/// Spontaneous decay rate `Γ = ω0² |d|² / (4 ε0 ħ c²)` of the two-dimensional
/// model, with `dipole_factor = |d|² / (4 ε0 ħ c²)`.
pub fn decay_rate(omega0: f64, dipole_factor: Option<f64>) -> Result<f64> {
    let factor = dipole_factor
        .ok_or_else(|| config("decay rate needs either gamma or the dipole factor"))?;
    if !(factor.is_finite() && factor >= 0.0) {
        return Err(config(format!("dipole factor must be finite and >= 0, got {factor}")));
    }
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(config(format!("omega0 must be finite and > 0, got {omega0}")));
    }
    Ok(omega0 * omega0 * factor)
}

/// A photon mode of the two-dimensional model: wavenumber `k` and emission
/// angle `φ` measured from the axis perpendicular to the atomic motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVector {
    pub k: f64,
    pub phi: f64,
}

impl ModeVector {
    pub fn new(k: f64, phi: f64) -> Self {
        Self { k, phi }
    }

    /// Momentum kick along the atomic axis, `p_φ = ħ k sin φ`.
    pub fn recoil(&self) -> f64 {
        HBAR * self.k * self.phi.sin()
    }

    /// `ω_k = c k`.
    pub fn omega(&self) -> f64 {
        C * self.k
    }
}

/// `ω_A = P²/2Mħ + p²/2μħ + ω0`: both atoms excited, no photon.
pub fn omega_a(p: f64, cap_p: f64, params: &ModelParams) -> f64 {
    (cap_p * cap_p / (2.0 * params.cap_m) + p * p / (2.0 * params.mu)) / HBAR + params.omega0
}

/// `ω_B(k)`: one photon emitted, the emitting atom kicked by `p_φ`.
pub fn omega_b(mode: ModeVector, p: f64, cap_p: f64, params: &ModelParams) -> f64 {
    let kick = mode.recoil();
    let total = cap_p - kick;
    let relative = p - 0.5 * kick;
    (total * total / (2.0 * params.cap_m) + relative * relative / (2.0 * params.mu)) / HBAR
        + mode.omega()
}

/// `ω_D(k, k')`: two photons emitted, one by each atom.
pub fn omega_d(
    first: ModeVector,
    second: ModeVector,
    p: f64,
    cap_p: f64,
    params: &ModelParams,
) -> f64 {
    let kick = first.recoil();
    let kick2 = second.recoil();
    let total = cap_p - kick - kick2;
    let relative = p - 0.5 * kick + 0.5 * kick2;
    (total * total / (2.0 * params.cap_m) + relative * relative / (2.0 * params.mu)) / HBAR
        + first.omega()
        + second.omega()
        - params.omega0
}

/// Rejects wavenumbers outside `k > 0`.
pub(crate) fn check_wavenumber(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(domain(format!("wavenumber must be finite and > 0, got {k}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, TAU};
    use proptest::prelude::*;

    fn unit_params() -> ModelParams {
        ModelParams::new(1.0, 0.01, 1.0).unwrap()
    }

    #[test]
    fn derived_scales_round_trip() {
        let params = ModelParams::new(2.5, 1e-3, 7.0).unwrap();
        assert_eq!(params.cap_m(), total_mass(params.mu()));
        assert_eq!(params.lambda(), wavelength(params.omega0()));
        assert_eq!(params.cap_m(), 28.0);
        assert!((params.lambda() * params.omega0() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn scenario_regime_gate() {
        assert!(ModelParams::new(1.0, 0.1, 1.0).unwrap().check_scenario_regime().is_ok());
        assert!(ModelParams::new(1.0, 0.2, 1.0).unwrap().check_scenario_regime().is_err());
    }

    #[test]
    fn decay_rate_cases() {
        assert_eq!(decay_rate(3.0, Some(0.0)).unwrap(), 0.0);
        let base = decay_rate(1.3, Some(2e-4)).unwrap();
        let doubled = decay_rate(2.6, Some(2e-4)).unwrap();
        assert!((doubled / base - 4.0).abs() < 1e-14);
        assert!((decay_rate(1.0, Some(1e-6)).unwrap() - 1e-6).abs() < 1e-22);
        assert!(matches!(decay_rate(1.0, None), Err(crate::Error::Config(_))));
        let p = ModelParams::from_dipole(1.0, 1e-6, 1.0).unwrap();
        assert_eq!(p.gamma(), 1e-6);
        assert_eq!(p.dipole_factor(), Some(1e-6));
        // zero dipole means no decay, which the model cannot run with
        assert!(ModelParams::from_dipole(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn omega_a_examples() {
        let params = unit_params();
        assert_eq!(omega_a(0.0, 0.0, &params), 1.0);
        assert_eq!(omega_a(1.0, 0.0, &params), 1.5);
        assert_eq!(omega_a(0.3, 0.2, &params), omega_a(-0.3, 0.2, &params));
    }

    #[test]
    fn omega_b_examples() {
        let params = unit_params();
        let no_kick = omega_b(ModeVector::new(1.2, 0.0), 0.4, 0.3, &params);
        assert_eq!(no_kick, 0.3 * 0.3 / 8.0 + 0.4 * 0.4 / 2.0 + 1.2);
        let w = omega_b(ModeVector::new(1.0, FRAC_PI_2), 0.0, 0.0, &params);
        assert!((w - 1.25).abs() < 1e-15);
        let phi = 0.37;
        let a = omega_b(ModeVector::new(0.9, phi), 0.2, -0.1, &params);
        let b = omega_b(ModeVector::new(0.9, PI - phi), 0.2, -0.1, &params);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn omega_d_examples() {
        let params = unit_params();
        let plain = omega_d(ModeVector::new(1.1, 0.0), ModeVector::new(0.8, 0.0), 0.0, 0.0, &params);
        assert!((plain - (1.1 + 0.8 - 1.0)).abs() < 1e-15);
        let w = omega_d(
            ModeVector::new(1.0, FRAC_PI_2),
            ModeVector::new(1.0, -FRAC_PI_2),
            0.0,
            0.0,
            &params,
        );
        assert!((w - 1.5).abs() < 1e-15);
    }

    #[test]
    fn frequencies_are_repeatable_across_threads() {
        let params = unit_params();
        let m1 = ModeVector::new(1.01, 0.3);
        let m2 = ModeVector::new(0.97, 2.1);
        let reference = omega_d(m1, m2, 0.2, 0.1, &params).to_bits();
        let handles: std::vec::Vec<_> = (0..4)
            .map(|_| std::thread::spawn(move || omega_d(m1, m2, 0.2, 0.1, &params).to_bits()))
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    }

    proptest! {
        #[test]
        fn omega_d_swap_symmetry(k in 0.5f64..2.0, k2 in 0.5f64..2.0, phi in 0.0f64..TAU,
                                 phi2 in 0.0f64..TAU, p in -1.0f64..1.0) {
            let params = unit_params();
            let a = omega_d(ModeVector::new(k, phi), ModeVector::new(k2, phi2), p, 0.0, &params);
            let b = omega_d(ModeVector::new(k2, phi2), ModeVector::new(k, phi), -p, 0.0, &params);
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }

        #[test]
        fn omega_b_recoil_polynomial(phi in 0.0f64..TAU, p in -2.0f64..2.0, cap_p in -2.0f64..2.0) {
            let params = ModelParams::new(1.7, 1e-3, 3.0).unwrap();
            let k0 = params.k0();
            let w = omega_b(ModeVector::new(k0, phi), p, cap_p, &params);
            let q = k0 * phi.sin();
            // expanded by hand: the kick enters linearly through P and p and
            // quadratically with the combined mass 1/2M + 1/8μ
            let recoil = -cap_p * q / params.cap_m() - p * q / (2.0 * params.mu())
                + q * q * (1.0 / (2.0 * params.cap_m()) + 1.0 / (8.0 * params.mu()));
            let rest = w - params.omega0() - cap_p * cap_p / (2.0 * params.cap_m())
                - p * p / (2.0 * params.mu());
            prop_assert!((rest - recoil).abs() < 1e-12);
        }
    }
}
