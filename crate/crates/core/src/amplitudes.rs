//! Weisskopf-Wigner solutions for the three amplitude sectors.
//!
//! In the frame rotating at `ω0` the Laplace-domain solutions have simple
//! poles at
//!
//! ```text
//! s_A = -i(ω_A - ω0) - Γ,   s_B(k) = -i(ω_B(k) - ω0) - Γ/2,   s_D = -i(ω_D - ω0)
//! ```
//!
//! and the time-domain amplitudes are their partial-fraction inversions:
//!
//! ```text
//! A(t)     = C_p e^{s_A t}
//! B_k(t)   = -i g C_p (e^{s_B t} - e^{s_A t}) / (s_B - s_A)
//! D_kk'(t) = -g g' C_p Σ_{c ∈ {s_B(k), s_B(k')}} Res[e^{st} / ((s - s_D)(s - s_A)(s - c))]
//! ```
//!
//! The Lamb shift is absorbed into `ω0` and set to zero.

use alloc::{format, vec::Vec};

use num_complex::Complex64 as C64;

use crate::error::{domain, Result};
use crate::model::{omega_a, omega_b, omega_d, ModeVector, ModelParams, HBAR};
use crate::modes::{Coupling, ModeGrid};

/// Amplitudes of one relative-momentum component `p` at total momentum `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeModel {
    params: ModelParams,
    coupling: Coupling,
    p: f64,
    cap_p: f64,
    c_p: C64,
}

/// `t → ∞` limit of `D`, split into a time-independent envelope and the
/// surviving phase `e^{-i(ω_D - ω0) t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DInfinity {
    pub envelope: C64,
    pub phase_rate: f64,
}

impl DInfinity {
    pub fn modulus(&self) -> f64 {
        self.envelope.norm()
    }

    pub fn at(&self, t: f64) -> C64 {
        self.envelope * C64::from_polar(1.0, -self.phase_rate * t)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

impl AmplitudeModel {
    pub fn new(params: ModelParams, coupling: Coupling, p: f64, cap_p: f64, c_p: C64) -> Self {
        Self {
            params,
            coupling,
            p,
            cap_p,
            c_p,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn g(&self, mode: ModeVector) -> Result<f64> {
        self.coupling.at(mode.k)
    }

    pub fn detuning_a(&self) -> f64 {
        omega_a(self.p, self.cap_p, &self.params) - self.params.omega0()
    }

    pub fn detuning_b(&self, mode: ModeVector) -> f64 {
        omega_b(mode, self.p, self.cap_p, &self.params) - self.params.omega0()
    }

    pub fn detuning_d(&self, first: ModeVector, second: ModeVector) -> f64 {
        omega_d(first, second, self.p, self.cap_p, &self.params) - self.params.omega0()
    }

    fn pole_a(&self) -> C64 {
        C64::new(-self.params.gamma(), -self.detuning_a())
    }

    fn pole_b(&self, mode: ModeVector) -> C64 {
        C64::new(-0.5 * self.params.gamma(), -self.detuning_b(mode))
    }

    fn pole_d(&self, first: ModeVector, second: ModeVector) -> C64 {
        C64::new(0.0, -self.detuning_d(first, second))
    }

    /// `A(p, t) = C_p e^{-Γt} e^{-i(ω_A - ω0)t}`.
    pub fn a(&self, t: f64) -> Result<C64> {
        check_time(t)?;
        Ok(self.c_p * (self.pole_a() * t).exp())
    }

    /// One-photon amplitude `B_k(p, t)`.
    pub fn b(&self, mode: ModeVector, t: f64) -> Result<C64> {
        check_time(t)?;
        let g = self.g(mode)?;
        let sa = self.pole_a();
        let sb = self.pole_b(mode);
        let numer = (sb * t).exp() - (sa * t).exp();
        Ok(C64::new(0.0, -g) * self.c_p * numer / (sb - sa))
    }

    /// Two-photon amplitude `D_kk'(p, t)`, all six partial-fraction terms.
    pub fn d(&self, first: ModeVector, second: ModeVector, t: f64) -> Result<C64> {
        check_time(t)?;
        let gg = self.g(first)? * self.g(second)?;
        let sa = self.pole_a();
        let sd = self.pole_d(first, second);
        let ea = (sa * t).exp();
        let ed = (sd * t).exp();
        let mut total = C64::new(0.0, 0.0);
        for mode in [first, second] {
            let sc = self.pole_b(mode);
            let ec = (sc * t).exp();
            total += ed / ((sd - sa) * (sd - sc))
                + ea / ((sa - sd) * (sa - sc))
                + ec / ((sc - sd) * (sc - sa));
        }
        Ok(-gg * self.c_p * total)
    }

    /// Long-time two-photon amplitude.
    ///
    /// Without the recoil approximation this is the product of the two
    /// one-photon Lorentzians, `-g g' C_p / ((i(ω_B - ω_D) + Γ/2)(i(ω_B' - ω_D) + Γ/2))`.
    /// With it, the recoil energies are dropped and only the Doppler shifts
    /// `(p/2μ - P/M) p_φ / ħ` are kept in the denominators.
    pub fn d_infinity(
        &self,
        first: ModeVector,
        second: ModeVector,
        neglect_recoil: bool,
    ) -> Result<DInfinity> {
        let gg = self.g(first)? * self.g(second)?;
        let half = 0.5 * self.params.gamma();
        let omega_dd = omega_d(first, second, self.p, self.cap_p, &self.params);
        let denom = if neglect_recoil {
            let doppler = self.p / (2.0 * self.params.mu()) - self.cap_p / self.params.cap_m();
            let lorentz = |m: ModeVector| {
                C64::new(half, self.params.omega0() - m.omega() - doppler * m.recoil() / HBAR)
            };
            lorentz(first) * lorentz(second)
        } else {
            let lorentz = |m: ModeVector| {
                C64::new(half, omega_b(m, self.p, self.cap_p, &self.params) - omega_dd)
            };
            lorentz(first) * lorentz(second)
        };
        Ok(DInfinity {
            envelope: -gg * self.c_p / denom,
            phase_rate: omega_dd - self.params.omega0(),
        })
    }

    /// All amplitudes on a mode grid at time `t`, `D` over ordered pairs.
    pub fn state(&self, grid: &ModeGrid, t: f64) -> Result<AmplitudeState> {
        let modes = grid.modes();
        let a = self.a(t)?;
        let b = modes.iter().map(|&m| self.b(m, t)).collect::<Result<Vec<_>>>()?;
        let mut d = Vec::with_capacity(modes.len() * modes.len());
        for &m1 in modes {
            for &m2 in modes {
                d.push(self.d(m1, m2, t)?);
            }
        }
        Ok(AmplitudeState {
            p: self.p,
            t,
            a,
            b,
            d,
            n_modes: modes.len(),
        })
    }
}

/// Amplitudes of the three sectors on a mode grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub p: f64,
    pub t: f64,
    pub a: C64,
    pub b: Vec<C64>,
    /// Row-major over ordered mode pairs.
    pub d: Vec<C64>,
    pub n_modes: usize,
}

/// Populations of the zero-, one- and two-photon sectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPopulations {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl SectorPopulations {
    /// `|A|² + 2Σ|B|² + Σ|D|²`.
    pub fn total(&self) -> f64 {
        self.a + self.b + self.d
    }
}

impl AmplitudeState {
    /// Initial condition `A = C_p`, `B = D = 0`.
    pub fn initial(p: f64, c_p: C64, n_modes: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self {
            p,
            t: 0.0,
            a: c_p,
            b: alloc::vec![zero; n_modes],
            d: alloc::vec![zero; n_modes * n_modes],
            n_modes,
        }
    }

    pub fn d_at(&self, i: usize, j: usize) -> C64 {
        self.d[i * self.n_modes + j]
    }

    pub fn populations(&self) -> SectorPopulations {
        SectorPopulations {
            a: self.a.norm_sqr(),
            b: 2.0 * self.b.iter().map(|b| b.norm_sqr()).sum::<f64>(),
            d: self.d.iter().map(|d| d.norm_sqr()).sum(),
        }
    }
}
