//! Free evolution of the relative-coordinate wave function.
//!
//! Convention: `ψ(x, t) = (2π)^{-1/2} ∫ C_p e^{i(p x - p² t / 2μ)} dp` with
//! `ħ = 1`. A Gaussian packet of width `d` centred at `c` has
//! `C_p = (2d²/π)^{1/4} e^{-d² p²} e^{-i p c}`, and evolves in closed form to
//!
//! ```text
//! ψ(x, t) = (2π)^{-1/4} (d + i t / (2μd))^{-1/2} exp(-(x - c)² / (4d² + 2i t / μ))
//! ```
//!
//! whose density has variance `σ(t)² = d² + t² / (4μ²d²)`.

use alloc::{format, vec::Vec};
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{config, domain, Result};

/// Anything with a known free-particle wave function.
pub trait FreeWave {
    fn psi(&self, x: f64, t: f64, mu: f64) -> C64;
}

/// `ψ(x, t)` of a free wave.
pub fn psi_free<W: FreeWave + ?Sized>(wave: &W, x: f64, t: f64, mu: f64) -> C64 {
    wave.psi(x, t, mu)
}

/// Normalized Gaussian of width `d` centred at `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(config(format!("packet width must be finite and > 0, got {width}")));
        }
        if !center.is_finite() {
            return Err(config(format!("packet center must be finite, got {center}")));
        }
        Ok(Self { center, width })
    }

    /// `G+`, centred at `-a`.
    pub fn g_plus(a: f64, d: f64) -> Result<Self> {
        Self::new(-a, d)
    }

    /// `G-`, centred at `+a`.
    pub fn g_minus(a: f64, d: f64) -> Result<Self> {
        Self::new(a, d)
    }

    /// Standard deviation of `|ψ(·, t)|²`.
    pub fn sigma(&self, t: f64, mu: f64) -> f64 {
        let d = self.width;
        let spread = t / (2.0 * mu * d);
        (d * d + spread * spread).sqrt()
    }

    pub fn c_p(&self, p: f64) -> C64 {
        let d = self.width;
        let amp = (2.0 * d * d / PI).powf(0.25) * (-d * d * p * p).exp();
        C64::from_polar(amp, -p * self.center)
    }
}

impl FreeWave for GaussianPacket {
    fn psi(&self, x: f64, t: f64, mu: f64) -> C64 {
        let d = self.width;
        let q = C64::new(d, t / (2.0 * mu * d));
        let u = x - self.center;
        let expo = -C64::new(u * u, 0.0) / C64::new(4.0 * d * d, 2.0 * t / mu);
        (2.0 * PI).powf(-0.25) / q.sqrt() * expo.exp()
    }
}

/// Sampled momentum amplitude `C_p` on a uniform grid, at total momentum `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAmplitude {
    p_values: Vec<f64>,
    c_p: Vec<C64>,
    cap_p: f64,
    dp: f64,
}

impl MomentumAmplitude {
    /// Accepts samples on a uniform grid with `Σ |C_p|² Δp = 1` to 1e-10.
    pub fn new(p_values: Vec<f64>, c_p: Vec<C64>, cap_p: f64) -> Result<Self> {
        if p_values.len() < 2 || p_values.len() != c_p.len() {
            return Err(domain("momentum amplitude needs matching p and C_p samples (>= 2)"));
        }
        let dp = p_values[1] - p_values[0];
        let uniform = p_values
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dp).abs() <= 1e-9 * dp.abs());
        if !(dp > 0.0 && uniform) {
            return Err(domain("momentum samples must be uniform and increasing"));
        }
        let norm: f64 = c_p.iter().map(|c| c.norm_sqr()).sum::<f64>() * dp;
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(domain(format!("momentum amplitude is not normalized: sum |C_p|^2 dp = {norm}")));
        }
        Ok(Self {
            p_values,
            c_p,
            cap_p,
            dp,
        })
    }

    /// Samples a Gaussian packet's `C_p` on `n` points over `±half_span_sigmas` momentum widths.
    pub fn sample(packet: &GaussianPacket, n: usize, half_span_sigmas: f64, cap_p: f64) -> Result<Self> {
        let sigma_p = 1.0 / (2.0 * packet.width);
        let half = half_span_sigmas * sigma_p;
        if n < 2 {
            return Err(domain("momentum grid needs at least two points"));
        }
        let dp = 2.0 * half / (n - 1) as f64;
        let p_values: Vec<f64> = (0..n).map(|i| -half + i as f64 * dp).collect();
        let c_p = p_values.iter().map(|&p| packet.c_p(p)).collect();
        Self::new(p_values, c_p, cap_p)
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn c_p(&self) -> &[C64] {
        &self.c_p
    }

    pub fn cap_p(&self) -> f64 {
        self.cap_p
    }
}

impl FreeWave for MomentumAmplitude {
    fn psi(&self, x: f64, t: f64, mu: f64) -> C64 {
        let sum: C64 = self
            .p_values
            .iter()
            .zip(&self.c_p)
            .map(|(&p, &c)| c * C64::from_polar(1.0, p * x - p * p * t / (2.0 * mu)))
            .sum();
        sum * self.dp / (2.0 * PI).sqrt()
    }
}

/// Initial relative-coordinate states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// `(G+ + G-) / norm`, packets at `∓a`.
    Superposition { a: f64, d: f64 },
    /// One packet of width `d` at `center`.
    Single { center: f64, d: f64 },
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Scenario::Superposition { a, d } => GaussianPacket::new(a, d).map(|_| ()),
            Scenario::Single { center, d } => GaussianPacket::new(center, d).map(|_| ()),
        }
    }

    pub fn width(&self) -> f64 {
        match *self {
            Scenario::Superposition { d, .. } | Scenario::Single { d, .. } => d,
        }
    }

    /// Largest distance of a packet centre from the origin.
    pub fn reach(&self) -> f64 {
        match *self {
            Scenario::Superposition { a, .. } => a.abs(),
            Scenario::Single { center, .. } => center.abs(),
        }
    }

    /// Width `σ(t)` of each constituent packet.
    pub fn sigma(&self, t: f64, mu: f64) -> f64 {
        GaussianPacket {
            center: 0.0,
            width: self.width(),
        }
        .sigma(t, mu)
    }
}

impl FreeWave for Scenario {
    fn psi(&self, x: f64, t: f64, mu: f64) -> C64 {
        match *self {
            Scenario::Superposition { a, d } => {
                let overlap = (-a * a / (2.0 * d * d)).exp();
                let norm = (2.0 * (1.0 + overlap)).sqrt();
                let plus = GaussianPacket { center: -a, width: d };
                let minus = GaussianPacket { center: a, width: d };
                (plus.psi(x, t, mu) + minus.psi(x, t, mu)) / norm
            }
            Scenario::Single { center, d } => GaussianPacket { center, width: d }.psi(x, t, mu),
        }
    }
}
