//! Reduced density matrix of the relative coordinate.
//!
//! After the photons, the internal states and the centre of mass are traced
//! out, and once `t ≫ 1/Γ`,
//!
//! ```text
//! ρ(x, x', t) = N' ψ(x, t) ψ*(x', t) F(x, x'),   F = J0²(π (x - x') / λ)
//! ```
//!
//! `N'` is fixed by normalizing the trace on the grid. Without emission
//! `F ≡ 1` and the state stays pure.

use alloc::{format, vec::Vec};
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{config, Error, Result};
use crate::model::ModelParams;
use crate::specfun::j0;
use crate::wavepacket::{FreeWave, Scenario};

/// Below this `Γt` the long-time form of `ρ` is refused outright.
pub const VALIDITY_HARD_LIMIT: f64 = 1.0;
/// Below this `Γt` the long-time form is used with a warning.
pub const VALIDITY_WARN_LIMIT: f64 = 5.0;

/// Grid spacing used by [`SpatialGrid::for_scenario`], in wavelengths.
pub const SPACING_PER_WAVELENGTH: f64 = 1.0 / 20.0;
/// Minimum grid reach beyond the packet centres, in packet widths.
pub const EXTENT_PER_WIDTH: f64 = 6.0;
/// Coarsest spacing at which a coherence length is reported, in wavelengths.
pub const COARSEST_COHERENCE_SPACING: f64 = 0.25;

/// `F(x, x') = J0²(π (x - x') / λ)`.
pub fn decoherence_factor(x: f64, x2: f64, params: &ModelParams) -> f64 {
    factor_at(x - x2, params.lambda())
}

fn factor_at(dx: f64, lambda: f64) -> f64 {
    let j = j0(PI * dx / lambda);
    j * j
}

/// Separation at which `F` first drops to `e^{-1}`.
pub fn emission_coherence_length(lambda: f64) -> f64 {
    let target = (-1.0f64).exp();
    // F is monotone from 1 down to its first zero at z = 2.4048...
    let (mut lo, mut hi) = (0.0, 2.404_825_557_695_773);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let j = j0(mid);
        if j * j > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * lambda / PI
}

/// Uniform grid of an odd number of points, symmetric about its centre.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    x: Vec<f64>,
    spacing: f64,
    center: f64,
}

impl SpatialGrid {
    /// `2 half_points + 1` points `center + j·spacing`, `|j| <= half_points`.
    pub fn uniform(center: f64, spacing: f64, half_points: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(config(format!("grid spacing must be > 0, got {spacing}")));
        }
        if !center.is_finite() {
            return Err(config("grid center must be finite"));
        }
        let h = half_points as i64;
        let x = (-h..=h).map(|j| center + j as f64 * spacing).collect();
        Ok(Self { x, spacing, center })
    }

    /// Grid with spacing `λ/20` reaching `6 σ(t_max)` beyond the packets.
    pub fn for_scenario(scenario: &Scenario, t_max: f64, params: &ModelParams) -> Result<Self> {
        scenario.validate()?;
        let spacing = SPACING_PER_WAVELENGTH * params.lambda();
        let reach = scenario.reach() + EXTENT_PER_WIDTH * scenario.sigma(t_max, params.mu());
        let half_points = (reach / spacing).ceil() as usize;
        let center = match *scenario {
            Scenario::Superposition { .. } => 0.0,
            Scenario::Single { center, .. } => center,
        };
        let grid = Self::uniform(center, spacing, half_points)?;
        grid.check_covers(scenario, t_max, params)?;
        Ok(grid)
    }

    /// Fails unless the spacing resolves `F` and the extent holds the packets.
    pub fn check_covers(&self, scenario: &Scenario, t_max: f64, params: &ModelParams) -> Result<()> {
        let max_spacing = SPACING_PER_WAVELENGTH * params.lambda();
        if self.spacing > max_spacing * (1.0 + 1e-12) {
            return Err(config(format!(
                "grid spacing {} exceeds lambda/20 = {max_spacing}",
                self.spacing
            )));
        }
        let sigma = scenario.sigma(t_max, params.mu());
        let offsets: &[f64] = match *scenario {
            Scenario::Superposition { a, .. } => &[-a, a],
            Scenario::Single { center, .. } => &[center, center],
        };
        let (lo, hi) = (self.x[0], self.x[self.x.len() - 1]);
        let need = EXTENT_PER_WIDTH * sigma * (1.0 - 1e-12);
        for &c in offsets {
            if c - lo < need || hi - c < need {
                return Err(config(format!(
                    "grid [{lo}, {hi}] does not reach 6 sigma = {} around the packet at {c}",
                    EXTENT_PER_WIDTH * sigma
                )));
            }
        }
        Ok(())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Distance from the centre to the outermost point.
    pub fn half_extent(&self) -> f64 {
        self.spacing * (self.x.len() / 2) as f64
    }
}

/// How far the long-time form is trusted at the requested time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// `1 <= Γt < 5` with emission on.
    Marginal,
}

/// `ρ(x_i, x_j)` on a spatial grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    x: Vec<f64>,
    spacing: f64,
    rho: Vec<C64>,
    pub t: f64,
    pub emission: bool,
    pub norm_factor: f64,
    pub validity: Validity,
    pub lambda: f64,
}

impl DensityGrid {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn rho(&self) -> &[C64] {
        &self.rho
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.rho[i * self.x.len() + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.at(i, i).re).collect()
    }

    /// `Σ ρ(x_i, x_i) Δx`.
    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum::<f64>() * self.spacing
    }

    /// `Tr ρ² = Σ |ρ_ij|² Δx²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|r| r.norm_sqr()).sum::<f64>() * self.spacing * self.spacing
    }

    pub fn is_hermitian(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (i..n).all(|j| self.at(i, j) == self.at(j, i).conj()))
    }

    /// Standard deviation of the position distribution.
    pub fn diagonal_width(&self) -> f64 {
        let diag = self.diagonal();
        let total: f64 = diag.iter().sum();
        let mean = diag.iter().zip(&self.x).map(|(p, x)| p * x).sum::<f64>() / total;
        let var = diag
            .iter()
            .zip(&self.x)
            .map(|(p, x)| p * (x - mean) * (x - mean))
            .sum::<f64>()
            / total;
        var.sqrt()
    }

    /// `|ρ(x_i, x_j)| / √(ρ(x_i, x_i) ρ(x_j, x_j))`, or `None` where the
    /// diagonal underflows.
    pub fn normalized_coherence(&self, i: usize, j: usize) -> Option<f64> {
        let dd = self.at(i, i).re * self.at(j, j).re;
        if dd < f64::MIN_POSITIVE {
            return None;
        }
        Some(self.at(i, j).norm() / dd.sqrt())
    }

    /// `Σ |ρ(x, x')| Δx²` over pairs with `|x - x'| > half_band`.
    pub fn offdiagonal_mass(&self, half_band: f64) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (self.x[i] - self.x[j]).abs() > half_band {
                    sum += self.at(i, j).norm();
                }
            }
        }
        sum * self.spacing * self.spacing
    }
}

fn check_gate(t: f64, emission: bool, params: &ModelParams) -> Result<Validity> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(config(format!("time must be finite and >= 0, got {t}")));
    }
    if !emission {
        return Ok(Validity::Valid);
    }
    let gt = params.gamma() * t;
    if gt < VALIDITY_HARD_LIMIT {
        return Err(Error::Validity(format!(
            "gamma*t = {gt} < {VALIDITY_HARD_LIMIT}: the emission-on density matrix needs t >> 1/gamma"
        )));
    }
    if gt < VALIDITY_WARN_LIMIT {
        return Ok(Validity::Marginal);
    }
    Ok(Validity::Valid)
}

/// Checks the validity gate of one `(t, emission)` run without building it.
/// Silent; the warning for a marginal run is logged when it is built.
pub fn validity(t: f64, emission: bool, params: &ModelParams) -> Result<Validity> {
    check_gate(t, emission, params)
}

/// `ρ = N' ψ ψ* F` on the grid, trace-normalized.
pub fn reduced_density(
    grid: &SpatialGrid,
    t: f64,
    scenario: &Scenario,
    emission: bool,
    params: &ModelParams,
) -> Result<DensityGrid> {
    scenario.validate()?;
    params.check_scenario_regime()?;
    let validity = check_gate(t, emission, params)?;
    if validity == Validity::Marginal {
        log::warn!(
            "gamma*t = {} is below {VALIDITY_WARN_LIMIT}; long-time form is marginal",
            params.gamma() * t
        );
    }
    let n = grid.len();
    let x = grid.x();
    let h = grid.spacing();
    let lambda = params.lambda();
    let psi: Vec<C64> = x.iter().map(|&xi| scenario.psi(xi, t, params.mu())).collect();
    let norm_factor = 1.0 / (psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * h);
    // F depends on x - x' only, which is a multiple of the spacing
    let factor: Vec<f64> = (0..n)
        .map(|m| if emission { factor_at(m as f64 * h, lambda) } else { 1.0 })
        .collect();
    let mut rho = alloc::vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        rho[i * n + i] = C64::new(norm_factor * psi[i].norm_sqr(), 0.0);
        for j in i + 1..n {
            let v = psi[i] * psi[j].conj() * (norm_factor * factor[j - i]);
            rho[i * n + j] = v;
            rho[j * n + i] = v.conj();
        }
    }
    Ok(DensityGrid {
        x: x.to_vec(),
        spacing: h,
        rho,
        t,
        emission,
        norm_factor,
        validity,
        lambda,
    })
}

/// One density grid per time; every gate is checked before any is built.
pub fn scenario_sweep(
    scenario: &Scenario,
    times: &[f64],
    emission: bool,
    grid: &SpatialGrid,
    params: &ModelParams,
) -> Result<Vec<DensityGrid>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(config("sweep times must be ascending"));
    }
    for &t in times {
        check_gate(t, emission, params)?;
    }
    times
        .iter()
        .map(|&t| reduced_density(grid, t, scenario, emission, params))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceStatus {
    Resolved,
    /// The coherence never fell below `e^{-1}` inside the grid.
    NotReached,
    /// Spacing coarser than `λ/4`.
    TooCoarse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceLength {
    /// Separation; the full grid extent when not resolved.
    pub length: f64,
    pub status: CoherenceStatus,
}

/// Smallest `Δ` with `|ρ(x0 + Δ/2, x0 - Δ/2)| / ρ(x0, x0) < e^{-1}`, `x0`
/// the peak of the position distribution. The crossing is linearly
/// interpolated between grid offsets.
pub fn coherence_length(dg: &DensityGrid) -> CoherenceLength {
    let n = dg.len();
    let extent = if n > 0 { dg.x[n - 1] - dg.x[0] } else { 0.0 };
    let sentinel = |status| CoherenceLength {
        length: extent,
        status,
    };
    if dg.spacing > COARSEST_COHERENCE_SPACING * dg.lambda {
        return sentinel(CoherenceStatus::TooCoarse);
    }
    if n == 0 {
        return sentinel(CoherenceStatus::NotReached);
    }
    let diag = dg.diagonal();
    let mut i0 = 0;
    for (i, &v) in diag.iter().enumerate() {
        if v > diag[i0] {
            i0 = i;
        }
    }
    let reference = diag[i0];
    if reference <= 0.0 {
        return sentinel(CoherenceStatus::NotReached);
    }
    let target = (-1.0f64).exp();
    let mut prev = 1.0;
    for m in 1..=i0.min(n - 1 - i0) {
        let c = dg.at(i0 + m, i0 - m).norm() / reference;
        if c < target {
            let frac = (prev - target) / (prev - c);
            return CoherenceLength {
                length: 2.0 * dg.spacing * ((m - 1) as f64 + frac),
                status: CoherenceStatus::Resolved,
            };
        }
        prev = c;
    }
    sentinel(CoherenceStatus::NotReached)
}
