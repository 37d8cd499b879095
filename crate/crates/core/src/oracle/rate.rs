//! Golden-rule decay rate implied by a discrete mode grid.
//!
//! The Lorentzian-weighted sum `Σ g_k² (Γ/2) / ((ω_k - ω0)² + Γ²/4)` tends to
//! `π g² ρ(ω0) = Γ/2` for a dense, wide band. A narrow band cuts off the
//! Lorentzian tails and underestimates the rate.

use crate::model::{ModelParams, C};
use crate::modes::ModeGrid;

/// Below this fraction of `Γ/2` the rate counts as underestimated.
pub const UNDERESTIMATE_FRACTION: f64 = 0.9;
/// Smallest band half-width for a trustworthy rate, in units of `Γ/c`.
pub const MIN_RATE_HALF_WIDTH_GAMMA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCheck {
    /// Implied amplitude decay rate of one excitation.
    pub rate: f64,
    /// `Γ/2`.
    pub expected: f64,
    pub relative_error: f64,
    pub underestimate: bool,
    pub bandwidth_ok: bool,
}

pub fn ww_rate_check(grid: &ModeGrid, params: &ModelParams) -> RateCheck {
    let half = 0.5 * params.gamma();
    let rate: f64 = grid
        .modes()
        .iter()
        .zip(grid.couplings())
        .map(|(m, g)| {
            let det = m.omega() - params.omega0();
            g * g * half / (det * det + half * half)
        })
        .sum();
    RateCheck {
        rate,
        expected: half,
        relative_error: (rate - half).abs() / half,
        underestimate: rate < UNDERESTIMATE_FRACTION * half,
        bandwidth_ok: grid.half_width() >= MIN_RATE_HALF_WIDTH_GAMMA * params.gamma() / C * (1.0 - 1e-12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 1e-4, 1e4).unwrap()
    }

    #[test]
    fn dense_wide_grid() {
        let p = params();
        let grid = ModeGrid::uniform(&p, 2000, 50.0, &[0.0]).unwrap();
        let r = ww_rate_check(&grid, &p);
        assert!(r.relative_error < 0.02, "{r:?}");
        assert!(!r.underestimate && r.bandwidth_ok);
    }

    #[test]
    fn halving_density_halves_rate() {
        let p = params();
        let dense = ModeGrid::uniform(&p, 2000, 50.0, &[0.0]).unwrap();
        let g = dense.coupling().at_resonance;
        let sparse = ModeGrid::uniform(&p, 1000, 50.0, &[0.0]).unwrap().with_coupling(g);
        let ratio = ww_rate_check(&sparse, &p).rate / ww_rate_check(&dense, &p).rate;
        assert!((ratio - 0.5).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn zero_coupling() {
        let p = params();
        let grid = ModeGrid::uniform(&p, 100, 50.0, &[0.0]).unwrap().with_coupling(0.0);
        assert_eq!(ww_rate_check(&grid, &p).rate, 0.0);
    }

    #[test]
    fn narrow_band_is_flagged() {
        let p = params();
        let grid = ModeGrid::uniform(&p, 400, 2.0, &[0.0]).unwrap();
        let r = ww_rate_check(&grid, &p);
        assert!(r.underestimate && !r.bandwidth_ok, "{r:?}");
    }
}
