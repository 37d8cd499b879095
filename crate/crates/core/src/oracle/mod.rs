//! Brute-force checks that do not share code paths with the closed forms.

mod bath;
mod quadrature;
mod rate;

pub use bath::{
    integrate_amplitudes, Layout, OdeRun, Trajectory, TrajectorySample, MAX_STEPS,
    MIN_HALF_WIDTH_GAMMA,
};
pub use quadrature::{density_quadrature, RecoilOffset, MIN_ANGLE_NODES};
pub use rate::{ww_rate_check, RateCheck, MIN_RATE_HALF_WIDTH_GAMMA, UNDERESTIMATE_FRACTION};
