//! Direct integration of the amplitude equations on a discrete mode grid.
//!
//! In the frame rotating at `ω0`:
//!
//! ```text
//! dA/dt    = -i(ω_A - ω0) A - 2i Σ_k g_k B_k
//! dB_k/dt  = -i(ω_B(k) - ω0) B_k - i g_k A - i Σ_k' g_k' D_kk'
//! dD_kk'/dt = -i(ω_D(k,k') - ω0) D_kk' - i (g_k' B_k + g_k B_k')
//! ```
//!
//! which conserve `|A|² + 2Σ|B|² + Σ|D|²`. Dropping the cross term means
//! `B_k` only hears back from the part of `D_kk'` it sourced itself.

use alloc::{format, vec, vec::Vec};

use num_complex::Complex64 as C64;

use crate::amplitudes::SectorPopulations;
use crate::error::{config, Error, Result};
use crate::model::{omega_a, omega_b, omega_d, ModelParams};
use crate::modes::ModeGrid;
use crate::ode::{integrate, ComplexOde, Method, Settings, StepStats};

/// Smallest half-width of the mode band, in units of `Γ/c`.
pub const MIN_HALF_WIDTH_GAMMA: f64 = 10.0;
/// Step budget per run.
pub const MAX_STEPS: usize = 2_000_000;

/// Inputs of one brute-force integration.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeRun {
    pub grid: ModeGrid,
    pub p: f64,
    pub cap_p: f64,
    pub c_p: C64,
    /// Sample times, ascending, starting at or after 0.
    pub samples: Vec<f64>,
    /// Relative tolerance of the integrator, in `[1e-12, 1e-6]`.
    pub tol: f64,
    pub keep_cross_term: bool,
    /// Ordered mode pairs whose `D` is recorded at each sample.
    pub record_pairs: Vec<(usize, usize)>,
}

/// How the two-photon amplitudes are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `ω_D` symmetric under mode swap: only `k <= k'` is kept.
    Symmetric,
    /// All ordered pairs; `B` couples to the symmetric part of `D`.
    Full,
    /// Cross term dropped: `D = S + X` with `S` sourced by `B_k` and `X` by `B_k'`.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub a: C64,
    pub b: Vec<C64>,
    /// `D` at [`OdeRun::record_pairs`].
    pub d_pairs: Vec<C64>,
    pub populations: SectorPopulations,
}

impl TrajectorySample {
    pub fn norm(&self) -> f64 {
        self.populations.total()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub layout: Layout,
    pub recurrence_time: f64,
    pub stats: StepStats,
    /// Largest `|N(t) - N(0)|` over the samples.
    pub norm_drift: f64,
}

struct Bath {
    n: usize,
    layout: Layout,
    g: Vec<f64>,
    det_a: f64,
    det_b: Vec<f64>,
    /// Symmetric: packed upper triangle. Full and Split: row-major `n × n`.
    det_d: Vec<f64>,
}

impl Bath {
    fn d_len(&self) -> usize {
        match self.layout {
            Layout::Symmetric => self.n * (self.n + 1) / 2,
            Layout::Full => self.n * self.n,
            Layout::Split => 2 * self.n * self.n,
        }
    }

    fn tri(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    fn d_at(&self, d: &[C64], i: usize, j: usize) -> C64 {
        let n = self.n;
        match self.layout {
            Layout::Symmetric => d[self.tri(i, j)],
            Layout::Full => d[i * n + j],
            Layout::Split => d[i * n + j] + d[n * n + i * n + j],
        }
    }

    fn populations(&self, y: &[C64]) -> SectorPopulations {
        let n = self.n;
        let a = y[0].norm_sqr();
        let b = 2.0 * y[1..=n].iter().map(|v| v.norm_sqr()).sum::<f64>();
        let d_slice = &y[1 + n..];
        let d = match self.layout {
            Layout::Symmetric => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i..n {
                        let v = d_slice[self.tri(i, j)].norm_sqr();
                        s += if i == j { v } else { 2.0 * v };
                    }
                }
                s
            }
            Layout::Full => d_slice.iter().map(|v| v.norm_sqr()).sum(),
            Layout::Split => (0..n * n)
                .map(|idx| (d_slice[idx] + d_slice[n * n + idx]).norm_sqr())
                .sum(),
        };
        SectorPopulations { a, b, d }
    }
}

fn mul_neg_i(z: C64) -> C64 {
    C64::new(z.im, -z.re)
}

impl ComplexOde for Bath {
    fn dim(&self) -> usize {
        1 + self.n + self.d_len()
    }

    fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        let n = self.n;
        let a = y[0];
        let b = &y[1..=n];
        let d = &y[1 + n..];
        let (dy_head, dd) = dy.split_at_mut(1 + n);

        let mut sum_gb = C64::new(0.0, 0.0);
        for (gk, bk) in self.g.iter().zip(b) {
            sum_gb += bk * gk;
        }
        dy_head[0] = mul_neg_i(a * self.det_a + sum_gb * 2.0);

        // feedback Σ_k' g_k' D_kk' into each B_k
        let mut feed = vec![C64::new(0.0, 0.0); n];
        match self.layout {
            Layout::Symmetric => {
                let mut start = 0;
                for i in 0..n {
                    let len = n - i;
                    let (gi, bi) = (self.g[i], b[i]);
                    let row = &d[start..start + len];
                    let det = &self.det_d[start..start + len];
                    let out = &mut dd[start..start + len];
                    out[0] = mul_neg_i(row[0] * det[0] + bi * (2.0 * gi));
                    let mut acc = row[0] * gi;
                    let tail = row[1..]
                        .iter()
                        .zip(&det[1..])
                        .zip(out[1..].iter_mut())
                        .zip(self.g[i + 1..].iter().zip(&b[i + 1..]))
                        .zip(feed[i + 1..].iter_mut());
                    for ((((&v, &w), o), (&gj, &bj)), f) in tail {
                        acc += v * gj;
                        *f += v * gi;
                        *o = mul_neg_i(v * w + bi * gj + bj * gi);
                    }
                    feed[i] += acc;
                    start += len;
                }
            }
            Layout::Full => {
                for i in 0..n {
                    for j in 0..n {
                        let idx = i * n + j;
                        let v = d[idx];
                        let half = v * (0.5 * self.g[j]);
                        feed[i] += half;
                        feed[j] += v * (0.5 * self.g[i]);
                        dd[idx] = mul_neg_i(v * self.det_d[idx] + b[i] * self.g[j] + b[j] * self.g[i]);
                    }
                }
            }
            Layout::Split => {
                let (ds, dx) = dd.split_at_mut(n * n);
                for i in 0..n {
                    for j in 0..n {
                        let idx = i * n + j;
                        let s = d[idx];
                        let x = d[n * n + idx];
                        feed[i] += s * self.g[j];
                        ds[idx] = mul_neg_i(s * self.det_d[idx] + b[i] * self.g[j]);
                        dx[idx] = mul_neg_i(x * self.det_d[idx] + b[j] * self.g[i]);
                    }
                }
            }
        }
        for k in 0..n {
            dy_head[1 + k] = mul_neg_i(b[k] * self.det_b[k] + a * self.g[k] + feed[k]);
        }
    }
}

fn build(run: &OdeRun, params: &ModelParams) -> Result<Bath> {
    let modes = run.grid.modes();
    let n = modes.len();
    let omega0 = params.omega0();
    let g = run.grid.couplings();
    let det_a = omega_a(run.p, run.cap_p, params) - omega0;
    let det_b: Vec<f64> = modes
        .iter()
        .map(|&m| omega_b(m, run.p, run.cap_p, params) - omega0)
        .collect();
    let mut full = Vec::with_capacity(n * n);
    for &m1 in modes {
        for &m2 in modes {
            full.push(omega_d(m1, m2, run.p, run.cap_p, params) - omega0);
        }
    }
    let symmetric = (0..n).all(|i| {
        (i + 1..n).all(|j| (full[i * n + j] - full[j * n + i]).abs() <= 1e-12 * params.gamma())
    });
    let layout = if !run.keep_cross_term {
        Layout::Split
    } else if symmetric {
        Layout::Symmetric
    } else {
        Layout::Full
    };
    let det_d = if layout == Layout::Symmetric {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                packed.push(full[i * n + j]);
            }
        }
        packed
    } else {
        full
    };
    Ok(Bath {
        n,
        layout,
        g,
        det_a,
        det_b,
        det_d,
    })
}

/// Integrates the three amplitude sectors from `A = C_p`, `B = D = 0`.
///
/// With the cross term kept, a norm drift above `10·tol` is an error.
pub fn integrate_amplitudes(run: &OdeRun, params: &ModelParams) -> Result<Trajectory> {
    if run.grid.is_empty() {
        return Err(config("mode grid is empty"));
    }
    if !(1e-12..=1e-6).contains(&run.tol) {
        return Err(config(format!("tolerance {} outside [1e-12, 1e-6]", run.tol)));
    }
    let min_half = MIN_HALF_WIDTH_GAMMA * params.gamma() / crate::model::C;
    if run.grid.half_width() < min_half * (1.0 - 1e-12) {
        return Err(config(format!(
            "mode band half-width {} is below 10 gamma/c = {min_half}",
            run.grid.half_width()
        )));
    }
    let n = run.grid.len();
    if let Some(&(i, j)) = run.record_pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(config(format!("recorded pair ({i}, {j}) outside the {n}-mode grid")));
    }
    let bath = build(run, params)?;
    let mut y0 = vec![C64::new(0.0, 0.0); bath.dim()];
    y0[0] = run.c_p;
    let settings = Settings {
        rtol: run.tol,
        atol: run.tol * 1e-3 * run.c_p.norm().max(f64::MIN_POSITIVE),
        method: Method::DormandPrince853,
        max_steps: MAX_STEPS,
    };
    let mut samples = Vec::with_capacity(run.samples.len());
    let stats = integrate(&bath, &y0, 0.0, &run.samples, &settings, |t, y| {
        let d = &y[1 + n..];
        samples.push(TrajectorySample {
            t,
            a: y[0],
            b: y[1..=n].to_vec(),
            d_pairs: run.record_pairs.iter().map(|&(i, j)| bath.d_at(d, i, j)).collect(),
            populations: bath.populations(y),
        });
    })?;
    let n0 = run.c_p.norm_sqr();
    let norm_drift = samples.iter().map(|s| (s.norm() - n0).abs()).fold(0.0, f64::max);
    if run.keep_cross_term && norm_drift > 10.0 * run.tol * n0.max(f64::MIN_POSITIVE) {
        return Err(Error::NormDrift {
            drift: norm_drift,
            limit: 10.0 * run.tol,
        });
    }
    Ok(Trajectory {
        samples,
        layout: bath.layout,
        recurrence_time: run.grid.recurrence_time(),
        stats,
        norm_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::AmplitudeModel;

    fn small_run(params: &ModelParams, n_k: usize, phis: &[f64], keep: bool) -> OdeRun {
        let grid = ModeGrid::uniform(params, n_k, 20.0, phis).unwrap();
        let t_end = 3.0 / params.gamma();
        OdeRun {
            grid,
            p: 0.0,
            cap_p: 0.0,
            c_p: C64::new(1.0, 0.0),
            samples: (0..=6).map(|i| t_end * i as f64 / 6.0).collect(),
            tol: 1e-9,
            keep_cross_term: keep,
            record_pairs: vec![(0, 1), (1, 0), (2, 2)],
        }
    }

    #[test]
    fn layouts_are_chosen_from_the_kicks() {
        let params = ModelParams::new(1.0, 1e-3, 1e3).unwrap();
        let run = small_run(&params, 6, &[0.0], true);
        assert_eq!(build(&run, &params).unwrap().layout, Layout::Symmetric);
        let mut run = small_run(&params, 4, &ModeGrid::uniform_angles(3), true);
        run.p = 0.05;
        assert_eq!(build(&run, &params).unwrap().layout, Layout::Full);
        let run = small_run(&params, 6, &[0.0], false);
        assert_eq!(build(&run, &params).unwrap().layout, Layout::Split);
    }

    #[test]
    fn full_and_symmetric_layouts_agree() {
        let params = ModelParams::new(1.0, 1e-3, 1e3).unwrap();
        let run = small_run(&params, 12, &[0.0], true);
        let sym = integrate_amplitudes(&run, &params).unwrap();
        let bath = Bath {
            layout: Layout::Full,
            det_d: {
                let m = run.grid.modes();
                let mut v = Vec::new();
                for &a in m {
                    for &b in m {
                        v.push(omega_d(a, b, 0.0, 0.0, &params) - 1.0);
                    }
                }
                v
            },
            ..build(&run, &params).unwrap()
        };
        let mut y0 = vec![C64::new(0.0, 0.0); bath.dim()];
        y0[0] = C64::new(1.0, 0.0);
        let settings = Settings {
            rtol: 1e-9,
            atol: 1e-12,
            method: Method::DormandPrince5,
            max_steps: MAX_STEPS,
        };
        let mut k = 0;
        integrate(&bath, &y0, 0.0, &run.samples, &settings, |_, y| {
            let s = &sym.samples[k];
            assert!((y[0] - s.a).norm() < 1e-7);
            assert!((bath.populations(y).total() - s.norm()).abs() < 1e-8);
            k += 1;
        })
        .unwrap();
    }

    #[test]
    fn norm_is_conserved_with_kicks() {
        let params = ModelParams::new(1.0, 1e-3, 20.0).unwrap();
        let mut run = small_run(&params, 6, &ModeGrid::uniform_angles(4), true);
        run.p = 0.3;
        run.cap_p = -0.1;
        let traj = integrate_amplitudes(&run, &params).unwrap();
        assert_eq!(traj.layout, Layout::Full);
        assert!(traj.norm_drift <= 10.0 * run.tol, "{}", traj.norm_drift);
    }

    #[test]
    fn uncoupled_bath_only_rotates() {
        let params = ModelParams::new(1.0, 1e-3, 50.0).unwrap();
        let mut run = small_run(&params, 5, &[0.0, 1.0], true);
        run.grid = run.grid.with_coupling(0.0);
        run.p = 0.2;
        run.c_p = C64::new(0.6, -0.8);
        let traj = integrate_amplitudes(&run, &params).unwrap();
        let closed = AmplitudeModel::new(params, *run.grid.coupling(), 0.2, 0.0, run.c_p);
        for s in &traj.samples {
            let expect = run.c_p * C64::from_polar(1.0, -closed.detuning_a() * s.t);
            assert!((s.a - expect).norm() < 1e-8);
            assert!(s.b.iter().all(|b| b.norm() == 0.0));
            assert!(s.d_pairs.iter().all(|d| d.norm() == 0.0));
        }
    }

    #[test]
    fn split_layout_reassembles_d() {
        let params = ModelParams::new(1.0, 1e-3, 1e3).unwrap();
        let run = small_run(&params, 6, &[0.0], false);
        let traj = integrate_amplitudes(&run, &params).unwrap();
        let last = traj.samples.last().unwrap();
        // D stays symmetric when the frequencies are
        assert!((last.d_pairs[0] - last.d_pairs[1]).norm() < 1e-12);
        assert!(last.populations.d > 0.0);
    }

    #[test]
    fn preconditions() {
        let params = ModelParams::new(1.0, 1e-3, 1e3).unwrap();
        let mut run = small_run(&params, 4, &[0.0], true);
        run.tol = 1e-4;
        assert!(integrate_amplitudes(&run, &params).is_err());
        let mut run = small_run(&params, 4, &[0.0], true);
        run.grid = ModeGrid::uniform(&params, 4, 5.0, &[0.0]).unwrap();
        assert!(integrate_amplitudes(&run, &params).is_err());
        let mut run = small_run(&params, 4, &[0.0], true);
        run.record_pairs = vec![(4, 0)];
        assert!(integrate_amplitudes(&run, &params).is_err());
    }
}
