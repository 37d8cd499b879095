//! The three subcommands. Each returns the lines it wants printed; files
//! are written only after every check that can fail without I/O passed.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use recoil_core::amplitudes::AmplitudeModel;
use recoil_core::density::{
    coherence_length, decoherence_factor, reduced_density, CoherenceStatus, DensityGrid, Validity,
};
use recoil_core::oracle::{density_quadrature, integrate_amplitudes, ww_rate_check, OdeRun, RecoilOffset};
use recoil_core::C64;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::SimError;
use crate::output::{ensure_dir, write_csv, write_json};

pub const FACTOR_FILE: &str = "decoherence_factor.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FACTOR_HEADER: [&str; 2] = ["dx_over_lambda", "F"];
pub const RHO_HEADER: [&str; 5] = ["x", "x_prime", "re_rho", "im_rho", "abs_rho"];
pub const AMPLITUDE_HEADER: [&str; 7] = ["t", "re_a", "im_a", "norm", "pop_a", "pop_b", "pop_d"];
pub const QUADRATURE_HEADER: [&str; 7] =
    ["x", "x_prime", "re_rho", "im_rho", "re_quadrature", "im_quadrature", "abs_diff"];
pub const RATE_HEADER: [&str; 6] = ["half_width_gamma", "modes", "rate", "expected", "relative_error", "bandwidth_ok"];

/// Relative tolerance of the bath against the golden rule and the closed forms.
pub const AMPLITUDE_TOLERANCE: f64 = 0.05;
/// Bath samples must stay below this fraction of the recurrence time.
pub const RECURRENCE_FRACTION: f64 = 0.8;
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
pub const OFFSET_FRACTION: f64 = 0.01;
pub const OFFSET_TOLERANCE: f64 = 0.02;
pub const RATE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EmissionChoice {
    On,
    Off,
    Both,
}

impl EmissionChoice {
    fn flags(self) -> &'static [bool] {
        match self {
            EmissionChoice::On => &[true],
            EmissionChoice::Off => &[false],
            EmissionChoice::Both => &[true, false],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleKind {
    Amplitudes,
    Quadrature,
    Rate,
}

/// `F` on the half-open range `[0, max)` in `points` equal steps.
pub fn factor_table(cfg: &RunConfig) -> Result<Vec<[f64; 2]>, SimError> {
    let params = cfg.params.build()?;
    let lambda = params.lambda();
    let step = cfg.factor.max_dx_over_lambda / cfg.factor.points as f64;
    Ok((0..cfg.factor.points)
        .map(|i| {
            let r = step * i as f64;
            [r, decoherence_factor(r * lambda, 0.0, &params)]
        })
        .collect())
}

pub fn run_decoherence_factor(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, SimError> {
    let table = factor_table(cfg)?;
    let path = ensure_dir(out)?.join(FACTOR_FILE);
    write_csv(&path, &FACTOR_HEADER, &table)?;
    Ok(vec![format!("wrote {} rows to {}", table.len(), path.display())])
}

pub fn rho_file_name(t_gamma: f64, emission: bool) -> String {
    format!("rho_gt{t_gamma}_{}.csv", if emission { "emission" } else { "free" })
}

/// Density grids for every configured time and emission flag, in that order.
pub fn evolve_grids(cfg: &RunConfig, emission: EmissionChoice) -> Result<Vec<DensityGrid>, SimError> {
    cfg.validate()?;
    let params = cfg.params.build()?;
    let scenario = cfg.scenario.build(&params)?;
    let runs: Vec<(f64, bool)> = cfg
        .times
        .iter()
        .flat_map(|&tg| emission.flags().iter().map(move |&e| (tg / params.gamma(), e)))
        .collect();
    // every gate before any work
    for &(t, e) in &runs {
        recoil_core::density::validity(t, e, &params)?;
    }
    let Some(t_max) = cfg.times.last().map(|tg| tg / params.gamma()) else {
        return Ok(Vec::new());
    };
    let grid = cfg.grid.build(&scenario, t_max, &params)?;
    runs.par_iter()
        .map(|&(t, e)| reduced_density(&grid, t, &scenario, e, &params).map_err(SimError::from))
        .collect()
}

fn status_name(s: CoherenceStatus) -> &'static str {
    match s {
        CoherenceStatus::Resolved => "resolved",
        CoherenceStatus::NotReached => "not_reached",
        CoherenceStatus::TooCoarse => "too_coarse",
    }
}

pub fn run_evolve(cfg: &RunConfig, out: &Path, emission: EmissionChoice) -> Result<Vec<String>, SimError> {
    let grids = evolve_grids(cfg, emission)?;
    let gamma = cfg.params.build()?.gamma();
    let dir = ensure_dir(out)?;
    let mut runs = Vec::with_capacity(grids.len());
    let mut lines = Vec::new();
    for dg in &grids {
        let t_gamma = cfg.times[runs.len() / emission.flags().len()];
        let name = rho_file_name(t_gamma, dg.emission);
        let n = dg.len();
        let x = dg.x();
        let rows = (0..n * n).map(|k| {
            let (i, j) = (k / n, k % n);
            let r = dg.at(i, j);
            [x[i], x[j], r.re, r.im, r.norm()]
        });
        write_csv(&dir.join(&name), &RHO_HEADER, rows)?;
        let coh = coherence_length(dg);
        lines.push(format!(
            "Γt = {t_gamma}, emission {}: trace {:.6}, purity {:.6}, coherence {:.6} λ ({})",
            if dg.emission { "on" } else { "off" },
            dg.trace(),
            dg.purity(),
            coh.length / dg.lambda,
            status_name(coh.status)
        ));
        runs.push(json!({
            "t_gamma": t_gamma,
            "t": dg.t,
            "emission": dg.emission,
            "validity": match dg.validity { Validity::Valid => "valid", Validity::Marginal => "marginal" },
            "file": name,
            "trace": dg.trace(),
            "purity": dg.purity(),
            "diagonal_width": dg.diagonal_width(),
            "coherence_length": coh.length,
            "coherence_length_over_lambda": coh.length / dg.lambda,
            "coherence_status": status_name(coh.status),
            "norm_factor": dg.norm_factor,
        }));
    }
    let grid = grids.first().map(|dg| {
        json!({"points": dg.len(), "spacing": dg.spacing(), "x_min": dg.x()[0], "x_max": dg.x()[dg.len() - 1]})
    });
    let summary = json!({
        "generated": generated(),
        "gamma": gamma,
        "params": cfg.params,
        "scenario": cfg.scenario,
        "grid": grid,
        "runs": runs,
    });
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    lines.push(format!("wrote {} density files and {SUMMARY_FILE} to {}", grids.len(), dir.display()));
    Ok(lines)
}

/// Provenance stamp; the only field that differs between identical runs.
fn generated() -> serde_json::Value {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({"unix_time": secs, "tool": concat!("recoil-sim ", env!("CARGO_PKG_VERSION"))})
}

/// One metric of an oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
}

impl Metric {
    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }

    fn line(&self) -> String {
        let verdict = if self.passed() { "ok" } else { "BREACH" };
        format!("{}: {:.3e} (limit {:.1e}) {verdict}", self.name, self.value, self.limit)
    }
}

fn rel_l2(pairs: impl Iterator<Item = (C64, C64)>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (got, want) in pairs {
        num += (got - want).norm_sqr();
        den += want.norm_sqr();
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Bath integration against the golden rule and the closed forms.
pub fn amplitude_oracle(cfg: &RunConfig) -> Result<(Vec<Metric>, Vec<[f64; 7]>), SimError> {
    let o = &cfg.oracle;
    let params = o.params.build()?;
    let grid = cfg.modes.build(&params)?;
    let central = grid.central_modes(o.central_modes.min(grid.len()));
    let pairs: Vec<(usize, usize)> = central.iter().flat_map(|&i| central.iter().map(move |&j| (i, j))).collect();
    let last = (o.samples - 1) as f64;
    let run = OdeRun {
        grid: grid.clone(),
        p: 0.0,
        cap_p: 0.0,
        c_p: C64::new(1.0, 0.0),
        samples: (0..o.samples).map(|i| o.t_max_gamma * i as f64 / last / params.gamma()).collect(),
        tol: o.tol,
        keep_cross_term: true,
        record_pairs: pairs.clone(),
    };
    let traj = integrate_amplitudes(&run, &params)?;
    let model = AmplitudeModel::new(params, *grid.coupling(), 0.0, 0.0, run.c_p);
    let modes = grid.modes();

    let mut decay: f64 = 0.0;
    for s in &traj.samples {
        let expect = (-2.0 * params.gamma() * s.t).exp();
        decay = decay.max((s.a.norm_sqr() / expect - 1.0).abs());
    }
    let (mut a, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for s in &traj.samples {
        a.push((s.a, model.a(s.t)?));
        for (&m, &v) in modes.iter().zip(&s.b) {
            b.push((v, model.b(m, s.t)?));
        }
        for (&(i, j), &v) in pairs.iter().zip(&s.d_pairs) {
            d.push((v, model.d(modes[i], modes[j], s.t)?));
        }
    }
    let closed = [a, b, d].map(|v| rel_l2(v.into_iter()));
    let t_end = traj.samples.last().map_or(0.0, |s| s.t);
    let metrics = vec![
        Metric { name: "norm_drift", value: traj.norm_drift, limit: 10.0 * o.tol },
        Metric {
            name: "last_sample_over_recurrence",
            value: t_end / traj.recurrence_time,
            limit: RECURRENCE_FRACTION,
        },
        Metric { name: "decay_relative_error", value: decay, limit: AMPLITUDE_TOLERANCE },
        Metric { name: "closed_form_a_rel_l2", value: closed[0], limit: AMPLITUDE_TOLERANCE },
        Metric { name: "closed_form_b_rel_l2", value: closed[1], limit: AMPLITUDE_TOLERANCE },
        Metric { name: "closed_form_d_rel_l2", value: closed[2], limit: AMPLITUDE_TOLERANCE },
    ];
    let rows = traj
        .samples
        .iter()
        .map(|s| {
            let pop = &s.populations;
            [s.t, s.a.re, s.a.im, s.norm(), pop.a, pop.b, pop.d]
        })
        .collect();
    Ok((metrics, rows))
}

/// Factorized density against brute-force angular quadrature on a subgrid.
pub fn quadrature_oracle(cfg: &RunConfig) -> Result<(Vec<Metric>, Vec<[f64; 7]>), SimError> {
    let o = &cfg.oracle;
    let params = cfg.params.build()?;
    let scenario = cfg.scenario.build(&params)?;
    let t = o.quadrature_t_gamma / params.gamma();
    let grid = cfg.grid.build(&scenario, t, &params)?;
    let dg = reduced_density(&grid, t, &scenario, true, &params)?;
    let n = grid.len();
    let m = o.subgrid.min(n);
    // central half of the grid, where the packet lives
    let idx: Vec<usize> = (0..m).map(|i| n / 4 + i * (n / 2) / (m - 1)).collect();
    let pairs: Vec<(usize, usize)> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).collect();
    let offset = RecoilOffset::Fixed(OFFSET_FRACTION * scenario.sigma(t, params.mu()));
    let evals = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, x2) = (grid.x()[i], grid.x()[j]);
            let zero = density_quadrature(x, x2, t, &scenario, &params, o.n_phi, RecoilOffset::Zero)?;
            let shifted = density_quadrature(x, x2, t, &scenario, &params, o.n_phi, offset)?;
            Ok((zero * dg.norm_factor, shifted * dg.norm_factor))
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let (mut peak, mut diff, mut shift_diff) = (0.0f64, 0.0f64, 0.0f64);
    let mut rows = Vec::with_capacity(pairs.len());
    for (&(i, j), &(zero, shifted)) in pairs.iter().zip(&evals) {
        let rho = dg.at(i, j);
        peak = peak.max(rho.norm());
        diff = diff.max((zero - rho).norm());
        shift_diff = shift_diff.max((shifted - zero).norm());
        rows.push([grid.x()[i], grid.x()[j], rho.re, rho.im, zero.re, zero.im, (zero - rho).norm()]);
    }
    let metrics = vec![
        Metric { name: "zero_offset_max_relative_deviation", value: diff / peak, limit: QUADRATURE_TOLERANCE },
        Metric {
            name: "small_offset_max_relative_deviation",
            value: shift_diff / peak,
            limit: OFFSET_TOLERANCE,
        },
    ];
    Ok((metrics, rows))
}

pub fn rate_oracle(cfg: &RunConfig) -> Result<(Vec<Metric>, Vec<[f64; 6]>), SimError> {
    let params = cfg.oracle.params.build()?;
    let grid = cfg.modes.build(&params)?;
    let r = ww_rate_check(&grid, &params);
    let metrics = vec![
        Metric { name: "rate_relative_error", value: r.relative_error, limit: RATE_TOLERANCE },
        Metric {
            name: "rate_underestimate",
            value: if r.underestimate { 1.0 } else { 0.0 },
            limit: 0.0,
        },
        Metric {
            name: "bandwidth_too_narrow",
            value: if r.bandwidth_ok { 0.0 } else { 1.0 },
            limit: 0.0,
        },
    ];
    let row = [
        cfg.modes.half_width_gamma,
        grid.len() as f64,
        r.rate,
        r.expected,
        r.relative_error,
        if r.bandwidth_ok { 1.0 } else { 0.0 },
    ];
    Ok((metrics, vec![row]))
}

pub fn oracle_file_name(kind: OracleKind) -> &'static str {
    match kind {
        OracleKind::Amplitudes => "oracle_amplitudes.csv",
        OracleKind::Quadrature => "oracle_quadrature.csv",
        OracleKind::Rate => "oracle_rate.csv",
    }
}

/// Runs one oracle, writes its table and fails with the breached metrics.
pub fn run_oracle(cfg: &RunConfig, out: &Path, kind: OracleKind) -> Result<Vec<String>, SimError> {
    cfg.validate()?;
    let path: PathBuf = ensure_dir(out)?.join(oracle_file_name(kind));
    let metrics = match kind {
        OracleKind::Amplitudes => {
            let (m, rows) = amplitude_oracle(cfg)?;
            write_csv(&path, &AMPLITUDE_HEADER, rows)?;
            m
        }
        OracleKind::Quadrature => {
            let (m, rows) = quadrature_oracle(cfg)?;
            write_csv(&path, &QUADRATURE_HEADER, rows)?;
            m
        }
        OracleKind::Rate => {
            let (m, rows) = rate_oracle(cfg)?;
            write_csv(&path, &RATE_HEADER, rows)?;
            m
        }
    };
    let failed: Vec<&str> = metrics.iter().filter(|m| !m.passed()).map(|m| m.name).collect();
    if !failed.is_empty() {
        for m in &metrics {
            eprintln!("{}", m.line());
        }
        return Err(SimError::Breach(failed.join(", ")));
    }
    let mut lines: Vec<String> = metrics.iter().map(Metric::line).collect();
    lines.push(format!("wrote {}", path.display()));
    Ok(lines)
}
