//! Adaptive explicit Runge-Kutta integration of complex linear systems.
//!
//! Two embedded Dormand-Prince pairs are available: the classic 5(4) pair
//! and the 8(5,3) pair, whose higher order pays off at tight tolerances.
//! Steps are clipped so that every requested sample time is hit exactly;
//! no dense output is involved. Local errors are measured in the root mean
//! square over components of `|err| / (atol + rtol · max(|y|, |y_new|))`.

use alloc::{format, vec, vec::Vec};

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{config, Error, Result};

/// Right-hand side `dy/dt = f(t, y)` of a complex ODE system.
pub trait ComplexOde {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Method {
    DormandPrince5,
    #[default]
    DormandPrince853,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub method: Method,
    /// Accepted plus rejected steps before giving up.
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

enum ErrorWeights {
    Single(&'static [f64]),
    /// Fifth- and third-order estimates blended as in DOP853.
    Blended { e5: &'static [f64], e3: &'static [f64] },
}

struct Tableau {
    c: &'static [f64],
    a: &'static [&'static [f64]],
    b: &'static [f64],
    err: ErrorWeights,
    /// Order of the error estimator.
    err_order: i32,
}

const DP5_C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];
const DP5_A: [&[f64]; 6] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];
const DP5_B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// fifth- minus fourth-order weights; the last one multiplies f(t + h, y_new)
const DP5_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// Hairer's DOP853 coefficients
const DOP853_C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
const DOP853_A: [&[f64]; 12] = [
    &[],
    &[0.05260015195876773],
    &[0.0197250569845379, 0.0591751709536137],
    &[0.02958758547680685, 0.0, 0.08876275643042054],
    &[0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792],
    &[0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242],
    &[0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125],
    &[0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023],
    &[0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996],
    &[0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627],
    &[-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196],
    &[2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636],
];
const DOP853_B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
const DOP853_E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];
const DOP853_E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
const DP5: Tableau = Tableau {
    c: &DP5_C,
    a: &DP5_A,
    b: &DP5_B,
    err: ErrorWeights::Single(&DP5_E),
    err_order: 4,
};

const DOP853: Tableau = Tableau {
    c: &DOP853_C,
    a: &DOP853_A,
    b: &DOP853_B,
    err: ErrorWeights::Blended {
        e5: &DOP853_E5,
        e3: &DOP853_E3,
    },
    err_order: 7,
};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

impl Method {
    fn tableau(self) -> &'static Tableau {
        match self {
            Method::DormandPrince5 => &DP5,
            Method::DormandPrince853 => &DOP853,
        }
    }
}

/// Integrates from `t0` through every time in `samples` (ascending, all
/// `>= t0`), calling `on_sample` with the state at each of them.
pub fn integrate<S, F>(
    system: &S,
    y0: &[C64],
    t0: f64,
    samples: &[f64],
    settings: &Settings,
    mut on_sample: F,
) -> Result<StepStats>
where
    S: ComplexOde,
    F: FnMut(f64, &[C64]),
{
    let n = system.dim();
    if y0.len() != n {
        return Err(config(format!("state has {} components, system expects {n}", y0.len())));
    }
    if samples.windows(2).any(|w| w[1] < w[0]) || samples.first().is_some_and(|&s| s < t0) {
        return Err(config("sample times must be ascending and not before t0"));
    }
    let Some(&t_end) = samples.last() else {
        return Ok(StepStats::default());
    };
    let tab = settings.method.tableau();
    let stages = tab.b.len();
    let exponent = -1.0 / (tab.err_order + 1) as f64;

    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    // k[stages] holds f(t + h, y_new), reused as k[0] of the next step
    let mut k: Vec<Vec<C64>> = (0..=stages).map(|_| vec![C64::new(0.0, 0.0); n]).collect();

    let mut t = t0;
    system.rhs(t, &y, &mut k[0]);
    stats.rhs_evals += 1;

    let span = (t_end - t0).max(f64::MIN_POSITIVE);
    let mut h = initial_step(&y, &k[0], settings).min(span);
    let h_floor = 1e-13 * span.max(t0.abs());

    let mut next = 0;
    while next < samples.len() && samples[next] <= t {
        on_sample(t, &y);
        next += 1;
    }

    while next < samples.len() {
        let target = samples[next];
        if stats.accepted + stats.rejected >= settings.max_steps {
            return Err(Error::Stiffness { t });
        }
        let mut hit = false;
        let mut step = h;
        if t + step >= target {
            step = target - t;
            hit = true;
        }
        if step < h_floor && !hit {
            return Err(Error::Stiffness { t });
        }

        for s in 1..stages {
            combine(&y, tab.a[s], &k, step, &mut tmp);
            system.rhs(t + tab.c[s] * step, &tmp, &mut k[s]);
        }
        combine(&y, tab.b, &k, step, &mut y_new);
        let (head, tail) = k.split_at_mut(stages);
        system.rhs(t + step, &y_new, &mut tail[0]);
        stats.rhs_evals += stages;
        let err = error_norm(tab, head, &tail[0], &y, &y_new, step, settings);

        if err <= 1.0 {
            stats.accepted += 1;
            t = if hit { target } else { t + step };
            core::mem::swap(&mut y, &mut y_new);
            k.swap(0, stages);
            while next < samples.len() && samples[next] <= t {
                on_sample(samples[next], &y);
                next += 1;
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(exponent)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            // a step shortened to land on a sample says nothing about h
            if !hit || step >= h {
                h = step * factor;
            }
        } else {
            stats.rejected += 1;
            h = step * (SAFETY * err.powf(exponent)).clamp(MIN_FACTOR, 1.0);
            if h < h_floor {
                return Err(Error::Stiffness { t });
            }
        }
    }
    Ok(stats)
}

/// `out = y + h Σ_j w_j k_j` in one pass over memory, skipping zero weights.
fn combine(y: &[C64], weights: &[f64], k: &[Vec<C64>], h: f64, out: &mut [C64]) {
    let terms: Vec<(f64, &[C64])> = weights
        .iter()
        .zip(k)
        .filter(|(w, _)| **w != 0.0)
        .map(|(w, kj)| (w * h, kj.as_slice()))
        .collect();
    for (i, (o, yi)) in out.iter_mut().zip(y).enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for &(c, kj) in &terms {
            acc += kj[i] * c;
        }
        *o = yi + acc;
    }
}

fn weighted(weights: &[f64], k: &[Vec<C64>], last: &[C64], i: usize) -> C64 {
    let stages = k.len();
    let mut acc = last[i] * weights[stages];
    for (w, kj) in weights[..stages].iter().zip(k) {
        if *w != 0.0 {
            acc += kj[i] * *w;
        }
    }
    acc
}

fn error_norm(
    tab: &Tableau,
    k: &[Vec<C64>],
    last: &[C64],
    y: &[C64],
    y_new: &[C64],
    h: f64,
    settings: &Settings,
) -> f64 {
    let n = y.len();
    let scale = |i: usize| settings.atol + settings.rtol * y[i].norm().max(y_new[i].norm());
    match tab.err {
        ErrorWeights::Single(e) => {
            let sum: f64 = (0..n).map(|i| (weighted(e, k, last, i) / scale(i)).norm_sqr()).sum();
            h * (sum / n as f64).sqrt()
        }
        ErrorWeights::Blended { e5, e3 } => {
            let mut s5 = 0.0;
            let mut s3 = 0.0;
            for i in 0..n {
                let sc = scale(i);
                s5 += (weighted(e5, k, last, i) / sc).norm_sqr();
                s3 += (weighted(e3, k, last, i) / sc).norm_sqr();
            }
            if s5 == 0.0 && s3 == 0.0 {
                return 0.0;
            }
            h * s5 / ((s5 + 0.01 * s3) * n as f64).sqrt()
        }
    }
}

fn initial_step(y: &[C64], f: &[C64], settings: &Settings) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (yi, fi) in y.iter().zip(f) {
        let scale = settings.atol + settings.rtol * yi.norm();
        d0 += (yi.norm() / scale).powi(2);
        d1 += (fi.norm() / scale).powi(2);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}
