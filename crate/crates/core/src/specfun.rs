//! Bessel function of the first kind, order zero.
//!
//! Below `|z| = 12` the power series is summed in double-double arithmetic
//! (the terms reach ~4e3 at `z = 12`, so plain `f64` Horner would lose four
//! digits to cancellation). Above it the Hankel asymptotic expansion is
//! truncated at its smallest term, which is below 1e-12 from `z = 12` on.

use alloc::format;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{domain, Result};

/// `|z|` at which evaluation switches from the series to the asymptotic form.
pub const CROSSOVER: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PowerSeries,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub argument: f64,
    pub value: f64,
    pub method: Method,
}

/// `J0(z)` for finite `z`.
pub fn bessel_j0(z: f64) -> Result<f64> {
    evaluate_j0(z).map(|e| e.value)
}

/// `J0(z)` together with the method that produced it.
pub fn evaluate_j0(z: f64) -> Result<BesselEval> {
    if !z.is_finite() {
        return Err(domain(format!("J0 needs a finite argument, got {z}")));
    }
    let x = z.abs();
    let (value, method) = if x < CROSSOVER {
        (j0_series(x), Method::PowerSeries)
    } else {
        (j0_asymptotic(x), Method::Asymptotic)
    };
    Ok(BesselEval {
        argument: z,
        value,
        method,
    })
}

/// Unchecked `J0`; non-finite input gives NaN.
pub fn j0(z: f64) -> f64 {
    if !z.is_finite() {
        return f64::NAN;
    }
    let x = z.abs();
    if x < CROSSOVER {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

/// `(1/2π) ∫₀^{2π} cos(a sin θ) dθ` by the `n`-point periodic trapezoid rule,
/// which converges spectrally to `J0(a)`.
pub fn j0_quadrature_oracle(a: f64, n: usize) -> Result<f64> {
    if n < 64 {
        return Err(domain(format!("quadrature oracle needs n >= 64 panels, got {n}")));
    }
    if !a.is_finite() {
        return Err(domain(format!("quadrature oracle needs a finite argument, got {a}")));
    }
    let h = 2.0 * PI / n as f64;
    let sum: f64 = (0..n).map(|j| (a * (h * j as f64).sin()).cos()).sum();
    Ok(sum / n as f64)
}

/// Nested Horner form `1 - q/1²(1 - q/2²(1 - …))` with `q = x²/4`.
pub(crate) fn j0_series(x: f64) -> f64 {
    let q = Dd::two_prod(x, x).scale(0.25);
    let terms = 10 + (2.5 * x) as usize;
    let mut s = Dd::from(1.0);
    for k in (1..=terms).rev() {
        let kk = (k * k) as f64;
        s = Dd::one_minus(s.mul(q).div_f64(kk));
    }
    s.hi + s.lo
}

pub(crate) fn j0_asymptotic(x: f64) -> f64 {
    // a_k = Π_{j<=k} (-(2j-1)²) / (k! 8^k); P collects even k, Q odd k.
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut term_prev = f64::INFINITY;
    let mut inv_pow = 1.0;
    for k in 0..80usize {
        let term = a * inv_pow;
        if term.abs() > term_prev {
            break;
        }
        term_prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        let next = (k + 1) as f64;
        a *= -(2.0 * next - 1.0) * (2.0 * next - 1.0) / (8.0 * next);
        inv_pow /= x;
    }
    let (s, c) = x.sin_cos();
    // cos(x - π/4) and sin(x - π/4) without forming x - π/4
    let cos_chi = (c + s) * core::f64::consts::FRAC_1_SQRT_2;
    let sin_chi = (s - c) * core::f64::consts::FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Dd {
    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn split(a: f64) -> (f64, f64) {
        let t = 134_217_729.0 * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let (ah, al) = Self::split(a);
        let (bh, bl) = Self::split(b);
        Dd {
            hi: p,
            lo: ((ah * bh - p) + ah * bl + al * bh) + al * bl,
        }
    }

    /// Exact for powers of two.
    fn scale(self, f: f64) -> Dd {
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = Self::two_prod(q1, d);
        let s = Self::two_sum(self.hi, -p.hi);
        let rem = s.hi + ((s.lo - p.lo) + self.lo);
        Self::quick_two_sum(q1, rem / d)
    }

    fn one_minus(t: Dd) -> Dd {
        let s = Self::two_sum(1.0, -t.hi);
        Self::quick_two_sum(s.hi, s.lo - t.lo)
    }
}
