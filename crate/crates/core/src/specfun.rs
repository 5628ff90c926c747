//! Scalar special functions used by the closed-form first-passage results.
//!
//! Everything here is real-argument double precision: the exponential
//! integral `E₁`, the entire function `Ein`, `erf`/`erfc`/`erfcx`, Dawson's
//! integral and the imaginary error function `erfi`.
//!
//! Several closed forms multiply an exponentially small factor such as
//! `e^{-1/z}` by an exponentially large one. The scaled entry points
//! ([`exp_integral_e1_scaled`], [`erfcx`], [`dawson`]) exist so that callers
//! can cancel those exponentials analytically instead of numerically.

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_TERMS: usize = 10_000;
const TINY: f64 = 1e-300;

/// Largest argument for which `erfi` is representable (`x²` below ln f64::MAX minus margin).
pub const ERFI_MAX_ARG: f64 = 26.6;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function}: argument {x} is outside the supported domain")]
    Domain { function: &'static str, x: f64 },
    #[error("invalid accuracy spec: rel_tol={rel_tol}, abs_tol={abs_tol}")]
    InvalidAccuracy { rel_tol: f64, abs_tol: f64 },
}

/// Stopping rule for the series and continued fractions below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
        }
    }
}

impl AccuracySpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self, SpecfunError> {
        if !(rel_tol > 0.0) || !(abs_tol >= 0.0) {
            return Err(SpecfunError::InvalidAccuracy { rel_tol, abs_tol });
        }
        Ok(Self { rel_tol, abs_tol })
    }

    #[inline]
    fn converged(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.rel_tol * sum.abs() + self.abs_tol
    }
}

/// Exponential integral `E₁(x) = ∫ₓ^∞ e^{-t}/t dt` for `x ≥ 0`.
///
/// `E₁(0)` is `+∞`; large arguments underflow to zero.
pub fn exp_integral_e1(x: f64) -> Result<f64, SpecfunError> {
    exp_integral_e1_with(x, &AccuracySpec::default())
}

pub fn exp_integral_e1_with(x: f64, acc: &AccuracySpec) -> Result<f64, SpecfunError> {
    if x.is_nan() || x < 0.0 {
        return Err(SpecfunError::Domain {
            function: "exp_integral_e1",
            x,
        });
    }
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 1.0 {
        Ok(-EULER_GAMMA - x.ln() + ein_series(x, acc))
    } else {
        Ok(e1_continued_fraction(x, acc) * (-x).exp())
    }
}

/// `eˣ·E₁(x)` for `x > 0`; behaves like `1/x` for large `x` and `-ln x` near zero.
pub fn exp_integral_e1_scaled(x: f64) -> Result<f64, SpecfunError> {
    if x.is_nan() || x < 0.0 {
        return Err(SpecfunError::Domain {
            function: "exp_integral_e1_scaled",
            x,
        });
    }
    let acc = AccuracySpec::default();
    if x == 0.0 {
        Ok(f64::INFINITY)
    } else if x.is_infinite() {
        Ok(0.0)
    } else if x <= 1.0 {
        Ok(x.exp() * (-EULER_GAMMA - x.ln() + ein_series(x, &acc)))
    } else {
        Ok(e1_continued_fraction(x, &acc))
    }
}

/// The entire function `Ein(x) = Σ_{k≥1} (-1)^{k+1} xᵏ/(k·k!) = E₁(x) + γ̄ + ln x`.
///
/// Used where `E₁` diverges logarithmically and the divergence cancels
/// against an explicit `ln`.
pub fn ein(x: f64) -> Result<f64, SpecfunError> {
    if x.is_nan() || x < 0.0 {
        return Err(SpecfunError::Domain { function: "ein", x });
    }
    let acc = AccuracySpec::default();
    if x <= 1.0 {
        Ok(ein_series(x, &acc))
    } else if x.is_infinite() {
        Ok(f64::INFINITY)
    } else {
        Ok(e1_continued_fraction(x, &acc) * (-x).exp() + EULER_GAMMA + x.ln())
    }
}

fn ein_series(x: f64, acc: &AccuracySpec) -> f64 {
    // term_k = (-1)^{k+1} x^k / k!, summand term_k / k
    let mut term = x;
    let mut sum = x;
    for k in 2..MAX_TERMS {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if acc.converged(add, sum) {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the continued fraction for `eˣE₁(x)`, `x > 1`.
fn e1_continued_fraction(x: f64, acc: &AccuracySpec) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= acc.rel_tol {
            break;
        }
    }
    h
}

/// Error function. Odd by construction: negative arguments reuse the positive branch.
pub fn erf(x: f64) -> f64 {
    erf_with(x, &AccuracySpec::default())
}

pub fn erf_with(x: f64, acc: &AccuracySpec) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf_with(-x, acc);
    }
    if x < 2.0 {
        TWO_OVER_SQRT_PI * (-x * x).exp() * erf_scaled_series(x, acc)
    } else if x.is_infinite() {
        1.0
    } else {
        1.0 - (-x * x).exp() * erfcx_continued_fraction(x, acc)
    }
}

/// Complementary error function `1 − erf(x)`.
pub fn erfc(x: f64) -> f64 {
    let acc = AccuracySpec::default();
    if x.is_nan() {
        f64::NAN
    } else if x < 2.0 {
        1.0 - erf_with(x, &acc)
    } else if x.is_infinite() {
        0.0
    } else {
        (-x * x).exp() * erfcx_continued_fraction(x, &acc)
    }
}

/// Scaled complementary error function `e^{x²}·erfc(x)` for `x ≥ 0`.
pub fn erfcx(x: f64) -> Result<f64, SpecfunError> {
    if x.is_nan() || x < 0.0 {
        return Err(SpecfunError::Domain {
            function: "erfcx",
            x,
        });
    }
    let acc = AccuracySpec::default();
    if x < 2.0 {
        Ok((x * x).exp() * (1.0 - erf_with(x, &acc)))
    } else if x.is_infinite() {
        Ok(0.0)
    } else {
        Ok(erfcx_continued_fraction(x, &acc))
    }
}

/// `Σ_{k≥0} 2ᵏ x^{2k+1}/(2k+1)!!`, so that `erf(x) = (2/√π)·e^{-x²}·Σ`.
/// All terms are positive.
fn erf_scaled_series(x: f64, acc: &AccuracySpec) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..MAX_TERMS {
        term *= two_x2 / (2 * k + 1) as f64;
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    sum
}

/// `e^{x²}erfc(x)` from the Laplace continued fraction
/// `1/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`.
fn erfcx_continued_fraction(x: f64, acc: &AccuracySpec) -> f64 {
    let mut h = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..MAX_TERMS {
        let an = 0.5 * n as f64;
        d = x + an * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= acc.rel_tol {
            break;
        }
    }
    1.0 / (h * std::f64::consts::PI.sqrt())
}

/// Imaginary error function `erfi(x) = (2/√π)∫₀ˣ e^{t²} dt` for `x ≥ 0`.
///
/// Returns `+∞` once `e^{x²}` leaves the f64 range ([`ERFI_MAX_ARG`]).
pub fn erfi(x: f64) -> Result<f64, SpecfunError> {
    erfi_with(x, &AccuracySpec::default())
}

pub fn erfi_with(x: f64, acc: &AccuracySpec) -> Result<f64, SpecfunError> {
    if x.is_nan() || x < 0.0 {
        return Err(SpecfunError::Domain {
            function: "erfi",
            x,
        });
    }
    if x > ERFI_MAX_ARG {
        return Ok(f64::INFINITY);
    }
    if x < DAWSON_ASYMPTOTIC_FROM {
        Ok(TWO_OVER_SQRT_PI * erfi_series(x, acc))
    } else {
        Ok(TWO_OVER_SQRT_PI * (x * x).exp() * dawson_asymptotic(x, acc))
    }
}

const DAWSON_ASYMPTOTIC_FROM: f64 = 6.0;

/// `Σ_{k≥0} x^{2k+1}/(k!(2k+1))`; positive terms.
fn erfi_series(x: f64, acc: &AccuracySpec) -> f64 {
    let x2 = x * x;
    let mut power = x; // x^{2k+1}/k!
    let mut sum = x;
    for k in 1..MAX_TERMS {
        power *= x2 / k as f64;
        let add = power / (2 * k + 1) as f64;
        sum += add;
        if acc.converged(add, sum) {
            break;
        }
    }
    sum
}

/// `D(x) ~ 1/(2x) Σ (2k−1)!!/(2x²)ᵏ`, truncated at the smallest term.
fn dawson_asymptotic(x: f64, acc: &AccuracySpec) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let next = term * (2 * k - 1) as f64 * inv;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    sum / (2.0 * x)
}

/// Dawson's integral `D(x) = e^{-x²}∫₀ˣ e^{t²} dt = (√π/2)e^{-x²}erfi(x)`.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -dawson(-x);
    }
    let acc = AccuracySpec::default();
    if x.is_infinite() {
        0.0
    } else if x < DAWSON_ASYMPTOTIC_FROM {
        (-x * x).exp() * erfi_series(x, &acc)
    } else {
        dawson_asymptotic(x, &acc)
    }
}

/// `D(x)/x`, continuous at zero with value 1.
pub fn dawson_over_x(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        dawson(x) / x
    }
}
