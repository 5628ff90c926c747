//! Multiple-precision reference values for the special functions.
//!
//! The series used here differ from the double-precision implementations:
//! `Ein` through harmonic numbers (positive terms), `erf` through its
//! alternating Maclaurin series, and `erfi`/Dawson through the Kummer
//! function `M(1, 3/2, −x²)`. Working precision grows with the argument so
//! that cancellation never reaches the 53 bits that are compared.

use astro_float::{BigFloat, Consts, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 128;

pub struct Mp {
    cc: Consts,
    gamma: BigFloat,
}

fn to_f64(x: &BigFloat) -> f64 {
    format!("{x}").parse().expect("formatted BigFloat parses as f64")
}

fn small_relative_to(term: &BigFloat, sum: &BigFloat, p: usize) -> bool {
    match (term.exponent(), sum.exponent()) {
        _ if term.is_zero() => true,
        (Some(t), Some(s)) => (t as i64) < s as i64 - p as i64 - 2,
        _ => false,
    }
}

impl Mp {
    /// Computes the Euler–Mascheroni constant as `Ein(X) − ln X` with `E₁(X)` below the working precision.
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("constants cache");
        let p = 1400;
        let big_x = 900.0;
        let x = BigFloat::from_f64(big_x, p);
        let ein = ein_harmonic(&x, p, &mut cc);
        let gamma = ein.sub(&x.ln(p, RM, &mut cc), p, RM);
        Self { cc, gamma }
    }

    pub fn euler_gamma(&self) -> f64 {
        to_f64(&self.gamma)
    }

    pub fn ein(&mut self, x: f64) -> f64 {
        let p = GUARD_BITS;
        to_f64(&ein_harmonic(&BigFloat::from_f64(x, p), p, &mut self.cc))
    }

    /// `E₁(x) = Ein(x) − γ − ln x`, valid for `0 < x ≤ 700`.
    pub fn e1(&mut self, x: f64) -> f64 {
        to_f64(&self.e1_big(x))
    }

    pub fn e1_scaled(&mut self, x: f64) -> f64 {
        let p = self.e1_bits(x);
        let e = self.e1_big(x);
        to_f64(&e.mul(&BigFloat::from_f64(x, p).exp(p, RM, &mut self.cc), p, RM))
    }

    fn e1_bits(&self, x: f64) -> usize {
        GUARD_BITS + (2.0 * x * std::f64::consts::LOG2_E) as usize
    }

    fn e1_big(&mut self, x: f64) -> BigFloat {
        assert!(x > 0.0 && x <= 700.0);
        let p = self.e1_bits(x);
        let xb = BigFloat::from_f64(x, p);
        let ein = ein_harmonic(&xb, p, &mut self.cc);
        ein.sub(&self.gamma, p, RM).sub(&xb.ln(p, RM, &mut self.cc), p, RM)
    }

    /// `(2/√π) Σ (−1)ⁿ x^{2n+1}/(n!(2n+1))`.
    fn erf_big(&mut self, x: f64) -> (BigFloat, usize) {
        let p = GUARD_BITS + (3.0 * x * x * std::f64::consts::LOG2_E) as usize;
        let xb = BigFloat::from_f64(x, p);
        let neg_x2 = xb.mul(&xb, p, RM).neg();
        let mut power = xb.clone();
        let mut sum = xb.clone();
        let mut n = 0u64;
        loop {
            n += 1;
            power = power.mul(&neg_x2, p, RM).div(&BigFloat::from_u64(n, p), p, RM);
            let term = power.div(&BigFloat::from_u64(2 * n + 1, p), p, RM);
            sum = sum.add(&term, p, RM);
            if n as f64 > x * x && small_relative_to(&term, &sum, p) {
                break;
            }
        }
        let two_over_sqrt_pi = BigFloat::from_u64(2, p).div(&self.cc.pi(p, RM).sqrt(p, RM), p, RM);
        (sum.mul(&two_over_sqrt_pi, p, RM), p)
    }

    pub fn erf(&mut self, x: f64) -> f64 {
        to_f64(&self.erf_big(x).0)
    }

    pub fn erfc(&mut self, x: f64) -> f64 {
        let (e, p) = self.erf_big(x);
        to_f64(&BigFloat::from_u64(1, p).sub(&e, p, RM))
    }

    pub fn erfcx(&mut self, x: f64) -> f64 {
        let (e, p) = self.erf_big(x);
        let xb = BigFloat::from_f64(x, p);
        let scale = xb.mul(&xb, p, RM).exp(p, RM, &mut self.cc);
        to_f64(&BigFloat::from_u64(1, p).sub(&e, p, RM).mul(&scale, p, RM))
    }

    /// Dawson's integral `x·M(1, 3/2, −x²)`, returned with its precision.
    fn dawson_big(&mut self, x: f64) -> (BigFloat, usize) {
        let p = GUARD_BITS + (3.0 * x * x * std::f64::consts::LOG2_E) as usize;
        let xb = BigFloat::from_f64(x, p);
        let neg_x2 = xb.mul(&xb, p, RM).neg();
        let mut term = BigFloat::from_u64(1, p);
        let mut sum = term.clone();
        let mut n = 0u64;
        loop {
            // (3/2)_{n+1} = (3/2)_n · (n + 3/2)
            let denom = BigFloat::from_u64(2 * n + 3, p).div(&BigFloat::from_u64(2, p), p, RM);
            term = term.mul(&neg_x2, p, RM).div(&denom, p, RM);
            sum = sum.add(&term, p, RM);
            n += 1;
            if n as f64 > x * x && small_relative_to(&term, &sum, p) {
                break;
            }
        }
        (sum.mul(&xb, p, RM), p)
    }

    pub fn dawson(&mut self, x: f64) -> f64 {
        to_f64(&self.dawson_big(x).0)
    }

    pub fn dawson_over_x(&mut self, x: f64) -> f64 {
        let (d, p) = self.dawson_big(x);
        to_f64(&d.div(&BigFloat::from_f64(x, p), p, RM))
    }

    /// `erfi(x) = (2/√π) e^{x²} D(x)`.
    pub fn erfi(&mut self, x: f64) -> f64 {
        let (d, p) = self.dawson_big(x);
        let xb = BigFloat::from_f64(x, p);
        let scale = xb.mul(&xb, p, RM).exp(p, RM, &mut self.cc);
        let two_over_sqrt_pi = BigFloat::from_u64(2, p).div(&self.cc.pi(p, RM).sqrt(p, RM), p, RM);
        to_f64(&d.mul(&scale, p, RM).mul(&two_over_sqrt_pi, p, RM))
    }
}

/// `Ein(x) = e^{−x} Σ_{n≥1} Hₙ xⁿ/n!`.
fn ein_harmonic(x: &BigFloat, p: usize, cc: &mut Consts) -> BigFloat {
    let xf = to_f64(x);
    let mut power = BigFloat::from_u64(1, p);
    let mut harmonic = BigFloat::from_u64(0, p);
    let mut sum = BigFloat::from_u64(0, p);
    let mut n = 0u64;
    loop {
        n += 1;
        power = power.mul(x, p, RM).div(&BigFloat::from_u64(n, p), p, RM);
        harmonic = harmonic.add(&BigFloat::from_u64(1, p).div(&BigFloat::from_u64(n, p), p, RM), p, RM);
        let term = power.mul(&harmonic, p, RM);
        sum = sum.add(&term, p, RM);
        if n as f64 > xf && small_relative_to(&term, &sum, p) {
            break;
        }
    }
    sum.mul(&x.neg().exp(p, RM, cc), p, RM)
}
