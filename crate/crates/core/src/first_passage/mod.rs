//! First-passage analytics for the closed population diffusions
//! `dC = −C dt + B(C) dW` on `[0, 1]` (heterodyne and optimal homodyne).
//!
//! Everything is built from the scale density `Q`, its antiderivative `S`,
//! the speed function `K` (with `K′ = −2/(Q B²)`) and `R = ∫ Q K`.
//!
//! Writing `c = 1` (heterodyne) or `c = ½` (homodyne), `S(0, z)` and `K(z)`
//! factor as `e^{−c/z}·Gs(z)` and `e^{c/z}·Ks(z)` with moderate `Gs`, `Ks`.
//! Products and ratios are formed from these factors so that nothing
//! overflows or underflows for small `z`.

mod quadrature;

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use thiserror::Error;

use crate::specfun::{dawson, dawson_over_x, ein, erfcx, exp_integral_e1_scaled, EULER_GAMMA};
use crate::types::DetectionScheme;

pub use quadrature::{integrate, QuadratureResult, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FirstPassageError {
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("arguments out of order: need {0}")]
    Ordering(String),
    #[error("{0} has no closed one-dimensional first-passage analysis")]
    UnsupportedScheme(String),
    #[error("invalid quadrature settings: rel_tol={rel_tol}, max_subdivisions={max_subdivisions}")]
    InvalidQuadrature { rel_tol: f64, max_subdivisions: usize },
    #[error("quadrature on [{a}, {b}] did not converge after {panels} panels (error estimate {abs_error:e})")]
    QuadratureFailed {
        a: f64,
        b: f64,
        panels: usize,
        abs_error: f64,
    },
    #[error("{0} is infinite")]
    Divergent(&'static str),
}

type Result<T> = std::result::Result<T, FirstPassageError>;

/// Detection schemes whose population obeys a closed scalar SDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme1D {
    Heterodyne,
    OptimalHomodyne,
}

impl Scheme1D {
    pub const ALL: [Scheme1D; 2] = [Scheme1D::Heterodyne, Scheme1D::OptimalHomodyne];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme1D::Heterodyne => "heterodyne",
            Scheme1D::OptimalHomodyne => "optimal-homodyne",
        }
    }

    /// `B(z)²`.
    pub fn diffusion_sq(&self, z: f64) -> f64 {
        let k2 = match self {
            Scheme1D::Heterodyne => 2.0,
            Scheme1D::OptimalHomodyne => 4.0,
        };
        k2 * z * z * z * (1.0 - z)
    }

    /// `A(z) = −z`.
    pub fn drift(&self, z: f64) -> f64 {
        -z
    }

    /// Generator `L f = A f′ + ½ B² f″` given the first two derivatives.
    pub fn generator(&self, z: f64, d1: f64, d2: f64) -> f64 {
        self.drift(z) * d1 + 0.5 * self.diffusion_sq(z) * d2
    }

    fn rate(&self) -> f64 {
        match self {
            Scheme1D::Heterodyne => 1.0,
            Scheme1D::OptimalHomodyne => 0.5,
        }
    }
}

impl fmt::Display for Scheme1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<DetectionScheme> for Scheme1D {
    type Error = FirstPassageError;

    fn try_from(s: DetectionScheme) -> Result<Self> {
        match s {
            DetectionScheme::Heterodyne => Ok(Scheme1D::Heterodyne),
            DetectionScheme::OptimalHomodyne => Ok(Scheme1D::OptimalHomodyne),
            other => Err(FirstPassageError::UnsupportedScheme(other.name().to_string())),
        }
    }
}

impl From<Scheme1D> for DetectionScheme {
    fn from(s: Scheme1D) -> Self {
        match s {
            Scheme1D::Heterodyne => DetectionScheme::Heterodyne,
            Scheme1D::OptimalHomodyne => DetectionScheme::OptimalHomodyne,
        }
    }
}

/// A value that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// The value as an `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// `[a, b] ⊂ [0, 1]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval01 {
    pub a: f64,
    pub b: f64,
}

impl Interval01 {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(FirstPassageError::Ordering(format!("0 <= a < b <= 1, got a={a}, b={b}")));
        }
        Ok(Self { a, b })
    }

    fn require_contains(&self, y: f64) -> Result<()> {
        if !(self.a <= y && y <= self.b) {
            return Err(FirstPassageError::Ordering(format!(
                "a <= y <= b, got a={}, y={y}, b={}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

fn check_unit(what: &'static str, z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(FirstPassageError::Domain { what, value: z });
    }
    Ok(())
}

fn check_order(u: f64, v: f64) -> Result<()> {
    check_unit("u", u)?;
    check_unit("v", v)?;
    if u > v {
        return Err(FirstPassageError::Ordering(format!("u <= v, got u={u}, v={v}")));
    }
    Ok(())
}

/// `Gs(z) = e^{c/z} S(0, z)`; `+∞` at `z = 1` for heterodyne.
fn gs(z: f64, scheme: Scheme1D) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    match scheme {
        Scheme1D::Heterodyne => {
            let x = (1.0 - z) / z;
            exp_integral_e1_scaled(x).expect("x >= 0") - z
        }
        Scheme1D::OptimalHomodyne => {
            let x = ((1.0 - z) / (2.0 * z)).sqrt();
            (0.5 * PI).sqrt() * erfcx(x).expect("x >= 0") - (z * (1.0 - z)).sqrt()
        }
    }
}

/// `Ks(z) = e^{−c/z} K(z)`, for `0 < z ≤ 1`.
fn ks(z: f64, scheme: Scheme1D) -> f64 {
    match scheme {
        Scheme1D::Heterodyne => {
            let w = 1.0 / z;
            2.0 - 2.0 * w + w * w
        }
        Scheme1D::OptimalHomodyne => {
            let x = ((1.0 - z) / (2.0 * z)).sqrt();
            -((1.0 - z) / (z * z * z)).sqrt() * (2.0 * z - 1.0) + 2.0 * SQRT_2 * dawson(x)
        }
    }
}

/// `e^{c/r} S(0, z)` for `z ≤ r`; `r = ∞` gives `S(0, z)` itself.
fn g_rel(z: f64, r: f64, scheme: Scheme1D) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let c = scheme.rate();
    (c / r - c / z).exp() * gs(z, scheme)
}

/// `S(0, p)·K(q)` for `0 ≤ p ≤ q ≤ 1`.
fn gk(p: f64, q: f64, scheme: Scheme1D) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let c = scheme.rate();
    (c / q - c / p).exp() * gs(p, scheme) * ks(q, scheme)
}

/// Scale density `Q(z)` for `0 < z < 1`.
pub fn q_weight(z: f64, scheme: Scheme1D) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(FirstPassageError::Domain { what: "z", value: z });
    }
    Ok(match scheme {
        Scheme1D::Heterodyne => (-1.0 / z).exp() * z / (1.0 - z),
        Scheme1D::OptimalHomodyne => (-0.5 / z).exp() * (z / (1.0 - z)).sqrt(),
    })
}

/// `S(u, v) = ∫ᵤᵛ Q`, for `0 ≤ u ≤ v ≤ 1`. Heterodyne `S(u, 1)` is infinite for `u < 1`.
pub fn scale_s(u: f64, v: f64, scheme: Scheme1D) -> Result<Extended> {
    check_order(u, v)?;
    if u == v {
        return Ok(Extended::Finite(0.0));
    }
    if v == 1.0 && scheme == Scheme1D::Heterodyne {
        return Ok(Extended::Infinite);
    }
    Ok(Extended::Finite(s_rel(u, v, f64::INFINITY, scheme)))
}

/// `e^{c/r}·S(u, v)` for `u ≤ v ≤ r`, finite unless heterodyne with `v = 1`.
fn s_rel(u: f64, v: f64, r: f64, scheme: Scheme1D) -> f64 {
    g_rel(v, r, scheme) - g_rel(u, r, scheme)
}

/// Probability that `C` started at `y` reaches `b` before `a`: `S(a, y)/S(a, b)`.
///
/// The endpoints `a = 0` and `b = 1` are allowed; heterodyne with `b = 1`
/// gives 0 for every `y < 1`.
pub fn hit_prob_b_before_a(y: f64, itv: Interval01, scheme: Scheme1D) -> Result<f64> {
    itv.require_contains(y)?;
    if y == itv.b {
        return Ok(1.0);
    }
    if y == itv.a {
        return Ok(0.0);
    }
    if itv.b == 1.0 && scheme == Scheme1D::Heterodyne {
        return Ok(0.0);
    }
    let num = s_rel(itv.a, y, itv.b, scheme);
    let den = s_rel(itv.a, itv.b, itv.b, scheme);
    debug_assert!(den > 0.0);
    Ok((num / den).clamp(0.0, 1.0))
}

/// Probability that `C` started at `y > 0` ever reaches `u`:
/// `S(0, y)/S(0, u)` for `y < u`, and `1` for `y ≥ u`.
pub fn excitation_prob(u: f64, y: f64, scheme: Scheme1D) -> Result<f64> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(FirstPassageError::Domain { what: "u", value: u });
    }
    if !(y > 0.0 && y <= 1.0) {
        return Err(FirstPassageError::Domain { what: "y", value: y });
    }
    hit_prob_b_before_a(y.min(u), Interval01 { a: 0.0, b: u }, scheme)
}

/// Leading behaviour of the heterodyne excitation probability as `u → 1`:
/// `−S(0, y)/((1/e) ln(1 − u))`, for `0.9 < u < 1`.
pub fn excitation_prob_asymptotic_het(u: f64, y: f64) -> Result<f64> {
    if !(u > 0.9 && u < 1.0) {
        return Err(FirstPassageError::Domain { what: "u", value: u });
    }
    if !(y > 0.0 && y <= u) {
        return Err(FirstPassageError::Domain { what: "y", value: y });
    }
    let s0y = g_rel(y, 1.0, Scheme1D::Heterodyne);
    Ok(-s0y / (1.0 - u).ln())
}

/// Speed function `K(z)` for `0 < z ≤ 1`; `K(1) = e` (heterodyne) or `0` (homodyne).
pub fn speed_k(z: f64, scheme: Scheme1D) -> Result<f64> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(FirstPassageError::Domain { what: "z", value: z });
    }
    Ok((scheme.rate() / z).exp() * ks(z, scheme))
}

/// `R(u, v) = ∫ᵤᵛ Q K` with the default quadrature settings.
pub fn r_measure(u: f64, v: f64, scheme: Scheme1D) -> Result<Extended> {
    r_measure_with(u, v, scheme, &QuadratureSpec::default())
}

/// `R(u, v)`; infinite for `u = 0` and, under heterodyne, for `v = 1`.
///
/// Heterodyne uses the closed antiderivative `ln(z/(1−z)) − 2z`. Homodyne
/// uses `ln z − 2z` plus a quadrature of `2 D(x)/x` with `x = √((1−z)/(2z))`,
/// which is bounded on `[0, 1]` (0 at `z = 0`, 2 at `z = 1`).
pub fn r_measure_with(u: f64, v: f64, scheme: Scheme1D, quad: &QuadratureSpec) -> Result<Extended> {
    check_order(u, v)?;
    quad.validate()?;
    if u == v {
        return Ok(Extended::Finite(0.0));
    }
    if u == 0.0 {
        return Ok(Extended::Infinite);
    }
    match scheme {
        Scheme1D::Heterodyne => {
            if v == 1.0 {
                return Ok(Extended::Infinite);
            }
            let h = |z: f64| (z / (1.0 - z)).ln() - 2.0 * z;
            Ok(Extended::Finite(h(v) - h(u)))
        }
        Scheme1D::OptimalHomodyne => {
            let tail = integrate(homodyne_r_integrand, u, v, quad)?.value;
            Ok(Extended::Finite((v / u).ln() - 2.0 * (v - u) + tail))
        }
    }
}

/// The bounded part of the homodyne `Q K`.
pub fn homodyne_r_integrand(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let x = ((1.0 - z) / (2.0 * z)).sqrt();
    2.0 * dawson_over_x(x)
}

fn finite_r(u: f64, v: f64, scheme: Scheme1D, quad: &QuadratureSpec) -> Result<f64> {
    r_measure_with(u, v, scheme, quad)?
        .finite()
        .ok_or(FirstPassageError::Divergent("R"))
}

/// Mean exit time of `(a, b)` from `y`:
/// `[S(y,b) R(a,y) − S(a,y) R(y,b)] / S(a,b)`, for `0 < a ≤ y ≤ b < 1`.
pub fn mean_exit_time(y: f64, itv: Interval01, scheme: Scheme1D) -> Result<f64> {
    mean_exit_time_with(y, itv, scheme, &QuadratureSpec::default())
}

pub fn mean_exit_time_with(y: f64, itv: Interval01, scheme: Scheme1D, quad: &QuadratureSpec) -> Result<f64> {
    itv.require_contains(y)?;
    if itv.a <= 0.0 {
        return Err(FirstPassageError::Domain { what: "a", value: itv.a });
    }
    if itv.b >= 1.0 {
        return Err(FirstPassageError::Domain { what: "b", value: itv.b });
    }
    if y == itv.a || y == itv.b {
        return Ok(0.0);
    }
    let (a, b) = (itv.a, itv.b);
    let s_yb = s_rel(y, b, b, scheme);
    let s_ay = s_rel(a, y, b, scheme);
    let s_ab = s_rel(a, b, b, scheme);
    let r_ay = finite_r(a, y, scheme, quad)?;
    let r_yb = finite_r(y, b, scheme, quad)?;
    Ok(((s_yb * r_ay - s_ay * r_yb) / s_ab).max(0.0))
}

/// Mean time spent above the starting level before absorption:
/// `S(0, y)(K(y) − K(1))`. Zero at `y = 0` and `y = 1`.
pub fn mean_excitation_time(y: f64, scheme: Scheme1D) -> Result<f64> {
    check_unit("y", y)?;
    if y == 0.0 || y == 1.0 {
        return Ok(0.0);
    }
    let value = match scheme {
        // Gs(y)·(Ks(y) − e^{1 − 1/y}), avoiding the ∞·0 of S(0,1)·0 near y = 1.
        Scheme1D::Heterodyne => gs(y, scheme) * (ks(y, scheme) - (1.0 - 1.0 / y).exp()),
        Scheme1D::OptimalHomodyne => gs(y, scheme) * ks(y, scheme),
    };
    Ok(value.max(0.0))
}

/// Mean time for `C` started at `y` to first reach the lower level `a`:
/// `R(a, y) − S(a, y) K(1)`, for `0 < a ≤ y ≤ 1`.
pub fn mean_first_passage_below(a: f64, y: f64, scheme: Scheme1D) -> Result<f64> {
    mean_first_passage_below_with(a, y, scheme, &QuadratureSpec::default())
}

pub fn mean_first_passage_below_with(a: f64, y: f64, scheme: Scheme1D, quad: &QuadratureSpec) -> Result<f64> {
    if a == 0.0 {
        return Err(FirstPassageError::Divergent("mean first passage to 0"));
    }
    check_order(a, y)?;
    if a == y {
        return Ok(0.0);
    }
    match scheme {
        Scheme1D::Heterodyne => Ok(het_passage_potential(y) - het_passage_potential(a)),
        Scheme1D::OptimalHomodyne => finite_r(a, y, scheme, quad),
    }
}

/// `ln(z/(1−z)) − 2z − e·S(0, z)` rewritten without its cancelling
/// logarithms: `γ̄ − Ein((1−z)/z) − 2z + z e^{1 − 1/z}`.
fn het_passage_potential(z: f64) -> f64 {
    let x = (1.0 - z) / z;
    EULER_GAMMA - ein(x).expect("x >= 0") - 2.0 * z + z * (1.0 - 1.0 / z).exp()
}

/// Mean total time `C` started at `y` spends in `[ell, r]` before absorption:
/// `∫_ell^r S(0, min(y, z)) m(z) dz` with speed density `m = −K′`.
/// Infinite for `ell = 0`.
pub fn mean_occupation_time(y: f64, ell: f64, r: f64, scheme: Scheme1D) -> Result<Extended> {
    mean_occupation_time_with(y, ell, r, scheme, &QuadratureSpec::default())
}

pub fn mean_occupation_time_with(
    y: f64,
    ell: f64,
    r: f64,
    scheme: Scheme1D,
    quad: &QuadratureSpec,
) -> Result<Extended> {
    check_order(ell, r)?;
    if !(y > 0.0 && y <= 1.0) {
        return Err(FirstPassageError::Domain { what: "y", value: y });
    }
    if ell == 0.0 {
        return Ok(Extended::Infinite);
    }
    if y <= ell {
        return Ok(Extended::Finite(gk(y, ell, scheme) - gk(y, r, scheme)));
    }
    let m = y.min(r);
    let value = if r == 1.0 {
        mean_first_passage_below_with(ell, m, scheme, quad)? + mean_excitation_time(ell, scheme)?
    } else {
        finite_r(ell, m, scheme, quad)? + gk(ell, ell, scheme) - gk(m, r, scheme)
    };
    Ok(Extended::Finite(value.max(0.0)))
}
