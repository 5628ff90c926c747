//! Test-only oracles shared by the integration tests.
#![allow(dead_code)]

pub mod mp;

use emitrace_core::emitter::optimal_homodyne_population_coeffs;
use emitrace_core::first_passage::Scheme1D;
use emitrace_core::sde::milstein_step;
use emitrace_core::NoiseStream;

/// Tanh-sinh quadrature on `[a, b]`, halving the step until two levels agree to `tol`.
///
/// `f` receives the abscissa together with its distances to `a` and `b`, so
/// endpoint singularities can be evaluated without cancellation.
pub fn tanh_sinh(f: &dyn Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let eval = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        // 1 − tanh|u| without cancellation.
        let comp = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        let (x, da, db) = if u >= 0.0 {
            (mid + half * (1.0 - comp), half * (2.0 - comp), half * comp)
        } else {
            (mid - half * (1.0 - comp), half * comp, half * (2.0 - comp))
        };
        if da <= 0.0 || db <= 0.0 || w == 0.0 {
            return 0.0;
        }
        half * w * f(x, da, db)
    };
    let t_max = 4.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Scale density written out from the diffusion coefficients.
pub fn q_direct(z: f64, one_minus_z: f64, scheme: Scheme1D) -> f64 {
    match scheme {
        Scheme1D::Heterodyne => (-1.0 / z).exp() * z / one_minus_z,
        Scheme1D::OptimalHomodyne => (-0.5 / z).exp() * (z / one_minus_z).sqrt(),
    }
}

/// `2/(Q B²)`, the integrand of the speed function.
fn speed_density(z: f64, one_minus_z: f64, scheme: Scheme1D) -> f64 {
    let b2 = match scheme {
        Scheme1D::Heterodyne => 2.0 * z.powi(3) * one_minus_z,
        Scheme1D::OptimalHomodyne => 4.0 * z.powi(3) * one_minus_z,
    };
    2.0 / (q_direct(z, one_minus_z, scheme) * b2)
}

/// `K(z) = K(1) + ∫_z^1 2/(Q B²)` by tanh-sinh quadrature.
pub fn k_brute(z: f64, scheme: Scheme1D) -> f64 {
    let k1 = match scheme {
        Scheme1D::Heterodyne => std::f64::consts::E,
        Scheme1D::OptimalHomodyne => 0.0,
    };
    k1 + tanh_sinh(&|w, _, db| speed_density(w, db, scheme), z, 1.0, 1e-13)
}

/// `R(u, v) = ∫ᵤᵛ Q K` with `K` itself integrated at every outer node.
pub fn r_brute(u: f64, v: f64, scheme: Scheme1D) -> f64 {
    tanh_sinh(&|z, _, _| q_direct(z, 1.0 - z, scheme) * k_brute(z, scheme), u, v, 1e-12)
}

/// Five-point first and second derivatives.
pub fn derivatives(f: &dyn Fn(f64) -> f64, y: f64, h: f64) -> (f64, f64) {
    let (m2, m1, c, p1, p2) = (f(y - 2.0 * h), f(y - h), f(y), f(y + h), f(y + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// Mean absolute terminal error of clamped Milstein paths of the optimal
/// homodyne population at each `dt = 2^-k`, against a reference with
/// `dt/64` on the same Brownian path.
pub fn milstein_strong_errors(c0: f64, horizon: f64, ks: &[u32], n_paths: usize, seed: u64) -> Vec<(f64, f64)> {
    let sde = optimal_homodyne_population_coeffs();
    let k_ref = ks.iter().max().unwrap() + 6;
    let n_ref = (horizon * f64::powi(2.0, k_ref as i32)).round() as usize;
    let dt_ref = horizon / n_ref as f64;
    let step = |c: f64, dw: f64, dt: f64| milstein_step(c, &sde, dw, dt).unwrap().clamp(0.0, 1.0);
    let mut sums = vec![0.0; ks.len()];
    let mut dws = vec![0.0; n_ref];
    for path in 0..n_paths {
        let mut noise = NoiseStream::new(seed, path as u64);
        for dw in dws.iter_mut() {
            *dw = noise.gaussian_increment(dt_ref);
        }
        let reference = dws.iter().fold(c0, |c, &dw| step(c, dw, dt_ref));
        for (sum, &k) in sums.iter_mut().zip(ks) {
            let stride = 1usize << (k_ref - k);
            let dt = dt_ref * stride as f64;
            let c = dws.chunks(stride).fold(c0, |c, chunk| step(c, chunk.iter().sum(), dt));
            *sum += (c - reference).abs();
        }
    }
    ks.iter()
        .zip(sums)
        .map(|(&k, s)| (horizon * f64::powi(2.0, -(k as i32)), s / n_paths as f64))
        .collect()
}

/// Least-squares slope of `ln err` against `ln dt`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Largest relative deviation of `f` from `oracle` over `grid`, with the argument where it occurs.
pub fn max_rel_error(grid: &[f64], f: &dyn Fn(f64) -> f64, oracle: &dyn Fn(f64) -> f64) -> (f64, f64) {
    grid.iter()
        .map(|&x| {
            let want = oracle(x);
            let got = f(x);
            let err = if want == got { 0.0 } else { ((got - want) / want).abs() };
            (err, x)
        })
        .fold((0.0, f64::NAN), |acc, e| if e.0 > acc.0 || e.0.is_nan() { e } else { acc })
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
