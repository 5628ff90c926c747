use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` Bernoulli trials.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
}

impl MeanEstimate {
    /// Two-pass estimate over `values` in the given order.
    pub fn from_samples<I>(values: I) -> Self
    where
        I: IntoIterator<Item = f64>,
        I::IntoIter: Clone,
    {
        let it = values.into_iter();
        let (n, sum) = it.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
        if n == 0 {
            return Self { n: 0, mean: f64::NAN, std_err: f64::NAN };
        }
        let mean = sum / n as f64;
        let ss: f64 = it.map(|v| (v - mean) * (v - mean)).sum();
        let var = if n > 1 { ss / (n as f64 - 1.0) } else { 0.0 };
        Self { n, mean, std_err: (var / n as f64).sqrt() }
    }

    /// `mean ± k·std_err`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (self.mean - k * self.std_err, self.mean + k * self.std_err)
    }

    /// Deviation from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_err
    }
}
