use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reproducible Gaussian noise for one trajectory.
///
/// The generator is ChaCha8 keyed by `master_seed`, with the ChaCha stream
/// id set to `stream_index`; distinct indices read disjoint keystreams.
///
/// Normal deviates use the Marsaglia polar method. Each accepted pair
/// `(u, v)` yields `u·m` first and `v·m` second, so the deviate sequence is a
/// fixed function of `(master_seed, stream_index)`. Uniform draws do not
/// discard a cached normal.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    master_seed: u64,
    stream_index: u64,
    position: u64,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NoiseStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            position: 0,
            rng,
            spare: None,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Number of deviates (normal or uniform) handed out so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Uniform deviate on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.position += 1;
        self.raw_uniform()
    }

    #[inline]
    fn raw_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.position += 1;
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.raw_uniform() - 1.0;
            let v = 2.0 * self.raw_uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }

    /// Wiener increment over `dt`: `√dt · N(0, 1)`.
    #[inline]
    pub fn gaussian_increment(&mut self, dt: f64) -> f64 {
        debug_assert!(dt > 0.0, "time step must be positive");
        dt.sqrt() * self.standard_normal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_identity_same_sequence() {
        let mut a = NoiseStream::new(42, 7);
        let mut b = NoiseStream::new(42, 7);
        for _ in 0..1000 {
            assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
        }
        assert_eq!(a.position(), 1000);
    }

    #[test]
    fn streams_differ() {
        let mut a = NoiseStream::new(42, 0);
        let mut b = NoiseStream::new(42, 1);
        let same = (0..100)
            .filter(|_| a.standard_normal() == b.standard_normal())
            .count();
        assert_eq!(same, 0);
    }

    #[test]
    fn moments_of_increments() {
        let mut s = NoiseStream::new(1, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = s.gaussian_increment(1.0);
            sum += x;
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.004, "mean {mean}");

        let dt = 1e-4;
        let mut s = NoiseStream::new(2, 0);
        let xs: Vec<f64> = (0..n).map(|_| s.gaussian_increment(dt)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / dt - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = NoiseStream::new(3, 9);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
