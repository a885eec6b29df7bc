//! Band-limited 1-D gradient noise and white-noise helpers.

use crate::error::{Error, Result};
use crate::rng::{splitmix64, SeededRng};

/// Smooth gradient noise over a 1-D integer lattice. Values are bounded in
/// `[-1, 1]` and the dominant spectral content sits near the lattice rate.
/// Lattice gradients are hashed from the seed, so evaluation is random-access
/// and deterministic.
#[derive(Debug, Clone, Copy)]
pub struct GradientNoise1D {
    seed: u64,
}

impl GradientNoise1D {
    pub fn new(seed: u64) -> Self {
        GradientNoise1D { seed }
    }

    fn gradient(&self, cell: i64) -> f64 {
        let h = splitmix64(self.seed ^ splitmix64(cell as u64));
        // top 53 bits -> [0,1) -> [-1,1)
        ((h >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    /// Evaluate at lattice coordinate `x`.
    pub fn sample(&self, x: f64) -> f64 {
        let cell = x.floor();
        let fx = x - cell;
        let cell = cell as i64;
        let g0 = self.gradient(cell);
        let g1 = self.gradient(cell + 1);
        let n0 = g0 * fx;
        let n1 = g1 * (fx - 1.0);
        let t = fx * fx * fx * (fx * (fx * 6.0 - 15.0) + 10.0); // quintic fade
        2.0 * (n0 + t * (n1 - n0))
    }
}

/// Sampled gradient-noise sequence: `duration` seconds at `sample_rate`, with
/// lattice points `frequency` per second.
pub fn simplex_noise_1d(
    frequency: f64,
    duration: f64,
    sample_rate: u32,
    seed: &SeededRng,
) -> Result<Vec<f64>> {
    if frequency <= 0.0 {
        return Err(Error::invalid(format!(
            "noise frequency must be positive, got {frequency}"
        )));
    }
    let noise = GradientNoise1D::new(seed.seed());
    let n = (duration * sample_rate as f64).round() as usize;
    Ok((0..n)
        .map(|i| noise.sample(frequency * i as f64 / sample_rate as f64))
        .collect())
}

/// `n` uniform samples in `[-1, 1]`.
pub fn uniform_noise(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
}

/// `n` standard normal samples.
pub fn gaussian_noise(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}
