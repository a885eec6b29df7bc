//! Analytic-signal envelopes via the FFT Hilbert transform.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Pointwise magnitude of the analytic signal: forward FFT, zero the negative
/// frequencies, double the positive ones, inverse FFT, take the modulus.
/// Output length equals input length; all values are non-negative.
pub fn hilbert_envelope(samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::invalid("hilbert envelope needs at least 2 samples"));
    }

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
    fft.process(&mut buf);

    // Analytic spectrum: keep DC (and Nyquist for even n), double positive,
    // zero negative frequencies.
    let half = n / 2;
    if n % 2 == 0 {
        for b in buf.iter_mut().take(half).skip(1) {
            *b *= 2.0;
        }
        for b in buf.iter_mut().skip(half + 1) {
            *b = Complex::new(0.0, 0.0);
        }
    } else {
        for b in buf.iter_mut().take(half + 1).skip(1) {
            *b *= 2.0;
        }
        for b in buf.iter_mut().skip(half + 1) {
            *b = Complex::new(0.0, 0.0);
        }
    }

    ifft.process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(buf.iter().map(|c| (c * scale).norm()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    #[test]
    fn cosine_envelope_is_unity_away_from_edges() {
        let sr = 16_000.0;
        let n = 16_000;
        let f = 440.0;
        let x: Vec<f64> = (0..n).map(|i| (TAU * f * i as f64 / sr).cos()).collect();
        let env = hilbert_envelope(&x).unwrap();
        for &e in &env[n / 10..9 * n / 10] {
            assert!((e - 1.0).abs() < 1e-3, "envelope {e}");
        }
    }

    #[test]
    fn scaled_cosine_envelope_scales() {
        let sr = 16_000.0;
        let n = 16_000;
        let x: Vec<f64> = (0..n)
            .map(|i| 0.5 * (TAU * 440.0 * i as f64 / sr).cos())
            .collect();
        let env = hilbert_envelope(&x).unwrap();
        for &e in &env[n / 10..9 * n / 10] {
            assert!((e - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn am_signal_recovers_modulation_envelope() {
        let sr = 16_000.0;
        let n = 32_000;
        let fc = 2_000.0;
        let fm = 8.0;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / sr;
                (1.0 + 0.5 * (TAU * fm * t).cos()) * (TAU * fc * t).cos()
            })
            .collect();
        let env = hilbert_envelope(&x).unwrap();
        for i in n / 10..9 * n / 10 {
            let t = i as f64 / sr;
            let expected = 1.0 + 0.5 * (TAU * fm * t).cos();
            assert!(
                (env[i] - expected).abs() < 1e-2,
                "at {i}: {} vs {expected}",
                env[i]
            );
        }
    }

    #[test]
    fn empty_and_single_sample_rejected() {
        assert!(hilbert_envelope(&[]).is_err());
        assert!(hilbert_envelope(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn positive_homogeneity(scale in 0.1f64..10.0, seed in 0u64..1000) {
            let mut rng = crate::rng::SeededRng::new(seed);
            let x: Vec<f64> = (0..256).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let e1 = hilbert_envelope(&x).unwrap();
            let e2 = hilbert_envelope(&scaled).unwrap();
            for (a, b) in e1.iter().zip(&e2) {
                let want = a * scale;
                prop_assert!((b - want).abs() <= 1e-9 * want.abs().max(1.0));
            }
        }
    }
}
