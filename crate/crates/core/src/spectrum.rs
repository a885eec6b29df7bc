//! Short-time Fourier transform and magnitude spectrograms.

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// FFT size used by the spectrogram-based metrics.
pub const DEFAULT_FFT_SIZE: usize = 512;
/// Hop size used by the spectrogram-based metrics.
pub const DEFAULT_HOP: usize = 128;

/// One-sided magnitude time-frequency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `[n_bins x n_frames]`, all entries non-negative and finite.
    pub magnitudes: Array2<f64>,
    pub fft_size: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn n_bins(&self) -> usize {
        self.magnitudes.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.magnitudes.ncols()
    }

    /// Log-compressed copy: each magnitude mapped to `ln(1 + m)`. Zero maps
    /// to zero and the output stays non-negative.
    pub fn log_compressed(&self) -> Spectrogram {
        Spectrogram {
            magnitudes: self.magnitudes.mapv(f64::ln_1p),
            ..*self
        }
    }

    /// Center frequency of bin `k` in Hz.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.fft_size as f64
    }

    /// Width of one frequency bin in Hz.
    pub fn bin_width_hz(&self) -> f64 {
        self.sample_rate as f64 / self.fft_size as f64
    }
}

/// Periodic Hann window of length `n`.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect()
}

/// Number of analysis frames for a given signal length: frames cover
/// `[i*hop, i*hop + fft_size)` fully inside the signal.
pub fn frame_count(len: usize, fft_size: usize, hop: usize) -> usize {
    if len < fft_size {
        0
    } else {
        (len - fft_size) / hop + 1
    }
}

/// One-sided magnitude spectrogram with a Hann window per frame.
pub fn stft_magnitude(clip: &AudioClip, fft_size: usize, hop: usize) -> Result<Spectrogram> {
    if !fft_size.is_power_of_two() {
        return Err(Error::invalid(format!(
            "fft_size {fft_size} must be a power of two"
        )));
    }
    if hop == 0 || hop > fft_size {
        return Err(Error::invalid(format!(
            "hop {hop} must be in 1..={fft_size}"
        )));
    }
    let samples = clip.samples();
    if samples.len() < fft_size {
        return Err(Error::invalid(format!(
            "clip of {} samples is shorter than one frame ({fft_size})",
            samples.len()
        )));
    }

    let n_frames = frame_count(samples.len(), fft_size, hop);
    let n_bins = fft_size / 2 + 1;
    let window = hann_window(fft_size);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(fft_size);
    let mut magnitudes = Array2::zeros((n_bins, n_frames));
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];

    for frame in 0..n_frames {
        let start = frame * hop;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(samples[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        for k in 0..n_bins {
            magnitudes[(k, frame)] = buf[k].norm();
        }
    }

    Ok(Spectrogram {
        magnitudes,
        fft_size,
        hop,
        sample_rate: clip.sample_rate(),
    })
}
