//! Measurement utilities: dominant frequency, spectral centroid and flatness,
//! onset detection. Used by the test suites to verify synthesizer output and
//! available for ad-hoc corpus inspection.

use crate::audio::AudioClip;
use crate::envelope::hilbert_envelope;
use crate::error::Result;
use crate::spectrum::{stft_magnitude, Spectrogram};

/// Time-averaged magnitude spectrum of a spectrogram (one value per bin).
pub fn mean_spectrum(spec: &Spectrogram) -> Vec<f64> {
    let frames = spec.n_frames() as f64;
    (0..spec.n_bins())
        .map(|k| spec.magnitudes.row(k).sum() / frames)
        .collect()
}

/// Bin index of the strongest component of the time-averaged spectrum.
pub fn dominant_bin(spec: &Spectrogram) -> usize {
    let avg = mean_spectrum(spec);
    avg.iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Dominant frequency in Hz, refined by parabolic interpolation around the
/// peak bin of the time-averaged spectrum.
pub fn dominant_frequency(clip: &AudioClip, fft_size: usize, hop: usize) -> Result<f64> {
    let spec = stft_magnitude(clip, fft_size, hop)?;
    let avg = mean_spectrum(&spec);
    Ok(refine_peak_hz(&avg, dominant_bin(&spec), spec.bin_width_hz()))
}

/// Parabolic interpolation of a spectral peak position.
pub fn refine_peak_hz(spectrum: &[f64], peak_bin: usize, bin_width_hz: f64) -> f64 {
    if peak_bin == 0 || peak_bin + 1 >= spectrum.len() {
        return peak_bin as f64 * bin_width_hz;
    }
    let (a, b, c) = (
        spectrum[peak_bin - 1],
        spectrum[peak_bin],
        spectrum[peak_bin + 1],
    );
    let denom = a - 2.0 * b + c;
    let delta = if denom.abs() < 1e-30 {
        0.0
    } else {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    };
    (peak_bin as f64 + delta) * bin_width_hz
}

/// Power-weighted mean frequency of the time-averaged spectrum.
pub fn spectral_centroid(clip: &AudioClip, fft_size: usize, hop: usize) -> Result<f64> {
    let spec = stft_magnitude(clip, fft_size, hop)?;
    let avg = mean_spectrum(&spec);
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &m) in avg.iter().enumerate() {
        let p = m * m;
        num += spec.bin_hz(k) * p;
        den += p;
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// Spectral flatness (Wiener entropy) of the time-averaged power spectrum:
/// geometric over arithmetic mean, in (0, 1], 1 for white noise.
pub fn spectral_flatness(clip: &AudioClip, fft_size: usize, hop: usize) -> Result<f64> {
    let spec = stft_magnitude(clip, fft_size, hop)?;
    let avg = mean_spectrum(&spec);
    // skip DC, floor to keep the log finite
    let powers: Vec<f64> = avg[1..].iter().map(|m| (m * m).max(1e-24)).collect();
    let log_mean = powers.iter().map(|p| p.ln()).sum::<f64>() / powers.len() as f64;
    let arith = powers.iter().sum::<f64>() / powers.len() as f64;
    Ok(log_mean.exp() / arith)
}

/// Onset times detected from the smoothed envelope: local rises above
/// `threshold` x the envelope peak, separated by at least `min_gap_s`.
pub fn detect_onsets(clip: &AudioClip, threshold: f64, min_gap_s: f64) -> Result<Vec<f64>> {
    let env = hilbert_envelope(clip.samples())?;
    // short moving-average smoothing (1 ms)
    let w = (clip.sample_rate() as f64 * 0.001).max(1.0) as usize;
    let mut smooth = vec![0.0; env.len()];
    let mut acc = 0.0;
    for i in 0..env.len() {
        acc += env[i];
        if i >= w {
            acc -= env[i - w];
        }
        smooth[i] = acc / w.min(i + 1) as f64;
    }
    let peak = smooth.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Ok(vec![]);
    }
    let gate = threshold * peak;
    let min_gap = (min_gap_s * clip.sample_rate() as f64) as usize;
    let mut onsets = Vec::new();
    let mut last: Option<usize> = None;
    for i in 1..smooth.len() {
        if smooth[i] >= gate && smooth[i - 1] < gate {
            if let Some(prev) = last {
                if i - prev < min_gap {
                    continue;
                }
            }
            onsets.push(i as f64 / clip.sample_rate() as f64);
            last = Some(i);
        }
    }
    Ok(onsets)
}
