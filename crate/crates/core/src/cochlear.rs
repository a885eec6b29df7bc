//! Cochlear-model texture statistics and the CPM distance.
//!
//! Pipeline: a 36-band gammatone filterbank on an ERB-rate scale, Hilbert
//! envelopes compressed with exponent 0.3 and downsampled to the envelope
//! rate, a 20-band modulation filterbank on each envelope, then seven sets of
//! time-averaged statistics totalling 6,432 values. The CPM distance between
//! two clips is the sum over the seven sets of cosine distances between the
//! flattened statistics.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::envelope::hilbert_envelope;
use crate::error::{Error, Result};
use crate::stats::{marginal_moments, mean, variance};

/// Number of cochlear (gammatone) bands.
pub const N_COCHLEAR_FILTERS: usize = 36;
/// Number of modulation bands per envelope.
pub const N_MODULATION_FILTERS: usize = 20;
/// Envelope compression exponent.
pub const COMPRESSION_EXPONENT: f64 = 0.3;
/// Total number of statistics produced by [`compute_stats`].
pub const TOTAL_STAT_COUNT: usize = 6_432;
/// Envelope pairs entering the modulation-correlation set.
pub const N_ENVELOPE_PAIRS: usize = 174;

/// Enumeration strategy for the modulation-correlation envelope pairs.
/// `OrderedWindow2` takes every ordered band pair `(i, j)` with `|i-j| <= 2`
/// (self included), which yields exactly 174 pairs for 36 bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairStrategy {
    OrderedWindow2,
}

impl PairStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PairStrategy::OrderedWindow2 => "ordered_window_2",
        }
    }

    /// Enumerate the envelope index pairs for `n_bands` bands.
    pub fn pairs(&self, n_bands: usize) -> Vec<(usize, usize)> {
        match self {
            PairStrategy::OrderedWindow2 => {
                let mut out = Vec::new();
                for i in 0..n_bands {
                    for j in i.saturating_sub(2)..=(i + 2).min(n_bands - 1) {
                        out.push((i, j));
                    }
                }
                out
            }
        }
    }
}

/// Configuration of the cochlear statistics pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochlearConfig {
    pub n_cochlear_filters: usize,
    pub n_modulation_filters: usize,
    pub compression_exponent: f64,
    /// Cochlear band range in Hz (ERB-rate spaced centers strictly inside).
    pub cochlear_range_hz: (f64, f64),
    /// Modulation filter centers span this range, log-spaced.
    pub modulation_range_hz: (f64, f64),
    /// Envelope sample rate after downsampling.
    pub envelope_rate_hz: f64,
    pub pair_strategy: PairStrategy,
}

impl Default for CochlearConfig {
    fn default() -> Self {
        CochlearConfig {
            n_cochlear_filters: N_COCHLEAR_FILTERS,
            n_modulation_filters: N_MODULATION_FILTERS,
            compression_exponent: COMPRESSION_EXPONENT,
            cochlear_range_hz: (20.0, 8_000.0),
            modulation_range_hz: (0.5, 180.0),
            envelope_rate_hz: 400.0,
            pair_strategy: PairStrategy::OrderedWindow2,
        }
    }
}

/// ERB-rate warp of a frequency in Hz (Glasberg & Moore).
pub fn erb_rate(f_hz: f64) -> f64 {
    21.4 * (1.0 + 0.004_37 * f_hz).log10()
}

/// Inverse of [`erb_rate`].
pub fn erb_rate_to_hz(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 0.004_37
}

/// Equivalent rectangular bandwidth at a center frequency.
pub fn erb_bandwidth(f_hz: f64) -> f64 {
    24.7 * (4.37 * f_hz / 1000.0 + 1.0)
}

impl CochlearConfig {
    /// Center frequencies: `n` points equally spaced on the ERB-rate scale,
    /// strictly inside the configured range.
    pub fn center_frequencies(&self) -> Vec<f64> {
        let (lo, hi) = self.cochlear_range_hz;
        let n = self.n_cochlear_filters;
        let e_lo = erb_rate(lo);
        let e_hi = erb_rate(hi);
        (1..=n)
            .map(|i| erb_rate_to_hz(e_lo + (e_hi - e_lo) * i as f64 / (n + 1) as f64))
            .collect()
    }

    /// Modulation filter center frequencies, log-spaced.
    pub fn modulation_centers(&self) -> Vec<f64> {
        let (lo, hi) = self.modulation_range_hz;
        let n = self.n_modulation_filters;
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Apply a filter in the frequency domain: multiply the signal's FFT by the
/// transfer function evaluated at each bin angle. Circular convolution, so
/// circular time-shifts of the input commute with every filter stage and the
/// time-average statistics are shift-invariant.
fn circular_filter(xs: &[f64], response: impl Fn(f64) -> Complex<f64>) -> Vec<f64> {
    let n = xs.len();
    let mut planner = rustfft::FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    // evaluate on the non-negative half, mirror conjugate onto the rest so
    // the output stays exactly real-valued
    let half = n / 2;
    for k in 0..=half {
        let theta = std::f64::consts::TAU * k as f64 / n as f64;
        buf[k] *= response(theta);
    }
    for k in (half + 1)..n {
        let theta = std::f64::consts::TAU * (n - k) as f64 / n as f64;
        buf[k] *= response(theta).conj();
    }
    ifft.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// 4th-order all-pole gammatone response: four cascaded complex one-pole
/// resonators plus the conjugate branch, gain-normalized to unity at the
/// center frequency.
#[derive(Debug, Clone)]
pub struct GammatoneFilter {
    pole: Complex<f64>,
    gain: f64,
}

impl GammatoneFilter {
    pub fn new(center_hz: f64, sample_rate: u32) -> Self {
        let fs = sample_rate as f64;
        let theta = std::f64::consts::TAU * center_hz / fs;
        let bw = 1.019 * erb_bandwidth(center_hz);
        let r = (-std::f64::consts::TAU * bw / fs).exp();
        let pole = Complex::from_polar(r, theta);
        let gain = 1.0 / Self::raw_response(pole, theta).norm();
        GammatoneFilter { pole, gain }
    }

    /// Response of the real (conjugate-symmetric) 8-pole filter at `theta`.
    fn raw_response(pole: Complex<f64>, theta: f64) -> Complex<f64> {
        let h_pos = (Complex::new(1.0, 0.0) - pole * Complex::from_polar(1.0, -theta)).powi(-4);
        let h_neg = (Complex::new(1.0, 0.0) - pole * Complex::from_polar(1.0, theta)).powi(-4);
        0.5 * (h_pos + h_neg.conj())
    }

    /// Normalized transfer function at bin angle `theta`.
    pub fn response(&self, theta: f64) -> Complex<f64> {
        Self::raw_response(self.pole, theta) * self.gain
    }

    /// Filter a real signal (circularly), returning the band signal.
    pub fn process(&self, xs: &[f64]) -> Vec<f64> {
        circular_filter(xs, |theta| self.response(theta))
    }
}

/// Transfer function of an RBJ constant 0 dB peak-gain bandpass biquad.
fn bandpass_response(center_hz: f64, q: f64, sample_rate: f64) -> impl Fn(f64) -> Complex<f64> {
    let w0 = std::f64::consts::TAU * center_hz / sample_rate;
    let alpha = w0.sin() / (2.0 * q);
    let a0 = 1.0 + alpha;
    let (b0, b2) = (alpha / a0, -alpha / a0);
    let a1 = -2.0 * w0.cos() / a0;
    let a2 = (1.0 - alpha) / a0;
    move |theta: f64| {
        let z1 = Complex::from_polar(1.0, -theta);
        let z2 = z1 * z1;
        (b0 + b2 * z2) / (Complex::new(1.0, 0.0) + a1 * z1 + a2 * z2)
    }
}

/// Transfer function of an analog-prototype Butterworth lowpass of the given
/// even order, bilinear-transformed per second-order section.
fn butterworth_lp_response(
    cutoff_hz: f64,
    order: usize,
    sample_rate: f64,
) -> impl Fn(f64) -> Complex<f64> {
    let w0 = std::f64::consts::TAU * cutoff_hz / sample_rate;
    let sections: Vec<(f64, f64, f64, f64)> = (1..=(order / 2))
        .map(|k| {
            let qk = 1.0 / (2.0 * ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * order) as f64).sin());
            let alpha = w0.sin() / (2.0 * qk);
            let cos_w0 = w0.cos();
            let a0 = 1.0 + alpha;
            (
                (1.0 - cos_w0) / 2.0 / a0, // b0 = b2, b1 = 2*b0
                -2.0 * cos_w0 / a0,
                (1.0 - alpha) / a0,
                0.0,
            )
        })
        .collect();
    move |theta: f64| {
        let z1 = Complex::from_polar(1.0, -theta);
        let z2 = z1 * z1;
        let mut h = Complex::new(1.0, 0.0);
        for &(b0, a1, a2, _) in &sections {
            h *= (b0 + 2.0 * b0 * z1 + b0 * z2)
                / (Complex::new(1.0, 0.0) + a1 * z1 + a2 * z2);
        }
        h
    }
}

/// Split a clip into the 36 gammatone band signals (each the input length).
pub fn gammatone_decompose(clip: &AudioClip, cfg: &CochlearConfig) -> Result<Vec<Vec<f64>>> {
    if clip.duration_s() < 0.5 {
        return Err(Error::invalid(format!(
            "clip of {:.3}s is shorter than 0.5s",
            clip.duration_s()
        )));
    }
    let centers = cfg.center_frequencies();
    Ok(centers
        .iter()
        .map(|&cf| GammatoneFilter::new(cf, clip.sample_rate()).process(clip.samples()))
        .collect())
}

/// Hilbert envelope of each band, compressed with the configured exponent
/// and downsampled to the envelope rate. Values are non-negative.
pub fn compressed_envelopes(
    subbands: &[Vec<f64>],
    sample_rate: u32,
    cfg: &CochlearConfig,
) -> Result<Vec<Vec<f64>>> {
    let decim = (sample_rate as f64 / cfg.envelope_rate_hz).round().max(1.0) as usize;
    let anti_alias =
        butterworth_lp_response(0.45 * cfg.envelope_rate_hz, 4, sample_rate as f64);
    subbands
        .iter()
        .map(|band| {
            let env = hilbert_envelope(band)?;
            let compressed: Vec<f64> =
                env.iter().map(|&e| e.powf(cfg.compression_exponent)).collect();
            // anti-alias before decimation, clamp the slight filter undershoot
            let smoothed = circular_filter(&compressed, &anti_alias);
            Ok(smoothed
                .iter()
                .step_by(decim)
                .map(|&v| v.max(0.0))
                .collect())
        })
        .collect()
}

/// 20 modulation band signals of one envelope: constant-Q (Q=2) bandpass
/// filters at log-spaced centers.
pub fn modulation_decompose(envelope: &[f64], cfg: &CochlearConfig) -> Result<Vec<Vec<f64>>> {
    if envelope.len() < 2 {
        return Err(Error::invalid("envelope too short for modulation analysis"));
    }
    Ok(cfg
        .modulation_centers()
        .iter()
        .map(|&fc| {
            let h = bandpass_response(fc, 2.0, cfg.envelope_rate_hz);
            circular_filter(envelope, h)
        })
        .collect())
}

/// The seven named statistic sets. Total flattened length is 6,432:
/// 36 + 144 + 36 + 1296 + 720 + 720 + 3480.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochlearStats {
    /// Per-band time-average of the squared envelope.
    pub s1_env_power: Vec<f64>,
    /// Per-band mean, variance, skewness, kurtosis (36 x 4, row-major).
    pub s2_env_marginals: Vec<f64>,
    /// Per-band envelope variance.
    pub s3_env_variance: Vec<f64>,
    /// Envelope cross-correlation matrix (36 x 36, row-major).
    pub s4_env_corr: Vec<f64>,
    /// Modulation band power (36 x 20, row-major).
    pub s5_mod_power: Vec<f64>,
    /// Modulation band variance (36 x 20, row-major).
    pub s6_mod_variance: Vec<f64>,
    /// Same-index modulation band correlations over the envelope pairs
    /// (174 pairs x 20 bands, pair-major).
    pub s7_mod_corr: Vec<f64>,
    /// Pair enumeration recorded for reports.
    pub pair_strategy: PairStrategy,
    /// Count of correlations that were degenerate (constant signal) and were
    /// defined as 0.
    pub degenerate_correlations: usize,
}

impl CochlearStats {
    /// The seven sets in order, as flat slices.
    pub fn sets(&self) -> [&[f64]; 7] {
        [
            &self.s1_env_power,
            &self.s2_env_marginals,
            &self.s3_env_variance,
            &self.s4_env_corr,
            &self.s5_mod_power,
            &self.s6_mod_variance,
            &self.s7_mod_corr,
        ]
    }

    pub fn total_len(&self) -> usize {
        self.sets().iter().map(|s| s.len()).sum()
    }

    /// Serialize the seven named arrays as JSON (harness cache format).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Correlation defined as 0 (with a degeneracy count) for constant inputs.
fn correlation_or_zero(xs: &[f64], ys: &[f64], degenerate: &mut usize) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        *degenerate += 1;
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Compute the full seven-set statistics of a clip.
pub fn compute_stats(clip: &AudioClip, cfg: &CochlearConfig) -> Result<CochlearStats> {
    let pairs = cfg.pair_strategy.pairs(cfg.n_cochlear_filters);
    if cfg.n_cochlear_filters == N_COCHLEAR_FILTERS {
        // fail loudly if the enumeration drifts from the documented total
        assert_eq!(
            pairs.len(),
            N_ENVELOPE_PAIRS,
            "pair strategy {} produced {} pairs, expected {}",
            cfg.pair_strategy.name(),
            pairs.len(),
            N_ENVELOPE_PAIRS
        );
    }

    let bands = gammatone_decompose(clip, cfg)?;
    let envelopes = compressed_envelopes(&bands, clip.sample_rate(), cfg)?;
    let mut degenerate = 0usize;

    let mut s1 = Vec::with_capacity(envelopes.len());
    let mut s2 = Vec::with_capacity(envelopes.len() * 4);
    let mut s3 = Vec::with_capacity(envelopes.len());
    for env in &envelopes {
        s1.push(mean(&env.iter().map(|e| e * e).collect::<Vec<_>>()));
        let (m, v, skew, kurt) = marginal_moments(env);
        s2.extend([m, v, skew, kurt]);
        s3.push(variance(env));
    }

    let n = envelopes.len();
    let mut s4 = vec![0.0; n * n];
    for i in 0..n {
        s4[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let c = correlation_or_zero(&envelopes[i], &envelopes[j], &mut degenerate);
            s4[i * n + j] = c;
            s4[j * n + i] = c;
        }
    }

    let modulation: Vec<Vec<Vec<f64>>> = envelopes
        .iter()
        .map(|env| modulation_decompose(env, cfg))
        .collect::<Result<_>>()?;

    let mut s5 = Vec::with_capacity(n * cfg.n_modulation_filters);
    let mut s6 = Vec::with_capacity(n * cfg.n_modulation_filters);
    for bands in &modulation {
        for band in bands {
            s5.push(mean(&band.iter().map(|v| v * v).collect::<Vec<_>>()));
            s6.push(variance(band));
        }
    }

    let mut s7 = Vec::with_capacity(pairs.len() * cfg.n_modulation_filters);
    for &(i, j) in &pairs {
        for m in 0..cfg.n_modulation_filters {
            s7.push(correlation_or_zero(
                &modulation[i][m],
                &modulation[j][m],
                &mut degenerate,
            ));
        }
    }

    Ok(CochlearStats {
        s1_env_power: s1,
        s2_env_marginals: s2,
        s3_env_variance: s3,
        s4_env_corr: s4,
        s5_mod_power: s5,
        s6_mod_variance: s6,
        s7_mod_corr: s7,
        pair_strategy: cfg.pair_strategy,
        degenerate_correlations: degenerate,
    })
}

/// Cochlear Param-Metric: sum over the seven sets of cosine distances
/// between the flattened statistics vectors. Range `[0, 14]`.
pub fn cpm(a: &CochlearStats, b: &CochlearStats) -> Result<f64> {
    let mut total = 0.0;
    for (sa, sb) in a.sets().iter().zip(b.sets().iter()) {
        total += crate::stats::cosine_distance(sa, sb)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::uniform_noise;
    use crate::rng::SeededRng;
    use std::f64::consts::TAU;

    const SR: u32 = 16_000;

    fn noise_clip(seed: u64, secs: f64) -> AudioClip {
        let mut rng = SeededRng::new(seed);
        AudioClip::new(uniform_noise((secs * SR as f64) as usize, &mut rng), SR)
            .unwrap()
            .peak_normalized(0.9)
    }

    fn tone_clip(freq: f64, secs: f64) -> AudioClip {
        AudioClip::new(
            (0..(secs * SR as f64) as usize)
                .map(|i| 0.8 * (TAU * freq * i as f64 / SR as f64).sin())
                .collect(),
            SR,
        )
        .unwrap()
    }

    #[test]
    fn pair_strategy_yields_exactly_174_pairs() {
        let pairs = PairStrategy::OrderedWindow2.pairs(36);
        assert_eq!(pairs.len(), 174);
        // 36 self + 70 at offset 1 + 68 at offset 2
        let self_pairs = pairs.iter().filter(|(i, j)| i == j).count();
        assert_eq!(self_pairs, 36);
        assert!(pairs.iter().all(|&(i, j)| (i as i64 - j as i64).abs() <= 2));
    }

    #[test]
    fn tone_at_band_center_dominates_that_band() {
        let cfg = CochlearConfig::default();
        let centers = cfg.center_frequencies();
        for &k in &[5usize, 18, 30] {
            let clip = tone_clip(centers[k], 0.6);
            let bands = gammatone_decompose(&clip, &cfg).unwrap();
            let rms: Vec<f64> = bands
                .iter()
                .map(|b| (b.iter().map(|v| v * v).sum::<f64>() / b.len() as f64).sqrt())
                .collect();
            let argmax = rms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(argmax, k, "band {k}: rms {rms:?}");
        }
    }

    #[test]
    fn zero_input_gives_zero_bands() {
        let clip = AudioClip::new(vec![0.0; SR as usize], SR).unwrap();
        let bands = gammatone_decompose(&clip, &CochlearConfig::default()).unwrap();
        assert!(bands.iter().all(|b| b.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn white_noise_band_energy_covers_input_within_3db() {
        let clip = noise_clip(41, 1.0);
        let cfg = CochlearConfig::default();
        let bands = gammatone_decompose(&clip, &cfg).unwrap();
        let band_energy: f64 = bands.iter().flat_map(|b| b.iter().map(|v| v * v)).sum();
        let input_energy: f64 = clip.samples().iter().map(|v| v * v).sum();
        let ratio = band_energy / input_energy;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "filterbank energy ratio {ratio}"
        );
    }

    #[test]
    fn short_clip_rejected() {
        let clip = AudioClip::new(vec![0.1; 1000], SR).unwrap();
        assert!(gammatone_decompose(&clip, &CochlearConfig::default()).is_err());
    }

    #[test]
    fn compression_fixed_points() {
        assert!((1.0f64.powf(COMPRESSION_EXPONENT) - 1.0).abs() < 1e-15);
        assert!((0.5f64.powf(COMPRESSION_EXPONENT) - 0.8123).abs() < 1e-4);
    }

    #[test]
    fn compression_preserves_pointwise_order() {
        let cfg = CochlearConfig::default();
        let a = vec![0.1; SR as usize];
        let b: Vec<f64> = (0..SR as usize).map(|i| 0.2 + (i as f64 * 0.001).sin().abs()).collect();
        let envs = compressed_envelopes(&[a, b], SR, &cfg).unwrap();
        // envelope of b dominates envelope of a pointwise, so compressed too
        let violations = envs[0]
            .iter()
            .zip(&envs[1])
            .filter(|(x, y)| x > y)
            .count();
        assert!(violations < envs[0].len() / 20, "{violations} violations");
    }

    #[test]
    fn dc_envelope_has_no_modulation_energy() {
        let cfg = CochlearConfig::default();
        let n = 800;
        let env = vec![0.7; n];
        let bands = modulation_decompose(&env, &cfg).unwrap();
        assert_eq!(bands.len(), 20);
        for band in &bands {
            let energy: f64 = band.iter().map(|v| v * v).sum();
            let dc_energy = 0.7 * 0.7 * n as f64;
            assert!(energy < 1e-12 * dc_energy, "band energy {energy}");
        }
    }

    #[test]
    fn modulated_envelope_peaks_at_matching_band() {
        let cfg = CochlearConfig::default();
        let centers = cfg.modulation_centers();
        let target = 10usize;
        let fm = centers[target];
        let env: Vec<f64> = (0..1600)
            .map(|i| 1.0 + 0.5 * (TAU * fm * i as f64 / cfg.envelope_rate_hz).sin())
            .collect();
        let bands = modulation_decompose(&env, &cfg).unwrap();
        let energies: Vec<f64> = bands
            .iter()
            .map(|b| b.iter().map(|v| v * v).sum::<f64>())
            .collect();
        let argmax = energies
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(
            (argmax as i64 - target as i64).abs() <= 1,
            "peak at band {argmax}, wanted {target}"
        );
    }

    #[test]
    fn stats_have_the_documented_shape() {
        let clip = noise_clip(7, 1.0);
        let stats = compute_stats(&clip, &CochlearConfig::default()).unwrap();
        assert_eq!(stats.s1_env_power.len(), 36);
        assert_eq!(stats.s2_env_marginals.len(), 144);
        assert_eq!(stats.s3_env_variance.len(), 36);
        assert_eq!(stats.s4_env_corr.len(), 1296);
        assert_eq!(stats.s5_mod_power.len(), 720);
        assert_eq!(stats.s6_mod_variance.len(), 720);
        assert_eq!(stats.s7_mod_corr.len(), 3480);
        assert_eq!(stats.total_len(), TOTAL_STAT_COUNT);
    }

    #[test]
    fn stats_are_deterministic_and_s4_is_a_correlation_matrix() {
        let clip = noise_clip(9, 0.8);
        let cfg = CochlearConfig::default();
        let a = compute_stats(&clip, &cfg).unwrap();
        let b = compute_stats(&clip, &cfg).unwrap();
        assert_eq!(a.s4_env_corr, b.s4_env_corr);
        assert_eq!(a.s7_mod_corr, b.s7_mod_corr);
        let n = 36;
        for i in 0..n {
            assert_eq!(a.s4_env_corr[i * n + i], 1.0);
            for j in 0..n {
                let x = a.s4_env_corr[i * n + j];
                assert_eq!(x, a.s4_env_corr[j * n + i]);
                assert!((-1.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn cpm_identity_symmetry_scale_invariance_and_toy_orthogonal_set() {
        let clip = noise_clip(13, 0.8);
        let cfg = CochlearConfig::default();
        let a = compute_stats(&clip, &cfg).unwrap();
        assert!(cpm(&a, &a).unwrap().abs() < 1e-12);

        let other = compute_stats(&noise_clip(14, 0.8), &cfg).unwrap();
        let ab = cpm(&a, &other).unwrap();
        let ba = cpm(&other, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12, "{ab} vs {ba}");
        assert!(ab > 0.0);

        let mut scaled = a.clone();
        for set in [
            &mut scaled.s1_env_power,
            &mut scaled.s2_env_marginals,
            &mut scaled.s3_env_variance,
            &mut scaled.s4_env_corr,
            &mut scaled.s5_mod_power,
            &mut scaled.s6_mod_variance,
            &mut scaled.s7_mod_corr,
        ] {
            for v in set.iter_mut() {
                *v *= 2.0;
            }
        }
        assert!(cpm(&a, &scaled).unwrap().abs() < 1e-12);

        // orthogonalize one set, keep the rest equal: exactly 1.0
        let mut ortho = a.clone();
        let k = ortho.s1_env_power.len();
        for v in ortho.s1_env_power.iter_mut() {
            *v = 0.0;
        }
        // original s1 is non-negative (power); an orthogonal vector needs
        // zero dot product: put all mass on a new artificial direction
        ortho.s1_env_power[0] = 0.0;
        let mut base = a.clone();
        for v in base.s1_env_power.iter_mut() {
            *v = 0.0;
        }
        base.s1_env_power[0] = 1.0;
        ortho.s1_env_power = vec![0.0; k];
        ortho.s1_env_power[1] = 1.0;
        let d = cpm(&base, &ortho).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "cpm {d}");
    }

    #[test]
    fn stats_are_insensitive_to_circular_shift_on_stationary_noise() {
        let cfg = CochlearConfig::default();
        let clip = noise_clip(21, 2.0);
        let mut shifted = clip.samples().to_vec();
        let decim = (SR as f64 / cfg.envelope_rate_hz) as usize;
        shifted.rotate_left(25 * decim); // whole envelope-rate samples
        let shifted = AudioClip::new(shifted, SR).unwrap();

        let a = compute_stats(&clip, &cfg).unwrap();
        let b = compute_stats(&shifted, &cfg).unwrap();
        for (sa, sb) in a.sets().iter().zip(b.sets().iter()) {
            let na: f64 = sa.iter().map(|v| v * v).sum::<f64>().sqrt();
            let diff: f64 = sa
                .iter()
                .zip(sb.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            assert!(diff <= 0.02 * na.max(1e-12), "set shift error {}", diff / na);
        }
    }

    #[test]
    fn stats_json_round_trip() {
        let clip = noise_clip(3, 0.6);
        let stats = compute_stats(&clip, &CochlearConfig::default()).unwrap();
        let json = stats.to_json().unwrap();
        let back = CochlearStats::from_json(&json).unwrap();
        assert_eq!(stats.s7_mod_corr, back.s7_mod_corr);
        assert_eq!(stats.total_len(), back.total_len());
    }
}
