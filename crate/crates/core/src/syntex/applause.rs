//! Applause: `2^num_clappers_exp` independent clappers, each producing
//! 45-sample noise bursts through a bandpass with a per-clap center drawn
//! uniformly from [800, 1400] Hz, at normally distributed inter-clap
//! intervals around `1 / 2^rate_exp` seconds. A Schroeder reverberator adds
//! the room; `reverb` sets the wet fraction.

use super::config::{ReverbConfig, SynthConfig};
use super::TextureSpec;
use crate::error::Result;
use crate::filters::Biquad;
use crate::noise::uniform_noise;
use crate::rng::SeededRng;

/// Burst length of one clap before filtering.
pub const CLAP_BURST_SAMPLES: usize = 45;
const CLAP_Q: f64 = 30.0;
const CLAP_RENDER_SAMPLES: usize = 2_048;
/// Inter-clap jitter as a fraction of the mean interval.
const INTERVAL_JITTER: f64 = 0.1;

fn render_clap(center_hz: f64, rng: &mut SeededRng, sr: u32) -> Result<Vec<f64>> {
    let mut excitation = uniform_noise(CLAP_BURST_SAMPLES, rng);
    excitation.resize(CLAP_RENDER_SAMPLES, 0.0);
    let mut bp = Biquad::bandpass(center_hz, CLAP_Q, sr)?;
    Ok(bp.process(&excitation))
}

/// Schroeder reverberator: parallel feedback combs into series allpasses.
fn schroeder_reverb(xs: &[f64], cfg: &ReverbConfig, sr: u32) -> Vec<f64> {
    let n = xs.len();
    let mut wet = vec![0.0; n];
    for &delay_ms in &cfg.comb_delays_ms {
        let d = ((delay_ms / 1000.0) * sr as f64).round().max(1.0) as usize;
        let mut buf = vec![0.0; n];
        for i in 0..n {
            let fed = if i >= d { buf[i - d] } else { 0.0 };
            buf[i] = xs[i] + cfg.comb_feedback * fed;
        }
        for (w, b) in wet.iter_mut().zip(&buf) {
            *w += b / cfg.comb_delays_ms.len() as f64;
        }
    }
    for &delay_ms in &cfg.allpass_delays_ms {
        let d = ((delay_ms / 1000.0) * sr as f64).round().max(1.0) as usize;
        let g = cfg.allpass_gain;
        let mut buf = vec![0.0; n];
        for i in 0..n {
            let delayed_in = if i >= d { wet[i - d] } else { 0.0 };
            let delayed_out = if i >= d { buf[i - d] } else { 0.0 };
            buf[i] = -g * wet[i] + delayed_in + g * delayed_out;
        }
        wet = buf;
    }
    wet
}

pub fn render(spec: &TextureSpec, config: &SynthConfig) -> Result<Vec<f64>> {
    let n_clappers = 2f64.powf(spec.param("num_clappers_exp")).round() as usize;
    let eps = 2f64.powf(spec.param("rate_exp"));
    let wet = spec.param("reverb");
    let sr = spec.sample_rate;
    let n = spec.n_samples();
    let mean_interval = 1.0 / eps;

    let mut dry = vec![0.0; n];
    for clapper in 0..n_clappers {
        let mut rng = spec.rng().child("clapper", clapper as u64);
        let mut t = rng.uniform(0.0, mean_interval);
        while t < spec.duration_s {
            let center = rng.uniform(800.0, 1_400.0);
            let clap = render_clap(center, &mut rng, sr)?;
            let at = (t * sr as f64).round() as usize;
            for (i, &v) in clap.iter().enumerate() {
                if at + i < n {
                    dry[at + i] += v;
                }
            }
            let interval = rng
                .normal_scaled(mean_interval, INTERVAL_JITTER * mean_interval)
                .max(0.25 * mean_interval);
            t += interval;
        }
    }

    if wet == 0.0 {
        return Ok(dry);
    }
    let reverbed = schroeder_reverb(&dry, &config.reverb, sr);
    Ok(dry
        .iter()
        .zip(&reverbed)
        .map(|(d, r)| (1.0 - wet) * d + wet * r)
        .collect())
}
