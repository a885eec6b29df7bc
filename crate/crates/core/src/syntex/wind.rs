//! Wind texture: lowpassed white noise through a bandpass whose center
//! frequency and gain drift with a slow gradient-noise signal.
//!
//! `average_cf = 180 + 440 * strength`, instantaneous
//! `cf = average_cf * 2^(0.45 * s(t))` with `s` gradient noise at
//! `3 * gustiness` Hz, bandpass `Q = 0.5 + 40 * howliness`, output gain
//! `(1 + s(t)) / 2`. Filter coefficients are refreshed every 64 samples.

use super::TextureSpec;
use crate::error::Result;
use crate::filters::{lowpass_n, Biquad};
use crate::noise::{gaussian_noise, GradientNoise1D};

const COEFF_UPDATE_SAMPLES: usize = 64;

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let strength = spec.param("strength");
    let gustiness = spec.param("gustiness");
    let howliness = spec.param("howliness");
    let sr = spec.sample_rate;
    let n = spec.n_samples();

    let average_cf = 180.0 + 440.0 * strength;
    let q = 0.5 + 40.0 * howliness;
    let simplex_freq = 3.0 * gustiness;

    let mut noise_rng = spec.rng().child("wind-noise", 0);
    let bed = lowpass_n(&gaussian_noise(n, &mut noise_rng), 400.0, 5, sr)?;

    let gusts = GradientNoise1D::new(spec.rng().child("wind-gust", 0).seed());
    let mut bp = Biquad::bandpass(average_cf, q, sr)?;
    let mut out = Vec::with_capacity(n);
    for (i, &x) in bed.iter().enumerate() {
        let s = gusts.sample(simplex_freq * i as f64 / sr as f64);
        if i % COEFF_UPDATE_SAMPLES == 0 {
            bp.retune_bandpass(average_cf * 2f64.powf(0.45 * s), q, sr);
        }
        out.push(bp.tick(x) * (1.0 + s) / 2.0);
    }
    Ok(out)
}
