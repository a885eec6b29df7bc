//! Feedback-delay comb noise: uniform white noise through
//! `y[n] = (1-alpha) x[n] + alpha y[n-K]`, with `K = sr / (220 * 2^cf_exp)`
//! rounded to the nearest integer and `alpha = 1 - 2^(-4 * pitchedness)`.
//! Pitchedness 0 passes the noise through; approaching 1 narrows the comb
//! peaks into an increasingly pitched tone.

use super::TextureSpec;
use crate::error::{Error, Result};
use crate::noise::uniform_noise;

/// The comb recursion itself, exposed for direct testing.
pub fn comb_filter(xs: &[f64], alpha: f64, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; xs.len()];
    for i in 0..xs.len() {
        let fed_back = if i >= k { out[i - k] } else { 0.0 };
        out[i] = (1.0 - alpha) * xs[i] + alpha * fed_back;
    }
    out
}

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let pitchedness = spec.param("pitchedness");
    let cf_exp = spec.param("cf_exp");
    let sr = spec.sample_rate as f64;

    let k = (sr / (220.0 * 2f64.powf(cf_exp))).round();
    if k < 1.0 {
        return Err(Error::invalid(format!(
            "delay of {k} samples; cf_exp {cf_exp} too high for sr {sr}"
        )));
    }
    let alpha = 1.0 - 2f64.powf(-4.0 * pitchedness);
    let mut rng = spec.rng().child("fbnoise", 0);
    let noise = uniform_noise(spec.n_samples(), &mut rng);
    Ok(comb_filter(&noise, alpha, k as usize))
}
