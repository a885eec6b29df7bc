//! Frequency modulation texture: a carrier at `330 * 2^cf_exp` Hz phase-
//! modulated by a sinusoid at `mf` Hz with index `mi`. Versions differ by
//! the random start phases of carrier and modulator.

use std::f64::consts::TAU;

use super::TextureSpec;
use crate::error::Result;

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let cf = 330.0 * 2f64.powf(spec.param("cf_exp"));
    let mf = spec.param("mf");
    let mi = spec.param("mi");
    let sr = spec.sample_rate as f64;

    let mut rng = spec.rng().child("fm-phase", 0);
    let carrier_phase = rng.uniform(0.0, TAU);
    let mod_phase = rng.uniform(0.0, TAU);

    Ok((0..spec.n_samples())
        .map(|i| {
            let t = i as f64 / sr;
            (TAU * cf * t + carrier_phase + mi * (TAU * mf * t + mod_phase).sin()).sin()
        })
        .collect())
}
