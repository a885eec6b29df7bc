//! Windchime textures: five tuned chimes, each a sum of five exponentially
//! decaying partials, struck at the zero crossings of its own slow gradient-
//! noise signal with amplitude proportional to the signal's derivative at the
//! crossing. `windchimes` mixes a wind bed underneath; `chimes` is dry.
//!
//! All chime frequencies are scaled by `4 * chime_size`; partials that land
//! at or above Nyquist are dropped.

use std::f64::consts::TAU;

use super::config::SynthConfig;
use super::{wind, TextureSpec};
use crate::error::Result;
use crate::noise::GradientNoise1D;

/// Control-rate sampling of the trigger signal.
const TRIGGER_RATE_HZ: f64 = 400.0;

/// Zero crossings of a chime's trigger signal: `(time_s, |derivative|)` with
/// the derivative in lattice units of the noise.
fn trigger_points(
    noise: &GradientNoise1D,
    simplex_freq: f64,
    duration: f64,
) -> Vec<(f64, f64)> {
    if simplex_freq <= 0.0 {
        return vec![];
    }
    let dt = 1.0 / TRIGGER_RATE_HZ;
    let n = (duration * TRIGGER_RATE_HZ) as usize;
    let mut out = Vec::new();
    let mut prev = noise.sample(0.0);
    for k in 1..n {
        let t = k as f64 * dt;
        let cur = noise.sample(simplex_freq * t);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let slope_lattice = (cur - prev) / (simplex_freq * dt);
            out.push((t, slope_lattice.abs()));
        }
        prev = cur;
    }
    out
}

pub fn render(spec: &TextureSpec, config: &SynthConfig, wind_bed: bool) -> Result<Vec<f64>> {
    let strength = spec.param("strength");
    let chime_size = spec.param("chime_size");
    let sr = spec.sample_rate as f64;
    let n = spec.n_samples();
    let nyquist = sr / 2.0;

    let scale_factor = 4.0 * chime_size;
    let simplex_freq = 3.0 * strength;
    let cfg = &config.chimes;

    let mut out = vec![0.0; n];
    for (tube, &tube_ratio) in cfg.tube_ratios.iter().enumerate() {
        let noise = GradientNoise1D::new(spec.rng().child("chime", tube as u64).seed());
        for (t0, amp) in trigger_points(&noise, simplex_freq, spec.duration_s) {
            let start = (t0 * sr) as usize;
            for p in 0..cfg.modal_ratios.len() {
                let freq = cfg.base_hz * tube_ratio * scale_factor * cfg.modal_ratios[p];
                if freq >= 0.98 * nyquist {
                    continue;
                }
                let tau = cfg.modal_decays_s[p];
                let gain = amp * cfg.modal_amps[p];
                // render until the partial has decayed 80 dB
                let len = ((tau * 9.2 * sr) as usize).min(n - start);
                for i in 0..len {
                    let t = i as f64 / sr;
                    out[start + i] += gain * (-t / tau).exp() * (TAU * freq * t).sin();
                }
            }
        }
    }

    if wind_bed {
        let mut bed_spec = spec.clone();
        bed_spec.texture = super::TextureId::Wind;
        bed_spec.params.clear();
        bed_spec.params.insert("strength".into(), strength);
        bed_spec.params.insert("gustiness".into(), 0.5);
        bed_spec.params.insert("howliness".into(), 0.75);
        bed_spec.seed = spec.rng().child("wind-bed", 0).seed();
        let bed = wind::render(&bed_spec)?;
        let bed_peak = bed.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let chime_peak = out.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // bed level relative to the chime track, so muted chimes still leave wind
        let gain = if bed_peak > 0.0 {
            cfg.wind_bed_gain * chime_peak.max(1.0) / bed_peak
        } else {
            0.0
        };
        for (o, b) in out.iter_mut().zip(&bed) {
            *o += gain * b;
        }
    }
    Ok(out)
}
