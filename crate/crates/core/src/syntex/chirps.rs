//! Chirp texture: scheduled tone events whose log2-frequency moves linearly
//! upward across each event. Center frequencies are drawn from a Gaussian
//! (in octaves) around `440 * 2^cf_exp`; event timing comes from the shared
//! irregularity scheduler at `2^rate_exp` events per second.

use std::f64::consts::TAU;

use super::config::SynthConfig;
use super::scheduler::schedule_events;
use super::TextureSpec;
use crate::error::Result;

const CF_DRAW_SD_OCTAVES: f64 = 0.25;

/// Render one chirp: fundamental sweeping `excursion` octaves (centered on
/// `center_hz` at the midpoint), harmonics per config, Hann-windowed.
fn render_chirp(
    center_hz: f64,
    duration_s: f64,
    excursion_octaves: f64,
    harmonic_amps: &[f64],
    sr: f64,
) -> Vec<f64> {
    let n = (duration_s * sr) as usize;
    let log2_center = center_hz.log2();
    let mut out = vec![0.0; n];
    for (h, &amp) in harmonic_amps.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let mult = (h + 1) as f64;
        let mut phase = 0.0;
        for (i, slot) in out.iter_mut().enumerate() {
            let frac = i as f64 / n as f64;
            let f = mult * 2f64.powf(log2_center + excursion_octaves * (frac - 0.5));
            if f < 0.49 * sr {
                phase += TAU * f / sr;
                let window = 0.5 - 0.5 * (TAU * frac).cos();
                *slot += amp * window * phase.sin();
            }
        }
    }
    out
}

pub fn render(spec: &TextureSpec, config: &SynthConfig) -> Result<Vec<f64>> {
    let cf_exp = spec.param("cf_exp");
    let irreg_exp = spec.param("irreg_exp");
    let eps = 2f64.powf(spec.param("rate_exp"));
    let sr = spec.sample_rate as f64;
    let n = spec.n_samples();
    let cfg = &config.chirp;

    let mut sched_rng = spec.rng().child("chirp-schedule", 0);
    let schedule = schedule_events(eps, irreg_exp, spec.duration_s, &mut sched_rng)?;

    let mut out = vec![0.0; n];
    let mut draw_rng = spec.rng().child("chirp-centers", 0);
    for &onset in &schedule.onsets {
        let center = 440.0 * 2f64.powf(draw_rng.normal_scaled(cf_exp, CF_DRAW_SD_OCTAVES));
        let chirp = render_chirp(
            center,
            cfg.duration_s,
            cfg.excursion_octaves,
            &cfg.harmonic_amps,
            sr,
        );
        let at = (onset * sr).round() as usize;
        for (i, &v) in chirp.iter().enumerate() {
            if at + i < n {
                out[at + i] += v;
            }
        }
    }
    Ok(out)
}
