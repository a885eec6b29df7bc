//! Pops: scheduled 3-sample noise bursts through a narrow bandpass whose
//! center frequency is drawn per event from a Gaussian around `cf` with a
//! standard deviation of one musical semitone.

use super::scheduler::schedule_events;
use super::TextureSpec;
use crate::error::Result;
use crate::filters::Biquad;
use crate::noise::uniform_noise;
use crate::rng::SeededRng;

const BURST_SAMPLES: usize = 3;
const POP_Q: f64 = 30.0;
/// Render window per pop; the q=30 ring decays ~60 dB inside this.
const POP_RENDER_SAMPLES: usize = 4_096;

/// One pop at an explicit center frequency.
fn render_pop(center_hz: f64, rng: &mut SeededRng, sr: u32) -> Result<Vec<f64>> {
    let mut excitation = uniform_noise(BURST_SAMPLES, rng);
    excitation.resize(POP_RENDER_SAMPLES, 0.0);
    let mut bp = Biquad::bandpass(center_hz, POP_Q, sr)?;
    Ok(bp.process(&excitation))
}

/// Center frequency draw: `cf * 2^(z/12)` with `z` standard normal.
fn draw_center(cf: f64, rng: &mut SeededRng) -> f64 {
    cf * 2f64.powf(rng.normal() / 12.0)
}

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let cf = spec.param("cf");
    let eps = 2f64.powf(spec.param("rate_exp"));
    let irreg_exp = spec.param("irreg_exp");
    let sr = spec.sample_rate;
    let n = spec.n_samples();

    let mut sched_rng = spec.rng().child("pop-schedule", 0);
    let schedule = schedule_events(eps, irreg_exp, spec.duration_s, &mut sched_rng)?;

    let mut out = vec![0.0; n];
    let mut pop_rng = spec.rng().child("pop-render", 0);
    for &onset in &schedule.onsets {
        let center = draw_center(cf, &mut pop_rng);
        let pop = render_pop(center, &mut pop_rng, sr)?;
        let at = (onset * sr as f64).round() as usize;
        for (i, &v) in pop.iter().enumerate() {
            if at + i < n {
                out[at + i] += v;
            }
        }
    }
    Ok(out)
}
