//! Tapping texture: two taps per cycle at `cycle_rate = 2^rate_exp` cycles
//! per second, the second tap at `phase_rel` of the way through the cycle.
//! Taps are 2 ms noise bursts through a 1.2 kHz bandpass.

use super::TextureSpec;
use crate::error::Result;
use crate::filters::Biquad;
use crate::noise::uniform_noise;

const TAP_BURST_S: f64 = 0.002;
const TAP_FILTER_HZ: f64 = 1_200.0;
const TAP_FILTER_Q: f64 = 8.0;
/// Render window per tap; the q=8 ring fully decays well inside this.
const TAP_RENDER_SAMPLES: usize = 1_024;

fn render_tap(rng: &mut crate::rng::SeededRng, sr: u32) -> Result<Vec<f64>> {
    let burst_len = (TAP_BURST_S * sr as f64).round() as usize;
    let mut excitation = uniform_noise(burst_len, rng);
    excitation.resize(TAP_RENDER_SAMPLES, 0.0);
    let mut bp = Biquad::bandpass(TAP_FILTER_HZ, TAP_FILTER_Q, sr)?;
    Ok(bp.process(&excitation))
}

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let cycle_rate = 2f64.powf(spec.param("rate_exp"));
    let phase_rel = spec.param("phase_rel");
    let sr = spec.sample_rate;
    let n = spec.n_samples();
    let period = 1.0 / cycle_rate;

    let mut out = vec![0.0; n];
    let mut rng = spec.rng().child("taps", 0);
    let mut cycle = 0usize;
    loop {
        let cycle_start = cycle as f64 * period;
        if cycle_start >= spec.duration_s {
            break;
        }
        for tap_time in [cycle_start, cycle_start + phase_rel * period] {
            if tap_time >= spec.duration_s {
                continue;
            }
            let tap = render_tap(&mut rng, sr)?;
            let at = (tap_time * sr as f64).round() as usize;
            for (i, &v) in tap.iter().enumerate() {
                if at + i < n {
                    out[at + i] += v;
                }
            }
        }
        cycle += 1;
    }
    Ok(out)
}
