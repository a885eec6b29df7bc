//! Buzzing bees: four asymmetric-triangle voices with per-voice center
//! frequencies drawn from a Gaussian around `440 * 2^cf_exp`, micro frequency
//! variation from 14 Hz gradient noise scaled by `busybody` (in octaves), and
//! distance motion over `[2, 10]` m from 2 Hz gradient noise driving
//! inverse-square amplitude and a Doppler shift. The buzz is colored by two
//! fixed formant resonators.

use super::TextureSpec;
use crate::error::Result;
use crate::filters::biquad_bandpass;
use crate::noise::GradientNoise1D;

const NUM_VOICES: usize = 4;
const TRIANGLE_RISE: f64 = 0.3;
const CF_DRAW_SD_OCTAVES: f64 = 0.25;
const MICRO_NOISE_HZ: f64 = 14.0;
const MOTION_NOISE_HZ: f64 = 2.0;
const DISTANCE_MID_M: f64 = 6.0;
const DISTANCE_HALF_RANGE_M: f64 = 4.0;
const NEAREST_DISTANCE_M: f64 = 2.0;
const SPEED_OF_SOUND: f64 = 343.0;
const FORMANTS_HZ: [f64; 2] = [500.0, 1_500.0];
const FORMANT_Q: f64 = 5.0;
const FORMANT_MIX: f64 = 0.8;

/// Inverse-square amplitude, 1.0 at the nearest allowed distance.
fn distance_amplitude(d_m: f64) -> f64 {
    (NEAREST_DISTANCE_M / d_m) * (NEAREST_DISTANCE_M / d_m)
}

/// Asymmetric triangle wave over phase in [0, 1).
fn triangle(phase: f64, rise: f64) -> f64 {
    if phase < rise {
        -1.0 + 2.0 * phase / rise
    } else {
        1.0 - 2.0 * (phase - rise) / (1.0 - rise)
    }
}

/// Instantaneous frequency of one voice at time `t`.
fn voice_frequency(base_hz: f64, busybody: f64, micro: &GradientNoise1D, t: f64) -> f64 {
    base_hz * 2f64.powf(busybody * micro.sample(MICRO_NOISE_HZ * t))
}

pub fn render(spec: &TextureSpec) -> Result<Vec<f64>> {
    let cf_exp = spec.param("cf_exp");
    let busybody = spec.param("busybody");
    let motion = spec.param("motion");
    let sr = spec.sample_rate as f64;
    let n = spec.n_samples();

    let mut mix = vec![0.0; n];
    for voice in 0..NUM_VOICES {
        let mut vrng = spec.rng().child("bee-voice", voice as u64);
        let base_hz = 440.0 * 2f64.powf(vrng.normal_scaled(cf_exp, CF_DRAW_SD_OCTAVES));
        let start_phase = vrng.uniform(0.0, 1.0);
        let micro = GradientNoise1D::new(vrng.child("micro", 0).seed());
        let mover = GradientNoise1D::new(vrng.child("motion", 0).seed());

        let mut phase = start_phase;
        let mut prev_d = DISTANCE_MID_M + DISTANCE_HALF_RANGE_M * motion * mover.sample(0.0);
        for (i, slot) in mix.iter_mut().enumerate() {
            let t = i as f64 / sr;
            let d = DISTANCE_MID_M
                + DISTANCE_HALF_RANGE_M * motion * mover.sample(MOTION_NOISE_HZ * t);
            let radial_velocity = (d - prev_d) * sr;
            prev_d = d;
            let doppler = 1.0 - radial_velocity / SPEED_OF_SOUND;
            let f = voice_frequency(base_hz, busybody, &micro, t) * doppler;
            phase = (phase + f / sr).rem_euclid(1.0);
            *slot += distance_amplitude(d) * triangle(phase, TRIANGLE_RISE);
        }
    }

    // formant coloring: dry buzz plus two fixed resonators
    let mut out = mix.clone();
    for &fc in &FORMANTS_HZ {
        let colored = biquad_bandpass(&mix, fc, FORMANT_Q, spec.sample_rate)?;
        for (o, c) in out.iter_mut().zip(&colored) {
            *o += FORMANT_MIX * c;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{synthesize, TextureId, TextureSpec};
    use super::*;
    use crate::analysis::dominant_frequency;
    use std::collections::BTreeMap;

    fn bees_spec(overrides: &[(&str, f64)], seed: u64) -> TextureSpec {
        let map: BTreeMap<String, f64> = overrides
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        TextureSpec::new(TextureId::Bees, &map, 2.0, 16_000, seed).unwrap()
    }

    #[test]
    fn inverse_square_amplitude_contract() {
        let ratio = distance_amplitude(10.0) / distance_amplitude(2.0);
        assert!((ratio - 0.04).abs() < 1e-12);
        assert!((distance_amplitude(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_busybody_freezes_the_frequency_track() {
        let micro = GradientNoise1D::new(9);
        let f0 = voice_frequency(220.0, 0.0, &micro, 0.0);
        for k in 1..100 {
            let f = voice_frequency(220.0, 0.0, &micro, k as f64 * 0.01);
            assert_eq!(f, f0);
        }
        // nonzero busybody does vary
        let varied: Vec<f64> = (0..100)
            .map(|k| voice_frequency(220.0, 0.3, &micro, k as f64 * 0.01))
            .collect();
        assert!(varied.iter().any(|&f| (f - varied[0]).abs() > 0.1));
    }

    #[test]
    fn frozen_swarm_buzzes_near_the_drawn_center() {
        // cf_exp = -1 -> mean 220 Hz; average the dominant partial over seeds
        let mut measured = Vec::new();
        for seed in 0..30 {
            let clip = synthesize(&bees_spec(
                &[("cf_exp", -1.0), ("busybody", 0.0), ("motion", 0.0)],
                seed,
            ))
            .unwrap();
            measured.push(dominant_frequency(&clip, 2048, 512).unwrap());
        }
        let mean = measured.iter().sum::<f64>() / measured.len() as f64;
        assert!(
            (mean - 220.0).abs() <= 0.15 * 220.0,
            "mean dominant {mean} from {measured:?}"
        );
    }

    #[test]
    fn triangle_wave_shape() {
        assert!((triangle(0.0, 0.3) + 1.0).abs() < 1e-12);
        assert!((triangle(0.3, 0.3) - 1.0).abs() < 1e-12);
        assert!((triangle(1.0 - 1e-12, 0.3) + 1.0).abs() < 1e-6);
        // rising segment is steeper than the fall for rise < 0.5
        let rise_slope = (triangle(0.15, 0.3) - triangle(0.0, 0.3)) / 0.15;
        let fall_slope = (triangle(0.9, 0.3) - triangle(0.3, 0.3)) / 0.6;
        assert!(rise_slope > fall_slope.abs());
    }
}
