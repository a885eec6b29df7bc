//! Shared fixtures for the criterion benchmarks.

use texmet::audio::AudioClip;
use texmet::noise::uniform_noise;
use texmet::rng::SeededRng;

/// A reproducible noise clip of the given duration at 16 kHz.
pub fn bench_clip(seconds: f64, seed: u64) -> AudioClip {
    let sr = 16_000u32;
    let mut rng = SeededRng::new(seed);
    AudioClip::new(uniform_noise((seconds * sr as f64) as usize, &mut rng), sr)
        .unwrap()
        .peak_normalized(0.9)
}
