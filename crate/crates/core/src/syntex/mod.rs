//! Procedural synthesis of parametric audio textures.
//!
//! Ten texture families, each controlled by a small set of named parameters
//! with documented ranges and defaults. Every synthesizer is a pure function
//! of `(TextureSpec, seed)`: the clip is rendered at the spec's sample rate,
//! peak-normalized to 0.9, and bounded in `[-1, 1]`.

mod applause;
mod bees;
mod chimes;
mod chirps;
pub mod config;
pub mod corpus;
mod fbnoise;
mod fm;
mod pops;
pub mod scheduler;
mod tapping;
mod wind;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub use config::SynthConfig;
pub use corpus::{render_corpus, CorpusRequest, ManifestEntry, SweepManifest};
pub use scheduler::{onset_jitter_sd, schedule_events, schedule_events_raw, EventSchedule};

/// Peak level every rendered clip is normalized to.
pub const RENDER_PEAK: f64 = 0.9;

/// The texture families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextureId {
    Fm,
    Wind,
    Windchimes,
    Chimes,
    Tapping,
    Bees,
    Chirps,
    Fbnoise,
    Pops,
    Applause,
}

impl TextureId {
    pub const ALL: [TextureId; 10] = [
        TextureId::Fm,
        TextureId::Wind,
        TextureId::Windchimes,
        TextureId::Chimes,
        TextureId::Tapping,
        TextureId::Bees,
        TextureId::Chirps,
        TextureId::Fbnoise,
        TextureId::Pops,
        TextureId::Applause,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TextureId::Fm => "fm",
            TextureId::Wind => "wind",
            TextureId::Windchimes => "windchimes",
            TextureId::Chimes => "chimes",
            TextureId::Tapping => "tapping",
            TextureId::Bees => "bees",
            TextureId::Chirps => "chirps",
            TextureId::Fbnoise => "fbnoise",
            TextureId::Pops => "pops",
            TextureId::Applause => "applause",
        }
    }
}

impl fmt::Display for TextureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TextureId::ALL
            .iter()
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| {
                let valid: Vec<&str> = TextureId::ALL.iter().map(|t| t.name()).collect();
                Error::invalid(format!(
                    "unknown texture '{s}'; valid ids: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Declaration of one control parameter: default value, the range accepted
/// by validation, and the range a corpus sweep covers.
#[derive(Debug, Clone, Copy)]
pub struct ParamDef {
    pub name: &'static str,
    pub default: f64,
    pub valid: (f64, f64),
    pub sweep: (f64, f64),
}

const fn param(name: &'static str, default: f64, valid: (f64, f64), sweep: (f64, f64)) -> ParamDef {
    ParamDef {
        name,
        default,
        valid,
        sweep,
    }
}

// validation admits fm.mi down to 0 for degenerate-limit probes; sweeps use
// the documented range
const FM_PARAMS: &[ParamDef] = &[
    param("cf_exp", 0.5, (0.2, 0.8), (0.2, 0.8)),
    param("mf", 10.0, (0.0, 20.0), (0.0, 20.0)),
    param("mi", 12.5, (0.0, 20.0), (5.0, 20.0)),
];
const WIND_PARAMS: &[ParamDef] = &[
    param("strength", 0.5, (0.0, 1.0), (0.0, 1.0)),
    param("gustiness", 0.5, (0.0, 1.0), (0.0, 1.0)),
    param("howliness", 0.75, (0.0, 1.0), (0.0, 1.0)),
];
const CHIME_PARAMS: &[ParamDef] = &[
    param("strength", 0.5, (0.2, 0.8), (0.2, 0.8)),
    param("chime_size", 0.5, (0.2, 0.8), (0.2, 0.8)),
];
const TAPPING_PARAMS: &[ParamDef] = &[
    param("rate_exp", 2.0, (0.5, 2.0), (0.5, 2.0)),
    param("phase_rel", 0.3, (0.2, 0.4), (0.2, 0.4)),
];
// motion depth 0 freezes the swarm mid-range
const BEES_PARAMS: &[ParamDef] = &[
    param("cf_exp", -1.0, (-2.0, 0.0), (-2.0, 0.0)),
    param("busybody", 0.25, (0.0, 0.5), (0.0, 0.5)),
    param("motion", 1.0, (0.0, 1.0), (0.0, 1.0)),
];
const CHIRPS_PARAMS: &[ParamDef] = &[
    param("cf_exp", 0.5, (0.0, 1.0), (0.0, 1.0)),
    param("rate_exp", 2.0, (1.0, 3.0), (1.0, 3.0)),
    param("irreg_exp", 0.0, (0.0, 1.0), (0.0, 1.0)),
];
const FBNOISE_PARAMS: &[ParamDef] = &[
    param("pitchedness", 0.5, (0.0, 0.95), (0.0, 0.95)),
    param("cf_exp", 0.0, (-1.0, 3.0), (-1.0, 3.0)),
];
const POPS_PARAMS: &[ParamDef] = &[
    param("cf", 630.0, (540.0, 720.0), (540.0, 720.0)),
    param("rate_exp", 4.0, (3.0, 4.0), (3.0, 4.0)),
    param("irreg_exp", 0.0, (0.0, 0.66), (0.33, 0.66)),
];
const APPLAUSE_PARAMS: &[ParamDef] = &[
    param("num_clappers_exp", 2.0, (1.0, 3.0), (1.0, 3.0)),
    param("rate_exp", 2.0, (1.0, 2.0), (1.0, 2.0)),
    param("reverb", 0.3, (0.0, 1.0), (0.0, 1.0)),
];

impl TextureId {
    /// Control parameters of this texture.
    pub fn params(&self) -> &'static [ParamDef] {
        match self {
            TextureId::Fm => FM_PARAMS,
            TextureId::Wind => WIND_PARAMS,
            TextureId::Windchimes | TextureId::Chimes => CHIME_PARAMS,
            TextureId::Tapping => TAPPING_PARAMS,
            TextureId::Bees => BEES_PARAMS,
            TextureId::Chirps => CHIRPS_PARAMS,
            TextureId::Fbnoise => FBNOISE_PARAMS,
            TextureId::Pops => POPS_PARAMS,
            TextureId::Applause => APPLAUSE_PARAMS,
        }
    }

    pub fn param_def(&self, name: &str) -> Result<&'static ParamDef> {
        self.params()
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| {
                let valid: Vec<&str> = self.params().iter().map(|p| p.name).collect();
                Error::invalid(format!(
                    "texture '{self}' has no parameter '{name}'; valid: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// A fully resolved synthesis request: texture, parameter values (validated
/// against their ranges, defaults filled in), duration, rate, and seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextureSpec {
    pub texture: TextureId,
    pub params: BTreeMap<String, f64>,
    pub duration_s: f64,
    pub sample_rate: u32,
    pub seed: u64,
}

impl TextureSpec {
    pub fn new(
        texture: TextureId,
        overrides: &BTreeMap<String, f64>,
        duration_s: f64,
        sample_rate: u32,
        seed: u64,
    ) -> Result<Self> {
        if !(duration_s > 0.05) {
            return Err(Error::invalid(format!("duration {duration_s}s too short")));
        }
        if sample_rate < 4_000 {
            return Err(Error::invalid(format!("sample rate {sample_rate} too low")));
        }
        let mut params = BTreeMap::new();
        for def in texture.params() {
            params.insert(def.name.to_string(), def.default);
        }
        for (name, &value) in overrides {
            let def = texture.param_def(name)?;
            if !(value >= def.valid.0 && value <= def.valid.1) {
                return Err(Error::invalid(format!(
                    "{texture}.{name} = {value} outside [{}, {}]",
                    def.valid.0, def.valid.1
                )));
            }
            params.insert(name.clone(), value);
        }
        Ok(TextureSpec {
            texture,
            params,
            duration_s,
            sample_rate,
            seed,
        })
    }

    /// Convenience: a spec with defaults only.
    pub fn with_defaults(
        texture: TextureId,
        duration_s: f64,
        sample_rate: u32,
        seed: u64,
    ) -> Result<Self> {
        TextureSpec::new(texture, &BTreeMap::new(), duration_s, sample_rate, seed)
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate as f64).round() as usize
    }

    pub fn rng(&self) -> SeededRng {
        SeededRng::new(self.seed)
    }
}

/// Render a clip from a spec with the default synthesis constants.
pub fn synthesize(spec: &TextureSpec) -> Result<AudioClip> {
    synthesize_with(spec, &SynthConfig::default())
}

/// Render a clip from a spec with explicit synthesis constants.
pub fn synthesize_with(spec: &TextureSpec, config: &SynthConfig) -> Result<AudioClip> {
    let raw = match spec.texture {
        TextureId::Fm => fm::render(spec)?,
        TextureId::Wind => wind::render(spec)?,
        TextureId::Windchimes => chimes::render(spec, config, true)?,
        TextureId::Chimes => chimes::render(spec, config, false)?,
        TextureId::Tapping => tapping::render(spec)?,
        TextureId::Bees => bees::render(spec)?,
        TextureId::Chirps => chirps::render(spec, config)?,
        TextureId::Fbnoise => fbnoise::render(spec)?,
        TextureId::Pops => pops::render(spec)?,
        TextureId::Applause => applause::render(spec, config)?,
    };
    Ok(AudioClip::new(raw, spec.sample_rate)?.peak_normalized(RENDER_PEAK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_texture_lists_valid_ids() {
        let err = TextureId::from_str("rain").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("fbnoise"), "{msg}");
        assert!(msg.contains("applause"), "{msg}");
    }

    #[test]
    fn defaults_fill_in_and_ranges_enforce() {
        let spec = TextureSpec::with_defaults(TextureId::Fm, 2.0, 16_000, 1).unwrap();
        assert_eq!(spec.param("mf"), 10.0);
        assert_eq!(spec.param("mi"), 12.5);
        assert_eq!(spec.param("cf_exp"), 0.5);

        let mut bad = BTreeMap::new();
        bad.insert("mf".to_string(), 30.0);
        assert!(TextureSpec::new(TextureId::Fm, &bad, 2.0, 16_000, 1).is_err());

        let mut unknown = BTreeMap::new();
        unknown.insert("nope".to_string(), 1.0);
        assert!(TextureSpec::new(TextureId::Fm, &unknown, 2.0, 16_000, 1).is_err());
    }

    #[test]
    fn every_texture_renders_in_range_and_deterministically() {
        for texture in TextureId::ALL {
            let spec = TextureSpec::with_defaults(texture, 1.5, 16_000, 77).unwrap();
            let a = synthesize(&spec).unwrap();
            let b = synthesize(&spec).unwrap();
            assert_eq!(a.samples(), b.samples(), "{texture} not deterministic");
            assert!(
                a.samples().iter().all(|s| s.abs() <= 1.0 && s.is_finite()),
                "{texture} out of range"
            );
            let peak = a.samples().iter().fold(0.0f64, |m, s| m.max(s.abs()));
            assert!((peak - RENDER_PEAK).abs() < 1e-9, "{texture} peak {peak}");
        }
    }

    #[test]
    fn different_seeds_give_different_instances() {
        for texture in TextureId::ALL {
            let a = synthesize(&TextureSpec::with_defaults(texture, 1.5, 16_000, 1).unwrap())
                .unwrap();
            let b = synthesize(&TextureSpec::with_defaults(texture, 1.5, 16_000, 2).unwrap())
                .unwrap();
            assert_ne!(a.samples(), b.samples(), "{texture} ignores the seed");
        }
    }
}
