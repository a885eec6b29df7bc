//! Synthesis constants that are not controlled by texture parameters.
//!
//! Everything here has a sensible embedded default and can be overridden
//! from a JSON file (partial overrides are fine; omitted fields keep their
//! defaults).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Chime modal table and tuning.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ChimeConfig {
    /// Partial frequency ratios of one chime (free-bar transverse modes).
    pub modal_ratios: Vec<f64>,
    /// Partial amplitudes.
    pub modal_amps: Vec<f64>,
    /// Partial decay time constants in seconds.
    pub modal_decays_s: Vec<f64>,
    /// Fundamental of the lowest chime before size scaling, Hz.
    pub base_hz: f64,
    /// Relative tuning of the five tubes (pentatonic).
    pub tube_ratios: Vec<f64>,
    /// Level of the wind bed mixed under windchimes.
    pub wind_bed_gain: f64,
}

impl Default for ChimeConfig {
    fn default() -> Self {
        ChimeConfig {
            modal_ratios: vec![1.0, 2.76, 5.40, 8.93, 13.34],
            modal_amps: vec![1.0, 0.6, 0.4, 0.25, 0.15],
            modal_decays_s: vec![1.2, 0.9, 0.7, 0.5, 0.4],
            base_hz: 523.0,
            tube_ratios: vec![1.0, 1.125, 1.25, 1.5, 1.6875],
            wind_bed_gain: 0.35,
        }
    }
}

/// Schroeder reverberator constants used by the applause texture.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ReverbConfig {
    /// Parallel comb delays in milliseconds.
    pub comb_delays_ms: Vec<f64>,
    /// Comb feedback gain.
    pub comb_feedback: f64,
    /// Series allpass delays in milliseconds.
    pub allpass_delays_ms: Vec<f64>,
    /// Allpass gain.
    pub allpass_gain: f64,
}

impl Default for ReverbConfig {
    fn default() -> Self {
        ReverbConfig {
            comb_delays_ms: vec![29.7, 37.1, 41.1, 43.7],
            comb_feedback: 0.805,
            allpass_delays_ms: vec![5.0, 1.7],
            allpass_gain: 0.7,
        }
    }
}

/// Chirp rendering constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ChirpConfig {
    /// Event duration in seconds.
    pub duration_s: f64,
    /// Upward sweep range in octaves over one event.
    pub excursion_octaves: f64,
    /// Amplitudes of the harmonics at 1x, 2x, ... the fundamental.
    pub harmonic_amps: Vec<f64>,
}

impl Default for ChirpConfig {
    fn default() -> Self {
        ChirpConfig {
            duration_s: 0.08,
            excursion_octaves: 0.5,
            harmonic_amps: vec![1.0, 0.5],
        }
    }
}

/// All overridable synthesis constants.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub chimes: ChimeConfig,
    pub reverb: ReverbConfig,
    pub chirp: ChirpConfig,
}

impl SynthConfig {
    /// Load overrides from a JSON file on top of the defaults.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
