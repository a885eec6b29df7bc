//! Parameter-sweep corpus rendering and the manifest that describes it.
//!
//! A sweep renders `n_values` linearly spaced settings of one control
//! parameter, times `n_versions` re-renderings that differ only in seed.
//! Files land in `<out_dir>/<texture>-<param>/v<version>/p<value_index>.wav`
//! with a `manifest.json` beside the version directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{synthesize_with, SynthConfig, TextureId, TextureSpec};
use crate::audio::{save_wav, AudioClip, WavEncoding};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// One rendered file of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the manifest's directory.
    pub path: String,
    pub value_index: usize,
    pub version: usize,
    pub seed: u64,
}

/// Description of a rendered (or ingested) parameter-sweep corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepManifest {
    pub texture_id: String,
    pub swept_param: String,
    pub param_min: f64,
    pub param_max: f64,
    pub n_values: usize,
    pub n_versions: usize,
    pub sample_rate: u32,
    pub duration_s: f64,
    pub base_seed: u64,
    pub files: Vec<ManifestEntry>,
    /// Directory the relative paths resolve against; set on load/save.
    #[serde(skip)]
    pub root: PathBuf,
}

impl SweepManifest {
    /// Swept value at a given index (linear spacing, index 0 at the minimum).
    pub fn param_value(&self, value_index: usize) -> f64 {
        if self.n_values <= 1 {
            return self.param_min;
        }
        self.param_min
            + (self.param_max - self.param_min) * value_index as f64 / (self.n_values - 1) as f64
    }

    pub fn entry(&self, value_index: usize, version: usize) -> Result<&ManifestEntry> {
        self.files
            .iter()
            .find(|f| f.value_index == value_index && f.version == version)
            .ok_or_else(|| {
                Error::Manifest(format!(
                    "no entry for value {value_index} version {version}"
                ))
            })
    }

    /// Absolute path of an entry's WAV file.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    pub fn load_clip(&self, value_index: usize, version: usize) -> Result<AudioClip> {
        crate::audio::load_wav(self.resolve(self.entry(value_index, version)?))
    }

    /// Check structural invariants: every `(value, version)` pair present
    /// exactly once and every referenced file on disk.
    pub fn validate(&self) -> Result<()> {
        if self.n_values < 2 {
            return Err(Error::Manifest("manifest needs at least 2 values".into()));
        }
        let mut seen = vec![false; self.n_values * self.n_versions];
        for f in &self.files {
            if f.value_index >= self.n_values || f.version >= self.n_versions {
                return Err(Error::Manifest(format!(
                    "entry {} has out-of-range indices ({}, {})",
                    f.path, f.value_index, f.version
                )));
            }
            let slot = f.value_index * self.n_versions + f.version;
            if seen[slot] {
                return Err(Error::Manifest(format!(
                    "duplicate entry for value {} version {}",
                    f.value_index, f.version
                )));
            }
            seen[slot] = true;
            let path = self.resolve(f);
            if !path.is_file() {
                return Err(Error::Manifest(format!(
                    "missing file: {}",
                    path.display()
                )));
            }
        }
        if let Some(slot) = seen.iter().position(|s| !s) {
            return Err(Error::Manifest(format!(
                "no entry for value {} version {}",
                slot / self.n_versions,
                slot % self.n_versions
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SweepManifest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut manifest: SweepManifest = serde_json::from_str(&text)?;
        manifest.root = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(manifest)
    }
}

/// Parameters of a corpus render.
#[derive(Debug, Clone)]
pub struct CorpusRequest {
    pub texture: TextureId,
    pub swept_param: String,
    pub n_values: usize,
    pub n_versions: usize,
    pub base_seed: u64,
    pub duration_s: f64,
    pub sample_rate: u32,
}

impl CorpusRequest {
    pub fn new(texture: TextureId, swept_param: impl Into<String>) -> Self {
        CorpusRequest {
            texture,
            swept_param: swept_param.into(),
            n_values: 11,
            n_versions: 10,
            base_seed: 17,
            duration_s: 2.0,
            sample_rate: crate::audio::DEFAULT_SAMPLE_RATE,
        }
    }
}

/// Per-clip seed: corpus seed split by texture-param label, then value index,
/// then version, so any clip is regenerable in isolation.
fn clip_seed(base_seed: u64, label: &str, value_index: usize, version: usize) -> u64 {
    let corpus = SeededRng::new(base_seed).child(label, 0);
    corpus
        .child("value", value_index as u64)
        .child("version", version as u64)
        .seed()
}

/// Render a sweep corpus and write its manifest. Returns the manifest with
/// `root` pointing at the corpus directory; the manifest file itself is at
/// `<root>/manifest.json`.
pub fn render_corpus(
    request: &CorpusRequest,
    out_dir: impl AsRef<Path>,
    config: &SynthConfig,
) -> Result<SweepManifest> {
    let def = request.texture.param_def(&request.swept_param)?;
    if request.n_values < 2 {
        return Err(Error::invalid("a sweep needs at least 2 values"));
    }
    if request.n_versions < 1 {
        return Err(Error::invalid("a sweep needs at least 1 version"));
    }
    if !(1.5..=2.0).contains(&request.duration_s) {
        return Err(Error::invalid(format!(
            "corpus clips must be 1.5 to 2.0 s long, got {}",
            request.duration_s
        )));
    }

    let label = format!("{}-{}", request.texture, request.swept_param);
    let root = out_dir.as_ref().join(&label);
    for version in 0..request.n_versions {
        std::fs::create_dir_all(root.join(format!("v{version}")))?;
    }

    let (param_min, param_max) = def.sweep;
    let mut manifest = SweepManifest {
        texture_id: request.texture.name().to_string(),
        swept_param: request.swept_param.clone(),
        param_min,
        param_max,
        n_values: request.n_values,
        n_versions: request.n_versions,
        sample_rate: request.sample_rate,
        duration_s: request.duration_s,
        base_seed: request.base_seed,
        files: Vec::new(),
        root: root.clone(),
    };

    let mut jobs = Vec::new();
    for value_index in 0..request.n_values {
        for version in 0..request.n_versions {
            let seed = clip_seed(request.base_seed, &label, value_index, version);
            let rel = format!("v{version}/p{value_index}.wav");
            manifest.files.push(ManifestEntry {
                path: rel.clone(),
                value_index,
                version,
                seed,
            });
            jobs.push((value_index, version, seed, root.join(rel)));
        }
    }

    jobs.par_iter()
        .try_for_each(|&(value_index, _version, seed, ref path)| -> Result<()> {
            let mut params = BTreeMap::new();
            params.insert(
                request.swept_param.clone(),
                manifest.param_value(value_index),
            );
            let spec = TextureSpec::new(
                request.texture,
                &params,
                request.duration_s,
                request.sample_rate,
                seed,
            )?;
            let clip = synthesize_with(&spec, config)?;
            save_wav(&clip, path, WavEncoding::Float32)
        })?;

    manifest.save(root.join("manifest.json"))?;
    Ok(manifest)
}
