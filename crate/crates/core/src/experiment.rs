//! The two corpus experiments and their reports.
//!
//! *Consistency*: how small is the metric between same-parameter instances,
//! relative to the largest cross-parameter anchor distance? Reported as
//! `relative_mean_pct = 100 * same_param_mean / max_cross_param_mean` over
//! 100 seeded same-parameter pairs.
//!
//! *Sensitivity*: the curve of mean metric values between the anchor (value
//! index 0) and test indices 1..=9, averaged over versions, with its Pearson
//! correlation against the parameter index and (optionally) against
//! externally supplied human rank orders.
//!
//! All pairwise metrics share one feature table per run so Gram sets and
//! cochlear statistics are computed once per clip. FAD is distributional:
//! it compares Gaussians fit to the per-value embedding sets instead of
//! clip pairs.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use once_cell::sync::OnceCell;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::cochlear::{compute_stats, cpm, CochlearConfig, CochlearStats};
use crate::distribution::{
    fit_gaussian, frechet_distance, l2_spec_distance, stub_embed, EmbeddingSet, Provenance,
};
use crate::error::{Error, Result};
use crate::gram::{accumulate_gram_vector, agm, compute_gram_set, gm, gmcos, ConvEnsemble};
use crate::gram::{GramSet, GramVector, GRAM_VECTOR_LEN};
use crate::rng::SeededRng;
use crate::spectrum::{stft_magnitude, Spectrogram, DEFAULT_FFT_SIZE, DEFAULT_HOP};
use crate::stats::pearson_correlation;
use crate::syntex::SweepManifest;

/// Default number of same-parameter comparisons in a consistency run.
pub const CONSISTENCY_PAIRS: usize = 100;

/// The six distance metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    L2,
    Gm,
    GmCos,
    Agm,
    Cpm,
    Fad,
}

impl MetricId {
    pub const ALL: [MetricId; 6] = [
        MetricId::L2,
        MetricId::Gm,
        MetricId::GmCos,
        MetricId::Agm,
        MetricId::Cpm,
        MetricId::Fad,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricId::L2 => "l2",
            MetricId::Gm => "gm",
            MetricId::GmCos => "gmcos",
            MetricId::Agm => "agm",
            MetricId::Cpm => "cpm",
            MetricId::Fad => "fad",
        }
    }

    /// Distributional metrics compare corpora, not single files.
    pub fn is_distributional(&self) -> bool {
        matches!(self, MetricId::Fad)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricId::ALL
            .iter()
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| {
                let valid: Vec<&str> = MetricId::ALL.iter().map(|m| m.name()).collect();
                Error::invalid(format!(
                    "unknown metric '{s}'; valid ids: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Seeds of one harness run, recorded in every report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeedBundle {
    /// Convolution ensemble initialization.
    pub ensemble: u64,
    /// Stub embedding projection.
    pub embedding: u64,
    /// Consistency pair sampling.
    pub pairs: u64,
}

impl Default for SeedBundle {
    fn default() -> Self {
        SeedBundle {
            ensemble: 7_777,
            embedding: 9_999,
            pairs: 1_111,
        }
    }
}

/// Shared immutable state of a harness run: STFT geometry, the lazily built
/// convolution ensemble, the cochlear configuration, and seeds.
pub struct MetricContext {
    pub seeds: SeedBundle,
    pub cochlear: CochlearConfig,
    /// Optional directory for cached stub embeddings
    /// (`TEXMET_CACHE_DIR` when driven from the CLI).
    pub cache_dir: Option<PathBuf>,
    ensemble: OnceCell<ConvEnsemble>,
}

impl MetricContext {
    pub fn new(seeds: SeedBundle) -> Self {
        MetricContext {
            seeds,
            cochlear: CochlearConfig::default(),
            cache_dir: None,
            ensemble: OnceCell::new(),
        }
    }

    /// The shared convolution ensemble, built on first use.
    pub fn ensemble(&self) -> &ConvEnsemble {
        self.ensemble.get_or_init(|| {
            ConvEnsemble::new(
                DEFAULT_FFT_SIZE / 2 + 1,
                &SeededRng::new(self.seeds.ensemble),
            )
            .expect("canonical ensemble dimensions are valid")
        })
    }

    fn embed_rng(&self) -> SeededRng {
        SeededRng::new(self.seeds.embedding)
    }
}

impl Default for MetricContext {
    fn default() -> Self {
        MetricContext::new(SeedBundle::default())
    }
}

/// Which per-clip features a metric set requires.
#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    spectrogram: bool,
    gram: bool,
    gram_vector: bool,
    cochlear: bool,
    embedding: bool,
}

impl Needs {
    fn for_metrics(metrics: &[MetricId]) -> Needs {
        let mut n = Needs::default();
        for m in metrics {
            match m {
                MetricId::L2 => n.spectrogram = true,
                MetricId::Gm | MetricId::GmCos => n.gram = true,
                MetricId::Agm => {
                    n.gram = true;
                    n.gram_vector = true;
                }
                MetricId::Cpm => n.cochlear = true,
                MetricId::Fad => n.embedding = true,
            }
        }
        n
    }
}

/// Features of one clip, computed once and reused across pairings.
struct ClipFeatures {
    spectrogram: Option<Spectrogram>,
    grams: Option<GramSet>,
    gram_vector: Option<GramVector>,
    cochlear: Option<CochlearStats>,
    embedding: Option<Vec<f64>>,
}

fn compute_features(clip: &AudioClip, needs: Needs, ctx: &MetricContext) -> Result<ClipFeatures> {
    let spectrogram = if needs.spectrogram || needs.gram {
        Some(stft_magnitude(clip, DEFAULT_FFT_SIZE, DEFAULT_HOP)?)
    } else {
        None
    };
    let grams = if needs.gram {
        // the conv banks see log-compressed magnitudes; raw magnitudes feed L2
        let compressed = spectrogram
            .as_ref()
            .expect("spectrogram computed")
            .log_compressed();
        Some(compute_gram_set(&compressed, ctx.ensemble())?)
    } else {
        None
    };
    let gram_vector = if needs.gram_vector {
        Some(accumulate_gram_vector(
            grams.as_ref().expect("grams computed"),
            GRAM_VECTOR_LEN,
        )?)
    } else {
        None
    };
    let cochlear = if needs.cochlear {
        Some(compute_stats(clip, &ctx.cochlear)?)
    } else {
        None
    };
    let embedding = if needs.embedding {
        Some(stub_embed(clip, &ctx.embed_rng())?)
    } else {
        None
    };
    Ok(ClipFeatures {
        spectrogram,
        grams,
        gram_vector,
        cochlear,
        embedding,
    })
}

/// L2 between two already-computed magnitude spectrograms, trimmed to the
/// common frame count (same convention as `l2_spec_distance`).
fn l2_from_spectrograms(a: &Spectrogram, b: &Spectrogram) -> f64 {
    let frames = a.n_frames().min(b.n_frames());
    let mut sq = 0.0;
    for k in 0..a.n_bins() {
        for t in 0..frames {
            let d = a.magnitudes[(k, t)] - b.magnitudes[(k, t)];
            sq += d * d;
        }
    }
    sq.sqrt()
}

fn pairwise_distance(metric: MetricId, a: &ClipFeatures, b: &ClipFeatures) -> Result<f64> {
    match metric {
        MetricId::L2 => Ok(l2_from_spectrograms(
            a.spectrogram.as_ref().expect("spectrogram"),
            b.spectrogram.as_ref().expect("spectrogram"),
        )),
        MetricId::Gm => gm(a.grams.as_ref().expect("grams"), b.grams.as_ref().expect("grams")),
        MetricId::GmCos => gmcos(
            a.grams.as_ref().expect("grams"),
            b.grams.as_ref().expect("grams"),
        ),
        MetricId::Agm => agm(
            a.gram_vector.as_ref().expect("gram vector"),
            b.gram_vector.as_ref().expect("gram vector"),
        ),
        MetricId::Cpm => cpm(
            a.cochlear.as_ref().expect("cochlear stats"),
            b.cochlear.as_ref().expect("cochlear stats"),
        ),
        MetricId::Fad => Err(Error::invalid(
            "fad requires corpora; it is not a pairwise metric",
        )),
    }
}

/// One pairwise metric between two clips (the CLI `metric` path). FAD is
/// distributional and rejected here.
pub fn pairwise_metric(
    metric: MetricId,
    a: &AudioClip,
    b: &AudioClip,
    ctx: &MetricContext,
) -> Result<f64> {
    if metric.is_distributional() {
        return Err(Error::invalid(format!("{metric} requires corpora")));
    }
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::invalid(format!(
            "sample rates differ: {} vs {}",
            a.sample_rate(),
            b.sample_rate()
        )));
    }
    if metric == MetricId::L2 {
        return l2_spec_distance(a, b);
    }
    let needs = Needs::for_metrics(&[metric]);
    let fa = compute_features(a, needs, ctx)?;
    let fb = compute_features(b, needs, ctx)?;
    pairwise_distance(metric, &fa, &fb)
}

/// Feature table of a corpus: `table[value_index][version]`.
struct FeatureTable {
    features: Vec<Vec<ClipFeatures>>,
    n_versions: usize,
}

impl FeatureTable {
    fn at(&self, value: usize, version: usize) -> &ClipFeatures {
        &self.features[value][version]
    }
}

fn build_feature_table(
    manifest: &SweepManifest,
    values: std::ops::Range<usize>,
    needs: Needs,
    ctx: &MetricContext,
) -> Result<FeatureTable> {
    let jobs: Vec<(usize, usize)> = values
        .clone()
        .flat_map(|v| (0..manifest.n_versions).map(move |k| (v, k)))
        .collect();
    let computed: Vec<ClipFeatures> = jobs
        .par_iter()
        .map(|&(v, k)| {
            let clip = manifest.load_clip(v, k)?;
            compute_features(&clip, needs, ctx)
        })
        .collect::<Result<_>>()?;
    let mut features: Vec<Vec<ClipFeatures>> = Vec::with_capacity(values.len());
    let mut iter = computed.into_iter();
    for _ in values {
        features.push((0..manifest.n_versions).map(|_| iter.next().expect("job count")).collect());
    }
    Ok(FeatureTable {
        features,
        n_versions: manifest.n_versions,
    })
}

/// Embedding table `[value][version] -> 128-vector`, optionally cached on
/// disk keyed by the manifest identity and embedding seed.
fn build_embedding_table(
    manifest: &SweepManifest,
    ctx: &MetricContext,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let cache_path = ctx.cache_dir.as_ref().map(|dir| {
        let mut h = crate::rng::splitmix64(manifest.base_seed ^ ctx.seeds.embedding);
        for f in &manifest.files {
            for b in f.path.as_bytes() {
                h = crate::rng::splitmix64(h ^ u64::from(*b));
            }
            h = crate::rng::splitmix64(h ^ f.seed);
        }
        dir.join(format!("emb-{h:016x}.bin"))
    });
    if let Some(ref path) = cache_path {
        if path.is_file() {
            if let Ok(set) = crate::distribution::load_embeddings(path) {
                if set.n_clips() == manifest.n_values * manifest.n_versions {
                    let mut table = Vec::with_capacity(manifest.n_values);
                    for v in 0..manifest.n_values {
                        let mut row = Vec::with_capacity(manifest.n_versions);
                        for k in 0..manifest.n_versions {
                            let i = v * manifest.n_versions + k;
                            row.push(set.vectors.row(i).iter().copied().collect());
                        }
                        table.push(row);
                    }
                    return Ok(table);
                }
            }
        }
    }

    let jobs: Vec<(usize, usize)> = (0..manifest.n_values)
        .flat_map(|v| (0..manifest.n_versions).map(move |k| (v, k)))
        .collect();
    let flat: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(v, k)| {
            let clip = manifest.load_clip(v, k)?;
            stub_embed(&clip, &ctx.embed_rng())
        })
        .collect::<Result<_>>()?;

    if let Some(ref path) = cache_path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let set = EmbeddingSet::from_rows(&flat, Provenance::Stub)?;
        crate::distribution::save_embeddings_binary(&set, path)?;
    }

    let mut table = Vec::with_capacity(manifest.n_values);
    let mut iter = flat.into_iter();
    for _ in 0..manifest.n_values {
        table.push((0..manifest.n_versions).map(|_| iter.next().expect("job count")).collect());
    }
    Ok(table)
}

fn fad_between_groups(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let ga = fit_gaussian(&EmbeddingSet::from_rows(a, Provenance::Stub)?)?;
    let gb = fit_gaussian(&EmbeddingSet::from_rows(b, Provenance::Stub)?)?;
    frechet_distance(&ga, &gb)
}

/// Anchor curve: mean distance between `(version k, value 0)` and
/// `(version k, value v)` for v in `1..=v_max`, averaged over versions.
/// Returns `(means, per-version spreads)`.
fn anchor_curve(
    table: &FeatureTable,
    metric: MetricId,
    v_max: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut means = Vec::with_capacity(v_max);
    let mut spreads = Vec::with_capacity(v_max);
    for v in 1..=v_max {
        let mut vals = Vec::with_capacity(table.n_versions);
        for k in 0..table.n_versions {
            vals.push(pairwise_distance(metric, table.at(0, k), table.at(v, k))?);
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / vals.len() as f64;
        means.push(mean);
        spreads.push(var.sqrt());
    }
    Ok((means, spreads))
}

/// Anchor curve for FAD: one distance per test index between the per-value
/// embedding Gaussians.
fn fad_anchor_curve(table: &[Vec<Vec<f64>>], v_max: usize) -> Result<Vec<f64>> {
    (1..=v_max)
        .map(|v| fad_between_groups(&table[0], &table[v]))
        .collect()
}

/// Consistency of one metric on one corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub texture: String,
    pub param: String,
    pub metric_id: MetricId,
    pub same_param_mean: f64,
    pub max_cross_param_mean: f64,
    /// `100 * same_param_mean / max_cross_param_mean`.
    pub relative_mean_pct: f64,
    pub n_pairs: usize,
    pub seeds: SeedBundle,
    /// Set when the normalizer was zero (e.g. an all-identical corpus).
    pub degenerate: bool,
}

/// Sensitivity of one metric on one corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub texture: String,
    pub param: String,
    pub metric_id: MetricId,
    /// Mean distance from the anchor at test indices `1..=n_values-2`.
    pub curve: Vec<f64>,
    /// Per-version standard deviation at each test index (zeros for FAD).
    pub spread: Vec<f64>,
    /// Pearson correlation of the curve against the parameter index;
    /// absent when the curve is degenerate (zero variance).
    pub pearson_vs_param: Option<f64>,
    /// Pearson correlation against externally supplied human ranks.
    pub pearson_vs_ranks: Option<f64>,
    pub degenerate: bool,
    /// Reproducibility fingerprint of the configuration.
    pub config_fingerprint: String,
}

fn fingerprint(ctx: &MetricContext) -> String {
    format!(
        "texmet={};ensemble_seed={};embed_seed={};cpm_pairs={};stft={}/{};embeddings={}",
        crate::VERSION,
        ctx.seeds.ensemble,
        ctx.seeds.embedding,
        ctx.cochlear.pair_strategy.name(),
        DEFAULT_FFT_SIZE,
        DEFAULT_HOP,
        Provenance::Stub.name(),
    )
}

/// Run the consistency experiment for several metrics, sharing features.
pub fn run_consistency_multi(
    manifest: &SweepManifest,
    metrics: &[MetricId],
    ctx: &MetricContext,
) -> Result<Vec<ConsistencyReport>> {
    if manifest.n_versions < 2 {
        return Err(Error::invalid(
            "consistency needs at least 2 versions per value",
        ));
    }
    let pairwise: Vec<MetricId> = metrics
        .iter()
        .copied()
        .filter(|m| !m.is_distributional())
        .collect();
    let wants_fad = metrics.contains(&MetricId::Fad);
    if wants_fad && manifest.n_versions < 4 {
        return Err(Error::invalid(
            "fad consistency needs at least 4 versions (two half-splits of >= 2)",
        ));
    }

    // sample the same-parameter pairs once; all metrics see the same pairs
    let mut rng = SeededRng::new(ctx.seeds.pairs);
    let mut pairs = Vec::with_capacity(CONSISTENCY_PAIRS);
    for _ in 0..CONSISTENCY_PAIRS {
        let value = (rng.uniform(0.0, manifest.n_values as f64)).floor() as usize;
        let value = value.min(manifest.n_values - 1);
        let k1 = (rng.uniform(0.0, manifest.n_versions as f64)).floor() as usize;
        let mut k2 = (rng.uniform(0.0, (manifest.n_versions - 1) as f64)).floor() as usize;
        if k2 >= k1 {
            k2 += 1; // unordered pair of distinct versions
        }
        pairs.push((value.min(manifest.n_values - 1), k1, k2.min(manifest.n_versions - 1)));
    }

    let mut reports = Vec::new();

    if !pairwise.is_empty() {
        let needs = Needs::for_metrics(&pairwise);
        let table = build_feature_table(manifest, 0..manifest.n_values, needs, ctx)?;
        for &metric in &pairwise {
            let mut total = 0.0;
            for &(v, k1, k2) in &pairs {
                total += pairwise_distance(metric, table.at(v, k1), table.at(v, k2))?;
            }
            let same_param_mean = total / pairs.len() as f64;
            let (curve, _) = anchor_curve(&table, metric, manifest.n_values - 1)?;
            let max_cross = curve.iter().cloned().fold(0.0f64, f64::max);
            let degenerate = max_cross <= 0.0;
            reports.push(ConsistencyReport {
                texture: manifest.texture_id.clone(),
                param: manifest.swept_param.clone(),
                metric_id: metric,
                same_param_mean,
                max_cross_param_mean: max_cross,
                relative_mean_pct: if degenerate {
                    0.0
                } else {
                    100.0 * same_param_mean / max_cross
                },
                n_pairs: pairs.len(),
                seeds: ctx.seeds,
                degenerate,
            });
        }
    }

    if wants_fad {
        let table = build_embedding_table(manifest, ctx)?;
        let half = manifest.n_versions / 2;
        let mut total = 0.0;
        for value in 0..manifest.n_values {
            let (first, second) = table[value].split_at(half);
            total += fad_between_groups(first, &second[..half.min(second.len())])?;
        }
        let same_param_mean = total / manifest.n_values as f64;
        let curve = fad_anchor_curve(&table, manifest.n_values - 1)?;
        let max_cross = curve.iter().cloned().fold(0.0f64, f64::max);
        let degenerate = max_cross <= 0.0;
        reports.push(ConsistencyReport {
            texture: manifest.texture_id.clone(),
            param: manifest.swept_param.clone(),
            metric_id: MetricId::Fad,
            same_param_mean,
            max_cross_param_mean: max_cross,
            relative_mean_pct: if degenerate {
                0.0
            } else {
                100.0 * same_param_mean / max_cross
            },
            n_pairs: manifest.n_values,
            seeds: ctx.seeds,
            degenerate,
        });
    }

    // restore caller's metric order
    reports.sort_by_key(|r| metrics.iter().position(|m| *m == r.metric_id));
    Ok(reports)
}

/// Consistency for a single metric.
pub fn run_consistency(
    manifest: &SweepManifest,
    metric: MetricId,
    ctx: &MetricContext,
) -> Result<ConsistencyReport> {
    Ok(run_consistency_multi(manifest, &[metric], ctx)?
        .pop()
        .expect("one metric in, one report out"))
}

/// Run the sensitivity experiment for several metrics, sharing features.
pub fn run_sensitivity_multi(
    manifest: &SweepManifest,
    metrics: &[MetricId],
    ctx: &MetricContext,
) -> Result<Vec<SensitivityReport>> {
    if manifest.n_values < 3 {
        return Err(Error::invalid(
            "sensitivity needs at least 3 parameter values",
        ));
    }
    let v_max = manifest.n_values - 2; // anchor 0, tests 1..=n-2, last index unused
    let pairwise: Vec<MetricId> = metrics
        .iter()
        .copied()
        .filter(|m| !m.is_distributional())
        .collect();
    let wants_fad = metrics.contains(&MetricId::Fad);
    if wants_fad && manifest.n_versions < 10 {
        return Err(Error::invalid(
            "fad sensitivity needs at least 10 versions to fit per-value gaussians",
        ));
    }

    let mut reports = Vec::new();
    let build_report = |curve: &[f64], spread: Vec<f64>, metric: MetricId| {
        let indices: Vec<f64> = (1..=curve.len()).map(|v| v as f64).collect();
        let (pearson, degenerate) = match pearson_correlation(&indices, curve) {
            Ok(r) => (Some(r), false),
            Err(Error::DegenerateInput(_)) => (None, true),
            Err(Error::InvalidInput(_)) => (None, true),
            Err(e) => return Err(e),
        };
        Ok(SensitivityReport {
            texture: manifest.texture_id.clone(),
            param: manifest.swept_param.clone(),
            metric_id: metric,
            curve: curve.to_vec(),
            spread,
            pearson_vs_param: pearson,
            pearson_vs_ranks: None,
            degenerate,
            config_fingerprint: fingerprint(ctx),
        })
    };

    if !pairwise.is_empty() {
        let needs = Needs::for_metrics(&pairwise);
        let table = build_feature_table(manifest, 0..manifest.n_values - 1, needs, ctx)?;
        for &metric in &pairwise {
            let (curve, spread) = anchor_curve(&table, metric, v_max)?;
            reports.push(build_report(&curve, spread, metric)?);
        }
    }
    if wants_fad {
        let table = build_embedding_table(manifest, ctx)?;
        let curve = fad_anchor_curve(&table, v_max)?;
        let spread = vec![0.0; curve.len()];
        reports.push(build_report(&curve, spread, MetricId::Fad)?);
    }

    reports.sort_by_key(|r| metrics.iter().position(|m| *m == r.metric_id));
    Ok(reports)
}

/// Sensitivity for a single metric.
pub fn run_sensitivity(
    manifest: &SweepManifest,
    metric: MetricId,
    ctx: &MetricContext,
) -> Result<SensitivityReport> {
    Ok(run_sensitivity_multi(manifest, &[metric], ctx)?
        .pop()
        .expect("one metric in, one report out"))
}

/// Externally supplied average human rank orders for one texture-parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankData {
    pub texture: String,
    pub param: String,
    pub avg_ranks: Vec<f64>,
}

/// Load a rank CSV: `texture,param,rank_1,...,rank_9` (header optional).
pub fn load_ranks(path: impl AsRef<Path>) -> Result<Vec<RankData>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if idx == 0 && cells.first().map(|c| c.trim()) == Some("texture") {
            continue;
        }
        if cells.len() < 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("{} cells, expected texture,param,ranks...", cells.len()),
            });
        }
        let ranks: Vec<f64> = cells[2..]
            .iter()
            .map(|c| {
                c.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad rank '{c}': {e}"),
                })
            })
            .collect::<Result<_>>()?;
        out.push(RankData {
            texture: cells[0].trim().to_string(),
            param: cells[1].trim().to_string(),
            avg_ranks: ranks,
        });
    }
    Ok(out)
}

/// Pearson correlation of a sensitivity curve against human rank orders;
/// the value is stored into the report and returned.
pub fn correlate_with_ranks(report: &mut SensitivityReport, ranks: &RankData) -> Result<f64> {
    if ranks.avg_ranks.len() != report.curve.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} ranks for a curve of {} points",
            ranks.avg_ranks.len(),
            report.curve.len()
        )));
    }
    let r = pearson_correlation(&report.curve, &ranks.avg_ranks)?;
    report.pearson_vs_ranks = Some(r);
    Ok(r)
}

/// Run-level metadata carried by every emitted report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub software_version: String,
    pub ensemble_seed: u64,
    pub embedding_seed: u64,
    pub pair_seed: u64,
    pub cpm_pair_strategy: String,
    pub embedding_provenance: String,
    pub generated_at_unix: u64,
}

impl RunMeta {
    pub fn new(ctx: &MetricContext) -> Self {
        RunMeta {
            software_version: crate::VERSION.to_string(),
            ensemble_seed: ctx.seeds.ensemble,
            embedding_seed: ctx.seeds.embedding,
            pair_seed: ctx.seeds.pairs,
            cpm_pair_strategy: ctx.cochlear.pair_strategy.name().to_string(),
            embedding_provenance: Provenance::Stub.name().to_string(),
            generated_at_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// One row of the combined report: the consistency and/or sensitivity
/// results of a `(texture, param, metric)` triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub texture: String,
    pub param: String,
    pub metric: MetricId,
    pub consistency: Option<ConsistencyReport>,
    pub sensitivity: Option<SensitivityReport>,
}

/// A complete emitted report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub meta: RunMeta,
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    /// Merge per-experiment reports into rows keyed by (texture, param,
    /// metric), preserving first-seen order.
    pub fn assemble(
        meta: RunMeta,
        consistency: Vec<ConsistencyReport>,
        sensitivity: Vec<SensitivityReport>,
    ) -> Self {
        let mut rows: Vec<ReportRow> = Vec::new();
        for c in consistency {
            let key = (c.texture.clone(), c.param.clone(), c.metric_id);
            match rows
                .iter_mut()
                .find(|r| (r.texture.clone(), r.param.clone(), r.metric) == key)
            {
                Some(row) => row.consistency = Some(c),
                None => rows.push(ReportRow {
                    texture: c.texture.clone(),
                    param: c.param.clone(),
                    metric: c.metric_id,
                    consistency: Some(c),
                    sensitivity: None,
                }),
            }
        }
        for s in sensitivity {
            let key = (s.texture.clone(), s.param.clone(), s.metric_id);
            match rows
                .iter_mut()
                .find(|r| (r.texture.clone(), r.param.clone(), r.metric) == key)
            {
                Some(row) => row.sensitivity = Some(s),
                None => rows.push(ReportRow {
                    texture: s.texture.clone(),
                    param: s.param.clone(),
                    metric: s.metric_id,
                    consistency: None,
                    sensitivity: Some(s),
                }),
            }
        }
        RunReport { meta, rows }
    }
}

/// Report file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Number of curve columns in the CSV (curves from standard 11-value sweeps).
const CSV_CURVE_COLS: usize = 9;

/// Write a report to `path` in the given format. JSON carries the complete
/// structure; CSV flattens to one row per (texture, param, metric) with a
/// stable column order.
pub fn emit_report(report: &RunReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::invalid("nothing to report"));
    }
    let path = path.as_ref();
    match format {
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(report)?;
            std::fs::write(path, json)?;
        }
        ReportFormat::Csv => {
            let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
            let mut header: Vec<String> = vec![
                "texture".into(),
                "param".into(),
                "metric".into(),
                "same_param_mean".into(),
                "max_cross_param_mean".into(),
                "relative_mean_pct".into(),
                "n_pairs".into(),
                "consistency_degenerate".into(),
            ];
            for i in 1..=CSV_CURVE_COLS {
                header.push(format!("curve_{i}"));
            }
            for i in 1..=CSV_CURVE_COLS {
                header.push(format!("spread_{i}"));
            }
            header.extend(
                [
                    "pearson_vs_param",
                    "pearson_vs_ranks",
                    "sensitivity_degenerate",
                    "ensemble_seed",
                    "cpm_pair_strategy",
                    "embedding_provenance",
                    "software_version",
                ]
                .map(String::from),
            );
            writeln!(out, "{}", header.join(","))?;

            for row in &report.rows {
                let mut cells: Vec<String> = vec![
                    row.texture.clone(),
                    row.param.clone(),
                    row.metric.name().to_string(),
                ];
                match &row.consistency {
                    Some(c) => {
                        cells.push(format!("{}", c.same_param_mean));
                        cells.push(format!("{}", c.max_cross_param_mean));
                        cells.push(format!("{}", c.relative_mean_pct));
                        cells.push(format!("{}", c.n_pairs));
                        cells.push(format!("{}", c.degenerate));
                    }
                    None => cells.extend(std::iter::repeat_n(String::new(), 5)),
                }
                match &row.sensitivity {
                    Some(s) => {
                        for i in 0..CSV_CURVE_COLS {
                            cells.push(
                                s.curve.get(i).map(|v| format!("{v}")).unwrap_or_default(),
                            );
                        }
                        for i in 0..CSV_CURVE_COLS {
                            cells.push(
                                s.spread.get(i).map(|v| format!("{v}")).unwrap_or_default(),
                            );
                        }
                        cells.push(
                            s.pearson_vs_param
                                .map(|v| format!("{v}"))
                                .unwrap_or_default(),
                        );
                        cells.push(
                            s.pearson_vs_ranks
                                .map(|v| format!("{v}"))
                                .unwrap_or_default(),
                        );
                        cells.push(format!("{}", s.degenerate));
                    }
                    None => cells.extend(std::iter::repeat_n(String::new(), 2 * CSV_CURVE_COLS + 3)),
                }
                cells.push(format!("{}", report.meta.ensemble_seed));
                cells.push(report.meta.cpm_pair_strategy.clone());
                cells.push(report.meta.embedding_provenance.clone());
                cells.push(report.meta.software_version.clone());
                writeln!(out, "{}", cells.join(","))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Where an experiment's corpus comes from: an existing manifest on disk or
/// a synthesis request rendered before the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    Manifest(PathBuf),
    Synth(SynthRequestConfig),
}

/// Synthesis request as it appears in an experiment config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthRequestConfig {
    pub texture: String,
    pub param: String,
    pub n_values: usize,
    pub n_versions: usize,
    pub duration_s: f64,
    pub sample_rate: u32,
    pub out_dir: PathBuf,
}

impl Default for SynthRequestConfig {
    fn default() -> Self {
        SynthRequestConfig {
            texture: String::new(),
            param: String::new(),
            n_values: 11,
            n_versions: 10,
            duration_s: 2.0,
            sample_rate: crate::audio::DEFAULT_SAMPLE_RATE,
            out_dir: PathBuf::from("corpus"),
        }
    }
}

/// The experiment kinds a config can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Consistency,
    Sensitivity,
}

/// Seeds section of an experiment config.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedConfig {
    pub base: u64,
    pub ensemble: u64,
    pub embedding: u64,
    pub pairs: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        let s = SeedBundle::default();
        SeedConfig {
            base: 17,
            ensemble: s.ensemble,
            embedding: s.embedding,
            pairs: s.pairs,
        }
    }
}

/// Output section of an experiment config: `path` is the report base name
/// (extensions are appended per format).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub formats: Vec<ReportFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: PathBuf::from("report"),
            formats: vec![ReportFormat::Json, ReportFormat::Csv],
        }
    }
}

/// A complete experiment description, loadable from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: CorpusSource,
    #[serde(default = "default_experiments")]
    pub experiments: Vec<ExperimentKind>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricId>,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default)]
    pub ranks: Option<PathBuf>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_experiments() -> Vec<ExperimentKind> {
    vec![ExperimentKind::Consistency, ExperimentKind::Sensitivity]
}

fn default_metrics() -> Vec<MetricId> {
    MetricId::ALL.to_vec()
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn resolve_against(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Run a full config: obtain the corpus (loading or synthesizing), validate
/// it, run the requested experiments over the requested metrics, attach rank
/// correlations, and emit the report files. Returns the report and the paths
/// written. `base_dir` anchors the config's relative paths.
pub fn run_experiment_config(
    cfg: &ExperimentConfig,
    base_dir: &Path,
    synth_cfg: &crate::syntex::SynthConfig,
) -> Result<(RunReport, Vec<PathBuf>)> {
    let manifest = match &cfg.corpus {
        CorpusSource::Manifest(path) => SweepManifest::load(resolve_against(base_dir, path))?,
        CorpusSource::Synth(req) => {
            let texture: crate::syntex::TextureId = req.texture.parse()?;
            let request = crate::syntex::CorpusRequest {
                texture,
                swept_param: req.param.clone(),
                n_values: req.n_values,
                n_versions: req.n_versions,
                base_seed: cfg.seeds.base,
                duration_s: req.duration_s,
                sample_rate: req.sample_rate,
            };
            crate::syntex::render_corpus(
                &request,
                resolve_against(base_dir, &req.out_dir),
                synth_cfg,
            )?
        }
    };
    manifest.validate()?;

    let mut ctx = MetricContext::new(SeedBundle {
        ensemble: cfg.seeds.ensemble,
        embedding: cfg.seeds.embedding,
        pairs: cfg.seeds.pairs,
    });
    if let Ok(dir) = std::env::var("TEXMET_CACHE_DIR") {
        if !dir.is_empty() {
            ctx.cache_dir = Some(PathBuf::from(dir));
        }
    }

    let consistency = if cfg.experiments.contains(&ExperimentKind::Consistency) {
        run_consistency_multi(&manifest, &cfg.metrics, &ctx)?
    } else {
        vec![]
    };
    let mut sensitivity = if cfg.experiments.contains(&ExperimentKind::Sensitivity) {
        run_sensitivity_multi(&manifest, &cfg.metrics, &ctx)?
    } else {
        vec![]
    };

    if let Some(rank_path) = &cfg.ranks {
        let ranks = load_ranks(resolve_against(base_dir, rank_path))?;
        for rep in &mut sensitivity {
            if let Some(r) = ranks
                .iter()
                .find(|r| r.texture == rep.texture && r.param == rep.param)
            {
                correlate_with_ranks(rep, r)?;
            }
        }
    }

    let report = RunReport::assemble(RunMeta::new(&ctx), consistency, sensitivity);
    let base = resolve_against(base_dir, &cfg.output.path);
    if let Some(dir) = base.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut written = Vec::new();
    for format in &cfg.output.formats {
        let path = match format {
            ReportFormat::Json => base.with_extension("json"),
            ReportFormat::Csv => base.with_extension("csv"),
        };
        emit_report(&report, &path, *format)?;
        written.push(path);
    }
    Ok((report, written))
}
