//! Gram-matrix texture statistics over an ensemble of random, untrained 1-D
//! convolution banks, and the three distances derived from them: mean squared
//! error between Gram matrices (GM), per-bank cosine distance (GMcos), and
//! squared distance between accumulated Gram vectors (AGM).
//!
//! The spectrogram is treated as a 1-D sequence with the frequency bins as
//! input channels. Each of the six banks convolves it with 512 filters of a
//! distinct kernel width (2, 4, 8, 16, 64, 128), applies a ReLU, and produces
//! one 512x512 Gram matrix of time-summed feature-map products.
//!
//! [`compute_gram_set`] consumes whatever spectrogram it is handed; the
//! metric pipeline feeds it log-compressed magnitudes
//! ([`Spectrogram::log_compressed`]), which keeps the Gram statistics
//! responsive across the full dynamic range of comb-filtered and pitched
//! textures.

use std::path::Path;

use ndarray::{Array2, Array3};

use crate::cache::{self, MAGIC_GRAM_SET, MAGIC_GRAM_VECTOR};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::spectrum::Spectrogram;
use crate::stats::cosine_distance;

/// Kernel widths of the six convolution banks.
pub const KERNEL_WIDTHS: [usize; 6] = [2, 4, 8, 16, 64, 128];
/// Filters per bank.
pub const NUM_FILTERS: usize = 512;
/// Length of the accumulated Gram vector.
pub const GRAM_VECTOR_LEN: usize = 128;

/// One random convolution bank: `filters` kernels of width `width` over
/// `in_channels` input channels.
#[derive(Debug, Clone)]
pub struct ConvBank {
    width: usize,
    in_channels: usize,
    filters: usize,
    /// `[filters x in_channels x width]`
    weights: Array3<f64>,
}

impl ConvBank {
    /// Build a bank from explicit weights.
    pub fn from_weights(weights: Array3<f64>) -> Self {
        let (filters, in_channels, width) = weights.dim();
        ConvBank {
            width,
            in_channels,
            filters,
            weights,
        }
    }

    /// Random bank with weights drawn from Normal(0, 1/(in_channels*width)).
    fn random(filters: usize, in_channels: usize, width: usize, rng: &mut SeededRng) -> Self {
        let sd = 1.0 / ((in_channels * width) as f64).sqrt();
        let weights = Array3::from_shape_simple_fn((filters, in_channels, width), || {
            rng.normal_scaled(0.0, sd)
        });
        ConvBank {
            width,
            in_channels,
            filters,
            weights,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn weights(&self) -> &Array3<f64> {
        &self.weights
    }

    /// Feature maps `[filters x M]`, M = n_frames - width + 1: valid 1-D
    /// convolution (stride 1, no padding) followed by ReLU.
    pub fn feature_maps(&self, spec: &Array2<f64>) -> Result<Array2<f64>> {
        let (channels, frames) = spec.dim();
        if channels != self.in_channels {
            return Err(Error::ShapeMismatch(format!(
                "spectrogram has {channels} bins, bank expects {}",
                self.in_channels
            )));
        }
        if frames < self.width {
            return Err(Error::invalid(format!(
                "{frames} frames < kernel width {}",
                self.width
            )));
        }
        let m = frames - self.width + 1;

        // im2col: unfold the input so the convolution is one GEMM
        let mut unfolded = Array2::zeros((self.in_channels * self.width, m));
        for c in 0..self.in_channels {
            for j in 0..self.width {
                let row = c * self.width + j;
                for t in 0..m {
                    unfolded[(row, t)] = spec[(c, t + j)];
                }
            }
        }
        let flat = self
            .weights
            .view()
            .into_shape_with_order((self.filters, self.in_channels * self.width))
            .expect("weights are contiguous");
        let mut maps = flat.dot(&unfolded);
        maps.mapv_inplace(|v| v.max(0.0));
        Ok(maps)
    }
}

/// Six immutable random convolution banks sharing one seed. Construct once
/// per experiment run and share across threads.
#[derive(Debug, Clone)]
pub struct ConvEnsemble {
    banks: Vec<ConvBank>,
    seed: u64,
}

impl ConvEnsemble {
    /// Standard ensemble: six banks with the canonical widths, 512 filters
    /// each, weights reproducible from the seed.
    pub fn new(n_bins: usize, seed: &SeededRng) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::invalid("ensemble needs at least one input bin"));
        }
        let banks = KERNEL_WIDTHS
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let mut bank_rng = seed.child("conv-bank", i as u64);
                ConvBank::random(NUM_FILTERS, n_bins, w, &mut bank_rng)
            })
            .collect();
        Ok(ConvEnsemble {
            banks,
            seed: seed.seed(),
        })
    }

    /// Ensemble from explicit banks (tests, non-standard configurations).
    pub fn from_banks(banks: Vec<ConvBank>, seed: u64) -> Self {
        ConvEnsemble { banks, seed }
    }

    pub fn banks(&self) -> &[ConvBank] {
        &self.banks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Largest kernel width in the ensemble.
    pub fn max_width(&self) -> usize {
        self.banks.iter().map(ConvBank::width).max().unwrap_or(0)
    }
}

/// One Gram matrix per bank, each `[filters x filters]`, symmetric PSD.
#[derive(Debug, Clone)]
pub struct GramSet {
    grams: Vec<Array2<f64>>,
    source: String,
}

impl GramSet {
    pub fn new(grams: Vec<Array2<f64>>, source: impl Into<String>) -> Self {
        GramSet {
            grams,
            source: source.into(),
        }
    }

    pub fn grams(&self) -> &[Array2<f64>] {
        &self.grams
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn n_banks(&self) -> usize {
        self.grams.len()
    }

    fn check_shapes(&self, other: &GramSet) -> Result<()> {
        if self.grams.len() != other.grams.len() {
            return Err(Error::ShapeMismatch(format!(
                "gram sets with {} and {} banks",
                self.grams.len(),
                other.grams.len()
            )));
        }
        for (a, b) in self.grams.iter().zip(&other.grams) {
            if a.dim() != b.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "gram matrices {:?} vs {:?}",
                    a.dim(),
                    b.dim()
                )));
            }
        }
        Ok(())
    }

    /// Dump as little-endian binary for caching.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let n = self.grams.len() as u32;
        let f = self.grams.first().map(|g| g.nrows()).unwrap_or(0) as u32;
        let mut data = Vec::with_capacity((n * f * f) as usize);
        for g in &self.grams {
            data.extend(g.iter().copied());
        }
        cache::write_array(path, &MAGIC_GRAM_SET, &[n, f, f], &data)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GramSet> {
        let (dims, data) = cache::read_array(&path, &MAGIC_GRAM_SET)?;
        if dims.len() != 3 || dims[1] != dims[2] {
            return Err(Error::ShapeMismatch(format!("gram set dims {dims:?}")));
        }
        let (n, f) = (dims[0] as usize, dims[1] as usize);
        let grams = (0..n)
            .map(|i| {
                Array2::from_shape_vec((f, f), data[i * f * f..(i + 1) * f * f].to_vec())
                    .expect("shape checked")
            })
            .collect();
        Ok(GramSet::new(grams, path.as_ref().display().to_string()))
    }
}

/// 128-element accumulated summary of a [`GramSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct GramVector {
    values: Vec<f64>,
}

impl GramVector {
    pub fn new(values: Vec<f64>) -> Self {
        GramVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        cache::write_array(
            path,
            &MAGIC_GRAM_VECTOR,
            &[self.values.len() as u32],
            &self.values,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GramVector> {
        let (dims, data) = cache::read_array(path, &MAGIC_GRAM_VECTOR)?;
        if dims.len() != 1 {
            return Err(Error::ShapeMismatch(format!("gram vector dims {dims:?}")));
        }
        Ok(GramVector::new(data))
    }
}

/// Gram matrices of a spectrogram under every bank of the ensemble:
/// `G_pq = sum_m f_p[m] * f_q[m]` over the ReLU feature maps.
pub fn compute_gram_set(spec: &Spectrogram, ensemble: &ConvEnsemble) -> Result<GramSet> {
    if spec.n_frames() < ensemble.max_width() {
        return Err(Error::invalid(format!(
            "{} frames < largest kernel width {}",
            spec.n_frames(),
            ensemble.max_width()
        )));
    }
    let grams = ensemble
        .banks
        .iter()
        .map(|bank| {
            let maps = bank.feature_maps(&spec.magnitudes)?;
            Ok(maps.dot(&maps.t()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramSet::new(grams, "spectrogram"))
}

/// Gram matrix metric: mean over banks of the element-averaged squared
/// Frobenius difference, `(1/N) sum_n (1/D) ||G_A^n - G_B^n||^2`.
pub fn gm(a: &GramSet, b: &GramSet) -> Result<f64> {
    a.check_shapes(b)?;
    let n = a.grams.len() as f64;
    let mut total = 0.0;
    for (ga, gb) in a.grams.iter().zip(&b.grams) {
        let d = ga.len() as f64;
        let mut sq = 0.0;
        for (x, y) in ga.iter().zip(gb.iter()) {
            let diff = x - y;
            sq += diff * diff;
        }
        total += sq / d;
    }
    Ok(total / n)
}

/// Cosine-distance variant: per-bank cosine distance between the flattened
/// Gram matrices, averaged over the banks.
pub fn gmcos(a: &GramSet, b: &GramSet) -> Result<f64> {
    a.check_shapes(b)?;
    let mut total = 0.0;
    for (ga, gb) in a.grams.iter().zip(&b.grams) {
        let xa = ga.as_slice().expect("gram is contiguous");
        let xb = gb.as_slice().expect("gram is contiguous");
        total += cosine_distance(xa, xb)?;
    }
    Ok(total / a.grams.len() as f64)
}

/// Accumulate one Gram matrix into a length-`s` segment-summed column
/// average: element `j` is the mean over the `F/s` segments of the column
/// sums at columns `seg*s + j`, scaled by `1/F`.
fn accumulate_bank(gram: &Array2<f64>, s: usize) -> Result<Vec<f64>> {
    let f = gram.nrows();
    if gram.ncols() != f {
        return Err(Error::ShapeMismatch(format!(
            "gram matrix {:?} is not square",
            gram.dim()
        )));
    }
    if s == 0 || f % s != 0 {
        return Err(Error::invalid(format!(
            "segment length {s} must divide filter count {f}"
        )));
    }
    let n_segments = f / s;
    let norm = 1.0 / (n_segments as f64 * f as f64);
    let mut out = vec![0.0; s];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for seg in 0..n_segments {
            let col = seg * s + j;
            for i in 0..f {
                acc += gram[(i, col)];
            }
        }
        *slot = acc * norm;
    }
    Ok(out)
}

/// Gram vector of a [`GramSet`]: per-bank segment-accumulated vectors of
/// length `s`, then the element-wise mean over the banks.
pub fn accumulate_gram_vector(set: &GramSet, s: usize) -> Result<GramVector> {
    if set.grams.is_empty() {
        return Err(Error::invalid("empty gram set"));
    }
    let mut acc = vec![0.0; s];
    for gram in &set.grams {
        let v = accumulate_bank(gram, s)?;
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
    }
    let n = set.grams.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Ok(GramVector::new(acc))
}

/// Accumulated-Gram metric: squared Euclidean distance between Gram vectors.
pub fn agm(a: &GramVector, b: &GramVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "gram vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum())
}
