//! Distribution-level metrics: spectrogram L2 distance and the Fréchet
//! distance between multivariate Gaussians fit to embedding sets, plus
//! embedding ingestion and the documented stand-in extractor.
//!
//! The stand-in extractor is NOT a pretrained audio embedding model; it is a
//! deterministic log-mel summary projected to 128 dimensions, and every
//! report derived from it carries `provenance = stub`.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::cache::{self, MAGIC_EMBEDDINGS};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::spectrum::{stft_magnitude, DEFAULT_FFT_SIZE, DEFAULT_HOP};

/// Dimension of the embeddings used by the Fréchet metric.
pub const EMBEDDING_DIM: usize = 128;
/// Mel bands feeding the stub extractor.
const STUB_MEL_BANDS: usize = 64;
/// Floor added before taking logs of band energies.
const LOG_FLOOR: f64 = 1e-10;

/// Where a set of embeddings came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Computed externally (e.g. a real pretrained model) and loaded from file.
    Ingested,
    /// Produced by [`stub_embed`].
    Stub,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Ingested => "ingested",
            Provenance::Stub => "stub",
        }
    }
}

/// A matrix of embeddings, one row per clip.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    /// `[n_clips x dim]`
    pub vectors: DMatrix<f64>,
    pub provenance: Provenance,
}

impl EmbeddingSet {
    pub fn new(vectors: DMatrix<f64>, provenance: Provenance) -> Self {
        EmbeddingSet {
            vectors,
            provenance,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], provenance: Provenance) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("embedding set must not be empty"));
        }
        let dim = rows[0].len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("ragged embedding rows".into()));
        }
        let vectors = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        Ok(EmbeddingSet::new(vectors, provenance))
    }

    pub fn n_clips(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}

/// Mean and covariance of a Gaussian fit.
#[derive(Debug, Clone)]
pub struct GaussianStats {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

/// Magnitude-spectrogram L2 distance (Frobenius norm of the difference),
/// with the canonical 512-point FFT and 128-sample hop. Clips must share a
/// sample rate and match in length to within one hop; the spectrograms are
/// trimmed to the common frame count.
pub fn l2_spec_distance(a: &AudioClip, b: &AudioClip) -> Result<f64> {
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::invalid(format!(
            "sample rates differ: {} vs {}",
            a.sample_rate(),
            b.sample_rate()
        )));
    }
    if a.len().abs_diff(b.len()) > DEFAULT_HOP {
        return Err(Error::invalid(format!(
            "clip lengths {} and {} differ by more than one hop",
            a.len(),
            b.len()
        )));
    }
    let sa = stft_magnitude(a, DEFAULT_FFT_SIZE, DEFAULT_HOP)?;
    let sb = stft_magnitude(b, DEFAULT_FFT_SIZE, DEFAULT_HOP)?;
    let frames = sa.n_frames().min(sb.n_frames());
    let mut sq = 0.0;
    for k in 0..sa.n_bins() {
        for t in 0..frames {
            let d = sa.magnitudes[(k, t)] - sb.magnitudes[(k, t)];
            sq += d * d;
        }
    }
    Ok(sq.sqrt())
}

/// Sample mean and unbiased covariance of an embedding set. When the sample
/// count does not exceed the dimension, diagonal shrinkage
/// `1e-6 * mean(diag) * I` keeps the covariance usable.
pub fn fit_gaussian(set: &EmbeddingSet) -> Result<GaussianStats> {
    let n = set.n_clips();
    let d = set.dim();
    if n < 2 {
        return Err(Error::invalid(format!(
            "gaussian fit needs at least 2 clips, got {n}"
        )));
    }
    let mu = DVector::from_fn(d, |j, _| set.vectors.column(j).sum() / n as f64);
    let mut sigma = DMatrix::zeros(d, d);
    for i in 0..n {
        let centered = set.vectors.row(i).transpose() - &mu;
        sigma += &centered * centered.transpose();
    }
    sigma /= (n - 1) as f64;
    if n <= d {
        let mean_diag = sigma.diagonal().sum() / d as f64;
        let eps = 1e-6 * mean_diag.max(f64::MIN_POSITIVE);
        for j in 0..d {
            sigma[(j, j)] += eps;
        }
    }
    Ok(GaussianStats { mu, sigma })
}

/// Eigendecomposition-based PSD square root. Eigenvalues within
/// `-1e-8 * trace` are clamped to zero; anything more negative is an error.
fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let trace = sym.trace().abs().max(f64::MIN_POSITIVE);
    let eig = sym.symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-8 * trace {
            return Err(Error::invalid(format!(
                "matrix is not PSD: eigenvalue {v} with trace {trace}"
            )));
        }
        *v = v.max(0.0).sqrt();
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&vals) * q.transpose())
}

/// Fréchet distance between two Gaussians:
/// `|mu_a - mu_b|^2 + tr(S_a + S_b - 2 sqrt(S_a S_b))`.
///
/// The cross term uses the symmetric reduction
/// `tr sqrt(S_a S_b) = tr sqrt(S_a^{1/2} S_b S_a^{1/2})`, evaluated as the
/// nuclear norm of `S_a^{1/2} S_b^{1/2}` (the eigenvalues of the symmetric
/// reduction are the squared singular values of that product). The singular
/// value route avoids taking square roots of near-zero eigenvalues of the
/// formed product, so identical Gaussians land at zero to machine noise even
/// with shrinkage-regularized rank-deficient covariances. The result is
/// clamped to zero from below.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64> {
    if a.mu.len() != b.mu.len() {
        return Err(Error::ShapeMismatch(format!(
            "gaussians of dimension {} and {}",
            a.mu.len(),
            b.mu.len()
        )));
    }
    let mean_term = (&a.mu - &b.mu).norm_squared();
    let sqrt_a = psd_sqrt(&a.sigma)?;
    let sqrt_b = psd_sqrt(&b.sigma)?;
    let product = &sqrt_a * &sqrt_b;
    let cross_trace: f64 = product.svd(false, false).singular_values.iter().sum();
    let d = mean_term + a.sigma.trace() + b.sigma.trace() - 2.0 * cross_trace;
    Ok(d.max(0.0))
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel filterbank over the one-sided spectrum.
fn mel_filterbank(n_bands: usize, n_bins: usize, sample_rate: f64, fft_size: f64) -> Vec<Vec<f64>> {
    let f_max = sample_rate / 2.0;
    let m_max = hz_to_mel(f_max);
    let edges: Vec<f64> = (0..n_bands + 2)
        .map(|i| mel_to_hz(m_max * i as f64 / (n_bands + 1) as f64))
        .collect();
    (0..n_bands)
        .map(|b| {
            let (lo, mid, hi) = (edges[b], edges[b + 1], edges[b + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * sample_rate / fft_size;
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}

/// Seeded random orthonormal projection (QR of a Gaussian matrix).
fn random_rotation(dim: usize, seed: &SeededRng) -> DMatrix<f64> {
    let mut rng = seed.child("stub-projection", 0);
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.normal());
    let qr = g.qr();
    qr.q()
}

/// Deterministic 128-dimensional stand-in embedding: 64 time-averaged
/// log-mel band energies and 64 mean absolute frame-to-frame deltas,
/// rotated by a seeded orthonormal projection. Silence maps to the rotated
/// log-floor constant vector regardless of clip length.
pub fn stub_embed(clip: &AudioClip, seed: &SeededRng) -> Result<Vec<f64>> {
    let spec = stft_magnitude(clip, DEFAULT_FFT_SIZE, DEFAULT_HOP)?;
    let bank = mel_filterbank(
        STUB_MEL_BANDS,
        spec.n_bins(),
        clip.sample_rate() as f64,
        DEFAULT_FFT_SIZE as f64,
    );
    let frames = spec.n_frames();
    // log-mel energies per frame
    let mut logmel = vec![vec![0.0; frames]; STUB_MEL_BANDS];
    for (b, weights) in bank.iter().enumerate() {
        for t in 0..frames {
            let mut e = 0.0;
            for (k, &w) in weights.iter().enumerate() {
                if w > 0.0 {
                    let m = spec.magnitudes[(k, t)];
                    e += w * m * m;
                }
            }
            logmel[b][t] = (e + LOG_FLOOR).ln();
        }
    }
    let mut features = Vec::with_capacity(EMBEDDING_DIM);
    for band in &logmel {
        features.push(band.iter().sum::<f64>() / frames as f64);
    }
    for band in &logmel {
        let delta = if frames > 1 {
            band.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (frames - 1) as f64
        } else {
            0.0
        };
        features.push(delta);
    }
    let rotation = random_rotation(EMBEDDING_DIM, seed);
    let embedded = rotation * DVector::from_vec(features);
    Ok(embedded.iter().copied().collect())
}

/// Write embeddings as CSV (`dim_0,...,dim_{d-1}` header, one row per clip)
/// next to a `files.txt` sidecar listing the source paths in row order.
pub fn save_embeddings_csv(
    set: &EmbeddingSet,
    csv_path: impl AsRef<Path>,
    files: &[String],
) -> Result<()> {
    let csv_path = csv_path.as_ref();
    if files.len() != set.n_clips() {
        return Err(Error::ShapeMismatch(format!(
            "{} file names for {} embeddings",
            files.len(),
            set.n_clips()
        )));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(csv_path)?);
    let header: Vec<String> = (0..set.dim()).map(|j| format!("dim_{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..set.n_clips() {
        let row: Vec<String> = (0..set.dim())
            .map(|j| format!("{}", set.vectors[(i, j)]))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    let sidecar = csv_path.with_file_name("files.txt");
    std::fs::write(sidecar, files.join("\n") + "\n")?;
    Ok(())
}

/// Binary dump of an embedding set (cache format).
pub fn save_embeddings_binary(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let data: Vec<f64> = set.vectors.transpose().iter().copied().collect();
    cache::write_array(
        path,
        &MAGIC_EMBEDDINGS,
        &[set.n_clips() as u32, set.dim() as u32],
        &data,
    )
}

/// Load embeddings from CSV (header `dim_0,...`) or from the binary cache
/// format, sniffed by the magic tag. Parse errors name the offending line.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let mut head = [0u8; 8];
    {
        use std::io::Read;
        let mut f = std::fs::File::open(path)?;
        let n = f.read(&mut head)?;
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("{} is empty", path.display()),
            });
        }
    }
    if head == MAGIC_EMBEDDINGS {
        let (dims, data) = cache::read_array(path, &MAGIC_EMBEDDINGS)?;
        if dims.len() != 2 {
            return Err(Error::ShapeMismatch(format!("embedding dims {dims:?}")));
        }
        let (n, d) = (dims[0] as usize, dims[1] as usize);
        let vectors = DMatrix::from_fn(n, d, |i, j| data[i * d + j]);
        return Ok(EmbeddingSet::new(vectors, Provenance::Ingested));
    }

    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dim = 0usize;
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if idx == 0 {
            let cols: Vec<&str> = line.split(',').collect();
            dim = cols.len();
            for (j, col) in cols.iter().enumerate() {
                if col.trim() != format!("dim_{j}") {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("bad header column '{col}', expected 'dim_{j}'"),
                    });
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("{} cells, expected {dim}", cells.len()),
            });
        }
        let mut row = Vec::with_capacity(dim);
        for cell in cells {
            row.push(cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("non-numeric cell '{cell}': {e}"),
            })?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no embedding rows".into(),
        });
    }
    EmbeddingSet::from_rows(&rows, Provenance::Ingested)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    const SR: u32 = 16_000;

    fn sine_clip(freq: f64, secs: f64) -> AudioClip {
        AudioClip::new(
            (0..(secs * SR as f64) as usize)
                .map(|i| 0.8 * (TAU * freq * i as f64 / SR as f64).sin())
                .collect(),
            SR,
        )
        .unwrap()
    }

    fn noise_clip(seed: u64, secs: f64) -> AudioClip {
        let mut rng = SeededRng::new(seed);
        AudioClip::new(
            crate::noise::uniform_noise((secs * SR as f64) as usize, &mut rng),
            SR,
        )
        .unwrap()
    }

    #[test]
    fn l2_identity_and_symmetry() {
        let a = noise_clip(1, 1.0);
        let b = noise_clip(2, 1.0);
        assert_eq!(l2_spec_distance(&a, &a).unwrap(), 0.0);
        let ab = l2_spec_distance(&a, &b).unwrap();
        let ba = l2_spec_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn l2_sine_vs_silence_equals_spectrogram_norm() {
        let sine = sine_clip(440.0, 1.0);
        let silence = AudioClip::new(vec![0.0; sine.len()], SR).unwrap();
        let got = l2_spec_distance(&sine, &silence).unwrap();
        let spec = stft_magnitude(&sine, 512, 128).unwrap();
        let want = spec.magnitudes.iter().map(|m| m * m).sum::<f64>().sqrt();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn l2_rejects_rate_and_length_mismatch() {
        let a = sine_clip(440.0, 1.0);
        let b = AudioClip::new(a.samples().to_vec(), 8_000).unwrap();
        assert!(l2_spec_distance(&a, &b).is_err());
        let c = sine_clip(440.0, 1.2);
        assert!(l2_spec_distance(&a, &c).is_err());
    }

    #[test]
    fn gaussian_fit_hand_values() {
        // 1-D data {0, 2}: mu = 1, unbiased sigma = 2
        let set = EmbeddingSet::from_rows(&[vec![0.0], vec![2.0]], Provenance::Ingested).unwrap();
        let g = fit_gaussian(&set).unwrap();
        assert!((g.mu[0] - 1.0).abs() < 1e-12);
        // n <= d adds 1e-6-scale shrinkage to the diagonal
        assert!((g.sigma[(0, 0)] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn identical_vectors_fit_epsilon_regularized_zero() {
        let v = vec![1.0, -2.0, 3.0];
        let set =
            EmbeddingSet::from_rows(&[v.clone(), v.clone()], Provenance::Ingested).unwrap();
        let g = fit_gaussian(&set).unwrap();
        for j in 0..3 {
            assert!((g.mu[j] - v[j]).abs() < 1e-12);
            for k in 0..3 {
                if j == k {
                    assert!(g.sigma[(j, k)] >= 0.0 && g.sigma[(j, k)] < 1e-5);
                } else {
                    assert_eq!(g.sigma[(j, k)], 0.0);
                }
            }
        }
    }

    #[test]
    fn frechet_scalar_closed_form() {
        // N(0,1) vs N(1,1): 1 + (1 + 1 - 2) = 1
        let a = GaussianStats {
            mu: DVector::from_vec(vec![0.0]),
            sigma: DMatrix::from_vec(1, 1, vec![1.0]),
        };
        let b = GaussianStats {
            mu: DVector::from_vec(vec![1.0]),
            sigma: DMatrix::from_vec(1, 1, vec![1.0]),
        };
        assert!((frechet_distance(&a, &b).unwrap() - 1.0).abs() < 1e-9);
        assert!(frechet_distance(&a, &a).unwrap().abs() < 1e-9);
    }

    #[test]
    fn frechet_diagonal_matches_per_dimension_closed_form() {
        let mut rng = SeededRng::new(8);
        let d = 12;
        let mu_a = DVector::from_fn(d, |_, _| rng.uniform(-2.0, 2.0));
        let mu_b = DVector::from_fn(d, |_, _| rng.uniform(-2.0, 2.0));
        let va: Vec<f64> = (0..d).map(|_| rng.uniform(0.1, 3.0)).collect();
        let vb: Vec<f64> = (0..d).map(|_| rng.uniform(0.1, 3.0)).collect();
        let a = GaussianStats {
            mu: mu_a.clone(),
            sigma: DMatrix::from_diagonal(&DVector::from_vec(va.clone())),
        };
        let b = GaussianStats {
            mu: mu_b.clone(),
            sigma: DMatrix::from_diagonal(&DVector::from_vec(vb.clone())),
        };
        let want: f64 = (0..d)
            .map(|j| {
                let dm = mu_a[j] - mu_b[j];
                dm * dm + va[j] + vb[j] - 2.0 * (va[j] * vb[j]).sqrt()
            })
            .sum();
        let got = frechet_distance(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn frechet_equal_covariance_reduces_to_mean_separation() {
        let mut rng = SeededRng::new(10);
        let d = 8;
        // a random PSD covariance shared by both
        let m = DMatrix::from_fn(d, d, |_, _| rng.uniform(-1.0, 1.0));
        let sigma = &m * m.transpose() + DMatrix::identity(d, d) * 0.1;
        let mu_a = DVector::from_fn(d, |_, _| rng.uniform(-2.0, 2.0));
        let mu_b = DVector::from_fn(d, |_, _| rng.uniform(-2.0, 2.0));
        let a = GaussianStats {
            mu: mu_a.clone(),
            sigma: sigma.clone(),
        };
        let b = GaussianStats {
            mu: mu_b.clone(),
            sigma,
        };
        let want = (mu_a - mu_b).norm_squared();
        let got = frechet_distance(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn frechet_is_rotation_invariant() {
        let mut rng = SeededRng::new(4);
        let d = 10;
        let make = |rng: &mut SeededRng| {
            let m = DMatrix::from_fn(d, d, |_, _| rng.uniform(-1.0, 1.0));
            GaussianStats {
                mu: DVector::from_fn(d, |_, _| rng.uniform(-1.0, 1.0)),
                sigma: &m * m.transpose(),
            }
        };
        let a = make(&mut rng);
        let b = make(&mut rng);
        let q = random_rotation(d, &SeededRng::new(123));
        let rot = |g: &GaussianStats| GaussianStats {
            mu: &q * &g.mu,
            sigma: &q * &g.sigma * q.transpose(),
        };
        let base = frechet_distance(&a, &b).unwrap();
        let rotated = frechet_distance(&rot(&a), &rot(&b)).unwrap();
        assert!(
            (base - rotated).abs() <= 1e-8 * base.max(1.0),
            "{base} vs {rotated}"
        );
    }

    #[test]
    fn stub_embedding_is_deterministic_and_floor_stable() {
        let seed = SeededRng::new(99);
        let clip = noise_clip(5, 1.0);
        let e1 = stub_embed(&clip, &seed).unwrap();
        let e2 = stub_embed(&clip, &seed).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.len(), EMBEDDING_DIM);

        // silence embeds to the rotated log-floor vector, independent of length
        let s1 = stub_embed(&AudioClip::new(vec![0.0; 16_000], SR).unwrap(), &seed).unwrap();
        let s2 = stub_embed(&AudioClip::new(vec![0.0; 24_000], SR).unwrap(), &seed).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(s1.iter().any(|v| v.abs() > 1e-6));
    }

    #[test]
    fn embeddings_separate_extreme_fbnoise_parameters() {
        use crate::syntex::{synthesize, TextureId, TextureSpec};
        use std::collections::BTreeMap;
        let seed = SeededRng::new(7);
        let mut wins = 0;
        let trials = 50;
        for t in 0..trials {
            let mk = |p: f64, s: u64| {
                let mut params = BTreeMap::new();
                params.insert("pitchedness".to_string(), p);
                let spec =
                    TextureSpec::new(TextureId::Fbnoise, &params, 1.5, SR, s).unwrap();
                stub_embed(&synthesize(&spec).unwrap(), &seed).unwrap()
            };
            let a1 = mk(0.0, 1000 + t);
            let a2 = mk(0.0, 2000 + t);
            let b = mk(0.9, 3000 + t);
            let dist = |x: &[f64], y: &[f64]| {
                x.iter()
                    .zip(y)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt()
            };
            if dist(&a1, &a2) < dist(&a1, &b) {
                wins += 1;
            }
        }
        assert!(wins * 100 >= trials * 80, "same-param closer in {wins}/{trials}");
    }

    #[test]
    fn embedding_csv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("emb.csv");
        let rows = vec![
            vec![1.0, 2.0, 3.0, 4.0],
            vec![-1.5, 0.25, 0.0, 9.75],
            vec![10.0, 20.0, 30.0, 40.0],
        ];
        let set = EmbeddingSet::from_rows(&rows, Provenance::Stub).unwrap();
        save_embeddings_csv(&set, &csv, &["a.wav".into(), "b.wav".into(), "c.wav".into()])
            .unwrap();
        let loaded = load_embeddings(&csv).unwrap();
        assert_eq!(loaded.provenance, Provenance::Ingested);
        assert_eq!(loaded.n_clips(), 3);
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(loaded.vectors[(i, j)], rows[i][j]);
            }
        }
        assert!(dir.path().join("files.txt").is_file());

        // ragged row names its line
        std::fs::write(&csv, "dim_0,dim_1\n1.0,2.0\n3.0\n").unwrap();
        match load_embeddings(&csv) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        // empty file is an error, not an empty set
        std::fs::write(&csv, "").unwrap();
        assert!(matches!(load_embeddings(&csv), Err(Error::Parse { .. })));
    }

    #[test]
    fn embedding_binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.bin");
        let rows = vec![vec![1.0, -2.0], vec![0.5, 4.0]];
        let set = EmbeddingSet::from_rows(&rows, Provenance::Stub).unwrap();
        save_embeddings_binary(&set, &path).unwrap();
        let loaded = load_embeddings(&path).unwrap();
        assert_eq!(loaded.vectors, set.vectors);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn l2_triangle_inequality(sa in 0u64..200, sb in 200u64..400, sc in 400u64..600) {
            let a = noise_clip(sa, 0.5);
            let b = noise_clip(sb, 0.5);
            let c = noise_clip(sc, 0.5);
            let ab = l2_spec_distance(&a, &b).unwrap();
            let bc = l2_spec_distance(&b, &c).unwrap();
            let ac = l2_spec_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
        }

        #[test]
        fn covariance_is_symmetric(seed in 0u64..500) {
            let mut rng = SeededRng::new(seed);
            let rows: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..4).map(|_| rng.uniform(-3.0, 3.0)).collect())
                .collect();
            let set = EmbeddingSet::from_rows(&rows, Provenance::Ingested).unwrap();
            let g = fit_gaussian(&set).unwrap();
            for j in 0..4 {
                for k in 0..4 {
                    prop_assert!((g.sigma[(j, k)] - g.sigma[(k, j)]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn frechet_symmetry(seed in 0u64..300) {
            let mut rng = SeededRng::new(seed);
            let d = 6;
            let make = |rng: &mut SeededRng| {
                let m = DMatrix::from_fn(d, d, |_, _| rng.uniform(-1.0, 1.0));
                GaussianStats {
                    mu: DVector::from_fn(d, |_, _| rng.uniform(-1.0, 1.0)),
                    sigma: &m * m.transpose(),
                }
            };
            let a = make(&mut rng);
            let b = make(&mut rng);
            let ab = frechet_distance(&a, &b).unwrap();
            let ba = frechet_distance(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-9 * ab.max(1.0));
        }
    }
}
