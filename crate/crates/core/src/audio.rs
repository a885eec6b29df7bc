//! Mono audio buffers and WAV file I/O.

use std::path::Path;

use crate::error::{Error, Result};

/// Canonical sample rate for synthesized corpora.
pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// A mono sample buffer with its sample rate. The universal signal currency:
/// every synthesizer produces one and every metric consumes them.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    /// Wrap a sample buffer, validating that it is non-empty, finite, and the
    /// rate is positive.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("audio clip must contain samples"));
        }
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        Ok(AudioClip {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Scale so the absolute peak sits at `peak`. A digitally silent buffer
    /// is returned unchanged.
    pub fn peak_normalized(mut self, peak: f64) -> Self {
        let max = self.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max > 0.0 {
            let g = peak / max;
            for s in &mut self.samples {
                *s *= g;
            }
        }
        self
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Sample encodings supported for writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

/// Load a RIFF/WAVE file. PCM-16 and IEEE float-32 are accepted; stereo is
/// averaged down to mono.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(map_hound_err)?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedCodec(format!(
            "{} channels in {}",
            spec.channels,
            path.display()
        )));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound_err)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedCodec(format!(
                "{fmt:?} {bits}-bit in {}",
                path.display()
            )))
        }
    };

    let mono = if spec.channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|lr| 0.5 * (lr[0] + lr[1]))
            .collect()
    } else {
        interleaved
    };
    AudioClip::new(mono, spec.sample_rate)
}

/// Write a clip as mono WAV with the requested encoding. PCM-16 samples
/// outside `[-1, 1]` are hard-clipped with a logged warning.
pub fn save_wav(clip: &AudioClip, path: impl AsRef<Path>, encoding: WavEncoding) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => hound::SampleFormat::Int,
            WavEncoding::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(map_hound_err)?;
    match encoding {
        WavEncoding::Pcm16 => {
            let mut clipped = 0usize;
            for &s in clip.samples() {
                let mut v = s;
                if v > 1.0 || v < -1.0 {
                    clipped += 1;
                    v = v.clamp(-1.0, 1.0);
                }
                // symmetric with the decode scale of 1/32768, so the
                // round-trip error stays within one quantization step
                let q = (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                writer.write_sample(q).map_err(map_hound_err)?;
            }
            if clipped > 0 {
                log::warn!(
                    "hard-clipped {clipped} samples writing {} as pcm-16",
                    path.display()
                );
            }
        }
        WavEncoding::Float32 => {
            for &s in clip.samples() {
                writer.write_sample(s as f32).map_err(map_hound_err)?;
            }
        }
    }
    writer.finalize().map_err(map_hound_err)?;
    Ok(())
}

fn map_hound_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        hound::Error::FormatError(msg) => Error::Truncated(msg.to_string()),
        hound::Error::TooWide | hound::Error::UnfinishedSample => {
            Error::Truncated(format!("{e}"))
        }
        hound::Error::Unsupported => Error::UnsupportedCodec("unsupported wav format".into()),
        other => Error::Truncated(format!("{other}")),
    }
}
