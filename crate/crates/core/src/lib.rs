//! Procedural audio texture synthesis and parameter-sensitive distance metrics.
//!
//! The crate has three layers:
//!
//! * signal primitives — STFT, analytic envelopes, IIR filters, gradient
//!   noise, WAV I/O ([`audio`], [`spectrum`], [`envelope`], [`filters`],
//!   [`noise`], [`stats`]);
//! * texture synthesizers — ten parametric texture families plus the shared
//!   irregular event scheduler and corpus rendering ([`syntex`]);
//! * distance metrics and the experiment harness — Gram-matrix metrics over a
//!   random convolution ensemble ([`gram`]), cochlear-model statistics
//!   ([`cochlear`]), spectrogram L2 and Fréchet distance over embedding
//!   distributions ([`distribution`]), and the consistency / sensitivity
//!   experiment drivers ([`experiment`]).
//!
//! Everything is deterministic under explicit seeds; see [`rng::SeededRng`].

pub mod analysis;
pub mod audio;
pub mod cache;
pub mod cochlear;
pub mod distribution;
pub mod envelope;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod gram;
pub mod noise;
pub mod rng;
pub mod spectrum;
pub mod stats;
pub mod syntex;

pub use audio::AudioClip;
pub use error::{Error, Result};
pub use rng::SeededRng;
pub use spectrum::Spectrogram;

/// Crate version string recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
