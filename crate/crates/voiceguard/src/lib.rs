//! Detection of AI-converted speech from 1-second audio windows.
//!
//! The pipeline: decode WAV audio ([`audio_io`]), extract a 26-value
//! temporal-spectral feature vector per second ([`dsp`]), analyze feature
//! separability between real and converted speech ([`stats`]), train one of
//! nine classifier families ([`models`]), and evaluate under stratified
//! k-fold cross-validation with inference-latency benchmarks ([`eval`]).
//! [`cli`] ties the stages into the `voiceguard` command-line tool.
//!
//! The signal-processing layers ([`audio_io`], [`dsp`]) are generic over the
//! scalar type ([`num::Scalar`], either `f32` or `f64`); the analysis layers
//! operate on `f64`, and the aliases below fix the defaults used by the CLI.

pub mod audio_io;
pub mod cli;
pub mod dataset;
pub mod dsp;
pub mod eval;
pub mod models;
pub mod num;
pub mod stats;

pub use num::Scalar;

/// Scalar type the command-line pipeline runs on.
pub type DefaultScalar = f64;
/// Mono audio clip at the default scalar type.
pub type Clip = audio_io::AudioClip<DefaultScalar>;
/// 26-value feature row at the default scalar type.
pub type Features = dsp::FeatureVector<DefaultScalar>;
/// Labeled feature dataset consumed by the analysis layers.
pub type Dataset = dataset::LabeledDataset;
/// Trained classifier produced by [`models::TrainedModel::fit`].
pub type Model = models::TrainedModel;

/// Sample rate every window is converted to before feature extraction.
pub const CANONICAL_SAMPLE_RATE: u32 = 22_050;
/// Analysis window length in seconds.
pub const WINDOW_SECONDS: f64 = 1.0;
