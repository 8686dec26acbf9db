//! Audio ingestion: WAV decoding, mono normalization, resampling, and
//! segmentation into fixed-length analysis windows.

mod resample;
mod wav;

pub use resample::resample;
pub use wav::{decode_wav, encode_wav_16bit, load_wav, write_wav_16bit};

use std::path::Path;

use thiserror::Error;

use crate::num::Scalar;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed container: {0}")]
    MalformedContainer(String),
    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("audio stream contains no samples")]
    EmptyAudio,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A mono sample sequence with its sample rate.
///
/// Samples are finite and within [-1, 1] after decode normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<F> {
    pub samples: Vec<F>,
    pub sample_rate_hz: u32,
}

impl<F: Scalar> AudioClip<F> {
    pub fn new(samples: Vec<F>, sample_rate_hz: u32) -> Self {
        assert!(sample_rate_hz > 0, "sample rate must be positive");
        Self {
            samples,
            sample_rate_hz,
        }
    }

    /// Clip length in seconds.
    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }
}

/// Convenience wrapper: decode a WAV file.
pub fn load<F: Scalar>(path: &Path) -> Result<AudioClip<F>, AudioError> {
    load_wav(path)
}

/// Split a clip into consecutive non-overlapping windows of
/// `window_seconds`. The trailing partial remainder is discarded.
pub fn segment<F: Scalar>(clip: &AudioClip<F>, window_seconds: f64) -> Vec<AudioClip<F>> {
    assert!(window_seconds > 0.0, "window length must be positive");
    assert!(!clip.samples.is_empty(), "cannot segment an empty clip");
    let window_len = (window_seconds * f64::from(clip.sample_rate_hz)).round() as usize;
    if window_len == 0 {
        return Vec::new();
    }
    clip.samples
        .chunks_exact(window_len)
        .map(|w| AudioClip::new(w.to_vec(), clip.sample_rate_hz))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn const_clip(value: f64, rate: u32, seconds: f64) -> AudioClip<f64> {
        let n = (seconds * f64::from(rate)).round() as usize;
        AudioClip::new(vec![value; n], rate)
    }

    #[test]
    fn ten_second_clip_gives_ten_windows() {
        let clip = const_clip(0.1, 22050, 10.0);
        let windows = segment(&clip, 1.0);
        assert_eq!(windows.len(), 10);
        for w in &windows {
            assert_eq!(w.samples.len(), 22050);
        }
    }

    #[test]
    fn short_clip_gives_no_windows() {
        let clip = const_clip(0.1, 22050, 0.5);
        assert!(segment(&clip, 1.0).is_empty());
    }

    #[test]
    fn table_one_corpus_window_count() {
        // 62 min 22 s of audio at 1-second windows
        let clip = const_clip(0.0, 1000, 62.0 * 60.0 + 22.0);
        assert_eq!(segment(&clip, 1.0).len(), 3742);
    }

    #[test]
    fn segment_concat_reproduces_prefix() {
        let rate = 100;
        let samples: Vec<f64> = (0..257).map(|i| (i as f64).sin()).collect();
        let clip = AudioClip::new(samples.clone(), rate);
        let windows = segment(&clip, 1.0);
        let rebuilt: Vec<f64> = windows.iter().flat_map(|w| w.samples.clone()).collect();
        assert_eq!(rebuilt.len(), 200);
        assert_eq!(&samples[..200], &rebuilt[..]);
    }

    #[test]
    fn wav_roundtrip_against_synthesizer() {
        let rate = 22050;
        let n = rate as usize;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                0.9 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / f64::from(rate)).sin()
            })
            .collect();
        let clip = AudioClip::new(samples.clone(), rate);
        let bytes = encode_wav_16bit(&clip);
        let back = decode_wav::<f64>(&bytes).unwrap();
        assert_eq!(back.samples.len(), n);
        for (orig, round) in samples.iter().zip(&back.samples) {
            // writer quantizes by round(x*32768), reader divides by 32768:
            // half an LSB of drift at most for non-clipping amplitudes
            assert!(
                (orig - round).abs() <= 0.5 / 32768.0 + 1e-12,
                "sample drifted: {orig} vs {round}"
            );
        }
    }
}
