//! The 26 temporal–spectral features computed on 1-second windows.
//!
//! Spectral features derive from a magnitude [`Spectrogram`] (periodic Hann
//! window, reflect-centered frames). [`zero_crossing_rate`] and [`rms`]
//! frame the raw waveform without centering, so their frame counts differ
//! from the spectrogram's — intentional, it mirrors the extraction tooling
//! the reference statistics were produced with.

pub mod mel;

use crate::audio_io::AudioClip;
use crate::num::Scalar;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mel::{hz_to_mel, mel_to_hz, mfcc, MelFilterbank};

/// FFT size for the analysis window.
pub const N_FFT: usize = 2048;
/// Hop between successive frames, in samples.
pub const HOP_LENGTH: usize = 512;
/// Number of mel filters backing the MFCCs.
pub const N_MELS: usize = 128;
/// Number of cepstral coefficients kept.
pub const N_MFCC: usize = 20;
/// Cumulative-magnitude fraction defining the rolloff frequency.
pub const ROLLOFF_FRACTION: f64 = 0.85;
/// chroma + rms + centroid + bandwidth + rolloff + zcr + 20 MFCCs.
pub const NUM_FEATURES: usize = 6 + N_MFCC;

#[derive(Debug, Error)]
pub enum DspError {
    /// The analysis window has fewer samples than framing requires.
    #[error("window of {got} samples is too short, need at least {needed}")]
    WindowTooShort { needed: usize, got: usize },
}

/// Magnitude spectrogram: `n_frames` rows of `n_fft/2 + 1` bins.
#[derive(Debug, Clone)]
pub struct Spectrogram<F> {
    mags: Vec<F>,
    n_frames: usize,
    n_bins: usize,
    n_fft: usize,
    hop: usize,
    sample_rate_hz: u32,
}

impl<F: Scalar> Spectrogram<F> {
    /// Assemble a spectrogram from row-major magnitudes. Intended for
    /// synthetic spectra in tests and tooling; [`stft`] is the normal source.
    pub fn from_magnitudes(mags: Vec<F>, n_fft: usize, hop: usize, sample_rate_hz: u32) -> Self {
        let n_bins = n_fft / 2 + 1;
        assert!(!mags.is_empty() && mags.len() % n_bins == 0);
        assert!(mags.iter().all(|m| *m >= F::zero() && m.is_finite()));
        let n_frames = mags.len() / n_bins;
        Self {
            mags,
            n_frames,
            n_bins,
            n_fft,
            hop,
            sample_rate_hz,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// Magnitudes of frame `m`.
    pub fn frame(&self, m: usize) -> &[F] {
        &self.mags[m * self.n_bins..(m + 1) * self.n_bins]
    }

    /// Center frequency of bin `k` in Hz.
    pub fn bin_frequency(&self, k: usize) -> F {
        F::from_f64_c(k as f64 * f64::from(self.sample_rate_hz) / self.n_fft as f64)
    }
}

/// Short-time Fourier transform magnitudes.
///
/// Frame `m` is centered at sample `m*hop` of the input; the ends are
/// reflect-padded by `n_fft/2` samples, which requires the input to hold at
/// least `n_fft/2 + 1` samples. Yields `1 + len/hop` frames.
pub fn stft<F: Scalar>(
    window: &AudioClip<F>,
    n_fft: usize,
    hop: usize,
) -> Result<Spectrogram<F>, DspError> {
    assert!(n_fft.is_power_of_two(), "n_fft must be a power of two");
    assert!(hop > 0);
    let x = &window.samples;
    let n = x.len();
    let pad = n_fft / 2;
    if n < pad + 1 {
        return Err(DspError::WindowTooShort {
            needed: pad + 1,
            got: n,
        });
    }

    // reflect padding without repeating the edge sample
    let mut padded = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        padded.push(x[i]);
    }
    padded.extend_from_slice(x);
    for i in ((n - 1 - pad)..(n - 1)).rev() {
        padded.push(x[i]);
    }

    let hann: Vec<F> = (0..n_fft)
        .map(|i| {
            let phase = 2.0 * std::f64::consts::PI * i as f64 / n_fft as f64;
            F::from_f64_c(0.5 - 0.5 * phase.cos())
        })
        .collect();

    let mut planner = FftPlanner::<F>::new();
    let fft = planner.plan_fft_forward(n_fft);

    let n_frames = n / hop + 1;
    let n_bins = n_fft / 2 + 1;
    let mut mags = Vec::with_capacity(n_frames * n_bins);
    let mut buf: Vec<Complex<F>> = vec![Complex::new(F::zero(), F::zero()); n_fft];
    for m in 0..n_frames {
        let start = m * hop;
        for j in 0..n_fft {
            buf[j] = Complex::new(padded[start + j] * hann[j], F::zero());
        }
        fft.process(&mut buf);
        mags.extend(buf[..n_bins].iter().map(|c| (c.re * c.re + c.im * c.im).sqrt()));
    }

    Ok(Spectrogram {
        mags,
        n_frames,
        n_bins,
        n_fft,
        hop,
        sample_rate_hz: window.sample_rate_hz,
    })
}

/// Per-frame 12-class chroma vectors, max-normalized per frame.
///
/// Each bin's magnitude is folded onto the pitch class of its center
/// frequency (rounded MIDI note mod 12, A4 = 440 Hz = note 69); the DC bin
/// carries no pitch and is skipped. All-zero frames stay all-zero.
pub fn chroma_frames<F: Scalar>(spec: &Spectrogram<F>) -> Vec<[F; 12]> {
    // pitch class per bin is a property of the geometry, not the frame
    let class_of_bin: Vec<usize> = (0..spec.n_bins())
        .map(|k| {
            if k == 0 {
                return usize::MAX;
            }
            let f = spec.bin_frequency(k).to_f64_c();
            let midi = (69.0 + 12.0 * (f / 440.0).log2()).round() as i64;
            midi.rem_euclid(12) as usize
        })
        .collect();

    (0..spec.n_frames())
        .map(|m| {
            let mut classes = [F::zero(); 12];
            for (k, &s) in spec.frame(m).iter().enumerate() {
                if class_of_bin[k] != usize::MAX {
                    classes[class_of_bin[k]] += s;
                }
            }
            let max = classes.iter().fold(F::zero(), |a, &b| a.max(b));
            if max > F::zero() {
                for c in &mut classes {
                    *c /= max;
                }
            }
            classes
        })
        .collect()
}

/// Grand mean of the normalized chroma matrix over all frames and classes.
pub fn chroma_mean<F: Scalar>(spec: &Spectrogram<F>) -> F {
    let frames = chroma_frames(spec);
    let total: F = frames.iter().flat_map(|c| c.iter().copied()).sum();
    total / F::from_count(frames.len() * 12)
}

/// Per-frame spectral centroid in Hz; zero-energy frames yield 0.
pub fn spectral_centroid<F: Scalar>(spec: &Spectrogram<F>) -> Vec<F> {
    (0..spec.n_frames())
        .map(|m| {
            let mut num = F::zero();
            let mut den = F::zero();
            for (k, &s) in spec.frame(m).iter().enumerate() {
                num += spec.bin_frequency(k) * s;
                den += s;
            }
            if den > F::zero() {
                num / den
            } else {
                F::zero()
            }
        })
        .collect()
}

/// Per-frame spectral bandwidth in Hz: magnitude-weighted standard
/// deviation of bin frequencies around the centroid. Zero-energy frames
/// yield 0.
pub fn spectral_bandwidth<F: Scalar>(spec: &Spectrogram<F>) -> Vec<F> {
    let centroids = spectral_centroid(spec);
    (0..spec.n_frames())
        .map(|m| {
            let sc = centroids[m];
            let mut num = F::zero();
            let mut den = F::zero();
            for (k, &s) in spec.frame(m).iter().enumerate() {
                let d = spec.bin_frequency(k) - sc;
                num += d * d * s;
                den += s;
            }
            if den > F::zero() {
                (num / den).sqrt()
            } else {
                F::zero()
            }
        })
        .collect()
}

/// Per-frame rolloff frequency in Hz: center frequency of the smallest bin
/// index at which the cumulative magnitude reaches `fraction` of the frame
/// total. Zero-energy frames yield 0.
pub fn spectral_rolloff<F: Scalar>(spec: &Spectrogram<F>, fraction: f64) -> Vec<F> {
    assert!(fraction > 0.0 && fraction < 1.0);
    (0..spec.n_frames())
        .map(|m| {
            let frame = spec.frame(m);
            let total: F = frame.iter().copied().sum();
            if total <= F::zero() {
                return F::zero();
            }
            let threshold = F::from_f64_c(fraction) * total;
            let mut cum = F::zero();
            for (k, &s) in frame.iter().enumerate() {
                cum += s;
                if cum >= threshold {
                    return spec.bin_frequency(k);
                }
            }
            spec.bin_frequency(spec.n_bins() - 1)
        })
        .collect()
}

/// Per-frame zero-crossing rate over non-centered frames.
///
/// ZCR = (1/(2·frame_len)) · Σ |sgn(x[n]) − sgn(x[n−1])| with sgn(0) = +1,
/// i.e. sign changes per sample: a pure tone of frequency f gives ≈ 2f/sr
/// and the maximally alternating signal approaches 1.
pub fn zero_crossing_rate<F: Scalar>(window: &AudioClip<F>, frame_len: usize, hop: usize) -> Vec<F> {
    frames_of(&window.samples, frame_len, hop)
        .map(|frame| {
            let mut acc = 0u32;
            for pair in frame.windows(2) {
                acc += u32::from(sgn_pm1(pair[0]) != sgn_pm1(pair[1])) * 2;
            }
            F::from_f64_c(f64::from(acc)) / (F::from_f64_c(2.0) * F::from_count(frame_len))
        })
        .collect()
}

/// Per-frame root-mean-square amplitude over non-centered frames.
pub fn rms<F: Scalar>(window: &AudioClip<F>, frame_len: usize, hop: usize) -> Vec<F> {
    frames_of(&window.samples, frame_len, hop)
        .map(|frame| {
            let sq: F = frame.iter().map(|&x| x * x).sum();
            (sq / F::from_count(frame_len)).sqrt()
        })
        .collect()
}

fn sgn_pm1<F: Scalar>(x: F) -> i8 {
    if x < F::zero() {
        -1
    } else {
        1
    }
}

fn frames_of<F>(samples: &[F], frame_len: usize, hop: usize) -> impl Iterator<Item = &[F]> {
    assert!(
        frame_len <= samples.len(),
        "frame_len {} exceeds window length {}",
        frame_len,
        samples.len()
    );
    assert!(hop > 0);
    let n_frames = 1 + (samples.len() - frame_len) / hop;
    (0..n_frames).map(move |m| &samples[m * hop..m * hop + frame_len])
}

/// The ordered 26-feature summary of one analysis window:
/// `[chroma, rms, centroid, bandwidth, rolloff, zcr, mfcc 1..20]`,
/// each the mean of the corresponding per-frame values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<F>(pub [F; NUM_FEATURES]);

impl<F: Scalar> FeatureVector<F> {
    pub fn new(values: [F; NUM_FEATURES]) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "non-finite feature");
        Self(values)
    }

    pub fn as_slice(&self) -> &[F] {
        &self.0
    }

    /// Lossless widening to f64 for numerics that are fixed at f64.
    pub fn to_f64(&self) -> [f64; NUM_FEATURES] {
        let mut out = [0.0; NUM_FEATURES];
        for (o, v) in out.iter_mut().zip(self.0.iter()) {
            *o = v.to_f64_c();
        }
        out
    }
}

/// Extract the full feature vector from one analysis window
/// (nominally 1 s of audio at the canonical rate).
pub fn extract_features<F: Scalar>(window: &AudioClip<F>) -> Result<FeatureVector<F>, DspError> {
    if window.samples.len() < N_FFT {
        return Err(DspError::WindowTooShort {
            needed: N_FFT,
            got: window.samples.len(),
        });
    }
    let spec = stft(window, N_FFT, HOP_LENGTH)?;

    let mut values = [F::zero(); NUM_FEATURES];
    values[0] = chroma_mean(&spec);
    values[1] = mean(&rms(window, N_FFT, HOP_LENGTH));
    values[2] = mean(&spectral_centroid(&spec));
    values[3] = mean(&spectral_bandwidth(&spec));
    values[4] = mean(&spectral_rolloff(&spec, ROLLOFF_FRACTION));
    values[5] = mean(&zero_crossing_rate(window, N_FFT, HOP_LENGTH));

    let coeffs = mfcc(&spec, N_MELS, N_MFCC);
    for c in 0..N_MFCC {
        let col: Vec<F> = coeffs.iter().map(|row| row[c]).collect();
        values[6 + c] = mean(&col);
    }

    Ok(FeatureVector::new(values))
}

pub(crate) fn mean<F: Scalar>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::zero();
    }
    let total: F = xs.iter().copied().sum();
    total / F::from_count(xs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CANONICAL_SAMPLE_RATE;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SR: u32 = CANONICAL_SAMPLE_RATE;

    fn clip(samples: Vec<f64>) -> AudioClip<f64> {
        AudioClip::new(samples, SR)
    }

    fn sine(freq: f64, seconds: f64, amp: f64) -> AudioClip<f64> {
        let n = (seconds * f64::from(SR)).round() as usize;
        clip(
            (0..n)
                .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(SR)).sin())
                .collect(),
        )
    }

    fn noise(seed: u64, n: usize) -> AudioClip<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        clip((0..n).map(|_| rng.gen_range(-0.8..0.8)).collect())
    }

    /// Direct O(N^2) DFT magnitude oracle over one windowed frame.
    fn dft_mags(frame: &[f64]) -> Vec<f64> {
        let n = frame.len();
        (0..n / 2 + 1)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, &x) in frame.iter().enumerate() {
                    let phase = -2.0 * std::f64::consts::PI * k as f64 * j as f64 / n as f64;
                    re += x * phase.cos();
                    im += x * phase.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    /// Re-create the padded, windowed frame `m` exactly as stft defines it.
    fn windowed_frame(x: &[f64], m: usize, n_fft: usize, hop: usize) -> Vec<f64> {
        let pad = n_fft / 2;
        let n = x.len();
        let mut padded = Vec::new();
        for i in (1..=pad).rev() {
            padded.push(x[i]);
        }
        padded.extend_from_slice(x);
        for i in ((n - 1 - pad)..(n - 1)).rev() {
            padded.push(x[i]);
        }
        (0..n_fft)
            .map(|j| {
                let w = 0.5
                    - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / n_fft as f64).cos();
                padded[m * hop + j] * w
            })
            .collect()
    }

    #[test]
    fn stft_all_zero_window_is_all_zero() {
        let spec = stft(&clip(vec![0.0; SR as usize]), N_FFT, HOP_LENGTH).unwrap();
        assert_eq!(spec.n_frames(), SR as usize / HOP_LENGTH + 1);
        assert_eq!(spec.n_bins(), N_FFT / 2 + 1);
        for m in 0..spec.n_frames() {
            assert!(spec.frame(m).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn stft_too_short_window_is_rejected() {
        let err = stft(&clip(vec![0.1; N_FFT / 2]), N_FFT, HOP_LENGTH).unwrap_err();
        match err {
            DspError::WindowTooShort { needed, got } => {
                assert_eq!(needed, N_FFT / 2 + 1);
                assert_eq!(got, N_FFT / 2);
            }
        }
    }

    #[test]
    fn stft_impulse_matches_direct_dft_and_parseval() {
        let mut x = vec![0.0; SR as usize];
        x[11025] = 1.0;
        let spec = stft(&clip(x.clone()), N_FFT, HOP_LENGTH).unwrap();

        // frame 22 contains the impulse; 0 does not
        for m in [0usize, 20, 22, 23] {
            let frame = windowed_frame(&x, m, N_FFT, HOP_LENGTH);
            let oracle = dft_mags(&frame);
            let got = spec.frame(m);
            for (k, (&g, &o)) in got.iter().zip(&oracle).enumerate() {
                let tol = 1e-6 * o.abs().max(1e-9);
                assert!((g - o).abs() <= tol, "frame {m} bin {k}: {g} vs {o}");
            }

            // Parseval over the full (two-sided) spectrum
            let time_energy: f64 = frame.iter().map(|v| v * v).sum();
            if time_energy > 0.0 {
                let mut freq_energy = got[0] * got[0] + got[N_FFT / 2] * got[N_FFT / 2];
                for &v in &got[1..N_FFT / 2] {
                    freq_energy += 2.0 * v * v;
                }
                freq_energy /= N_FFT as f64;
                assert!(
                    (freq_energy - time_energy).abs() <= 1e-6 * time_energy,
                    "frame {m}: {freq_energy} vs {time_energy}"
                );
                // impulse through a window is a flat spectrum
                let max = got.iter().cloned().fold(f64::MIN, f64::max);
                let min = got.iter().cloned().fold(f64::MAX, f64::min);
                assert!((max - min).abs() <= 1e-9 * max);
            }
        }
    }

    #[test]
    fn stft_sine_peaks_at_expected_bin() {
        let spec = stft(&sine(440.0, 1.0, 0.9), N_FFT, HOP_LENGTH).unwrap();
        let expect = (440.0 * N_FFT as f64 / f64::from(SR)).round() as usize;
        assert_eq!(expect, 41);
        let last = spec.n_frames() - 1;
        for m in 0..spec.n_frames() {
            let frame = spec.frame(m);
            let argmax = (0..frame.len())
                .max_by(|&a, &b| frame[a].partial_cmp(&frame[b]).unwrap())
                .unwrap();
            if m == 0 || m == last {
                // reflected boundary frames see a folded waveform whose
                // spectrum leaks one bin either way
                assert!(argmax.abs_diff(expect) <= 1, "edge frame {m}: {argmax}");
            } else {
                assert_eq!(argmax, expect, "frame {m}");
            }
        }
    }

    #[test]
    fn centroid_and_bandwidth_on_point_masses() {
        // synthetic geometry with 50 Hz bins so 500/1000/1500 Hz are exact
        let n_bins = N_FFT / 2 + 1;
        let mut one_bin = vec![0.0; n_bins];
        one_bin[20] = 3.0; // 1000 Hz
        let spec = Spectrogram::from_magnitudes(one_bin, N_FFT, HOP_LENGTH, 102_400);
        assert_eq!(spectral_centroid(&spec), vec![1000.0]);
        assert_eq!(spectral_bandwidth(&spec), vec![0.0]);

        let mut two_bins = vec![0.0f64; n_bins];
        two_bins[10] = 2.5; // 500 Hz
        two_bins[30] = 2.5; // 1500 Hz
        let spec = Spectrogram::from_magnitudes(two_bins, N_FFT, HOP_LENGTH, 102_400);
        let sc = spectral_centroid(&spec)[0];
        let sb = spectral_bandwidth(&spec)[0];
        assert!((sc - 1000.0).abs() < 1e-9, "centroid {sc}");
        assert!((sb - 500.0).abs() < 1e-9, "bandwidth {sb}");

        // zero-energy frame falls back to 0 everywhere
        let spec = Spectrogram::from_magnitudes(vec![0.0; n_bins], N_FFT, HOP_LENGTH, SR);
        assert_eq!(spectral_centroid(&spec), vec![0.0]);
        assert_eq!(spectral_bandwidth(&spec), vec![0.0]);
        assert_eq!(spectral_rolloff(&spec, ROLLOFF_FRACTION), vec![0.0]);
        assert_eq!(chroma_mean(&spec), 0.0);
    }

    #[test]
    fn rolloff_uniform_spectrum_hits_derived_bin() {
        let n_bins = N_FFT / 2 + 1;
        let spec = Spectrogram::from_magnitudes(vec![1.0; n_bins], N_FFT, HOP_LENGTH, SR);
        // smallest K with (K+1) >= 0.85 * 1025 => K = 871
        let expect = 871.0 * f64::from(SR) / N_FFT as f64;
        let got = spectral_rolloff(&spec, ROLLOFF_FRACTION)[0];
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");

        let mut point = vec![0.0; n_bins];
        point[123] = 0.7;
        let spec = Spectrogram::from_magnitudes(point, N_FFT, HOP_LENGTH, SR);
        let got = spectral_rolloff(&spec, ROLLOFF_FRACTION)[0];
        assert!((got - 123.0 * f64::from(SR) / N_FFT as f64).abs() < 1e-9);
    }

    #[test]
    fn chroma_pure_tone_saturates_its_pitch_class() {
        let spec = stft(&sine(440.0, 1.0, 0.5), N_FFT, HOP_LENGTH).unwrap();
        let frames = chroma_frames(&spec);
        for (m, classes) in frames.iter().enumerate() {
            // A4 = MIDI 69 => pitch class 9
            assert_eq!(classes[9], 1.0, "frame {m}");
            for (c, &v) in classes.iter().enumerate() {
                assert!((0.0..=1.0).contains(&v));
                if c != 9 {
                    assert!(v < 1.0, "frame {m} class {c} ties the tone's class");
                }
            }
        }
        let mean = chroma_mean(&spec);
        assert!(mean > 0.0 && mean < 1.0);
    }

    #[test]
    fn zcr_constant_alternating_and_tone() {
        let zcr = zero_crossing_rate(&clip(vec![0.25; 4096]), N_FFT, HOP_LENGTH);
        assert!(zcr.iter().all(|&z| z == 0.0));

        // every adjacent pair crosses: (frame_len - 1) sign changes per frame
        let alt: Vec<f64> = (0..4096).map(|i| if i % 2 == 0 { 0.6 } else { -0.6 }).collect();
        let zcr = zero_crossing_rate(&clip(alt), N_FFT, HOP_LENGTH);
        let expect = (N_FFT as f64 - 1.0) / N_FFT as f64;
        for &z in &zcr {
            assert!((z - expect).abs() < 1e-12, "{z} vs {expect}");
        }

        // a pure tone crosses zero 2f times per second
        let zcr = zero_crossing_rate(&sine(440.0, 1.0, 0.9), N_FFT, HOP_LENGTH);
        let m = mean(&zcr);
        assert!((m - 2.0 * 440.0 / f64::from(SR)).abs() < 0.005, "{m}");
    }

    #[test]
    fn rms_constant_and_sine() {
        let r = rms(&clip(vec![0.0; 4096]), N_FFT, HOP_LENGTH);
        assert!(r.iter().all(|&v| v == 0.0));

        let r = rms(&clip(vec![-0.3; 4096]), N_FFT, HOP_LENGTH);
        for &v in &r {
            assert!((v - 0.3).abs() < 1e-12);
        }

        let r = rms(&sine(440.0, 1.0, 1.0), N_FFT, HOP_LENGTH);
        let m = mean(&r);
        assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01, "{m}");
    }

    #[test]
    fn mfcc_identical_frames_identical_rows() {
        let n_bins = N_FFT / 2 + 1;
        let mut row = vec![0.0; n_bins];
        for (k, v) in row.iter_mut().enumerate() {
            *v = 1.0 + (k as f64 * 0.37).sin().abs();
        }
        let two = [row.clone(), row].concat();
        let spec = Spectrogram::from_magnitudes(two, N_FFT, HOP_LENGTH, SR);
        let coeffs = mfcc(&spec, N_MELS, N_MFCC);
        assert_eq!(coeffs.len(), 2);
        assert_eq!(coeffs[0], coeffs[1]);
        assert_eq!(coeffs[0].len(), N_MFCC);
    }

    #[test]
    fn mfcc_scaling_shifts_only_coefficient_one() {
        let base = noise(11, SR as usize);
        let doubled = clip(base.samples.iter().map(|&x| x * 2.0).collect());
        let a = mfcc(&stft(&base, N_FFT, HOP_LENGTH).unwrap(), N_MELS, N_MFCC);
        let b = mfcc(&stft(&doubled, N_FFT, HOP_LENGTH).unwrap(), N_MELS, N_MFCC);
        // power scales by 4 => every mel band gains 10*log10(4) dB, and a
        // uniform shift moves only the DCT's constant coefficient
        let shift = (N_MELS as f64).sqrt() * 10.0 * 4.0f64.log10();
        for (ra, rb) in a.iter().zip(&b) {
            assert!(((rb[0] - ra[0]) - shift).abs() < 1e-6, "{} vs {shift}", rb[0] - ra[0]);
            for c in 1..N_MFCC {
                assert!((rb[c] - ra[c]).abs() < 1e-6, "coeff {c}");
            }
        }
    }

    #[test]
    fn mfcc_palindromic_window_survives_reversal() {
        let half = noise(5, SR as usize / 2).samples;
        let mut pal = half.clone();
        pal.extend(half.iter().rev());
        let mut rev = pal.clone();
        rev.reverse();
        let a = mfcc(&stft(&clip(pal), N_FFT, HOP_LENGTH).unwrap(), N_MELS, N_MFCC);
        let b = mfcc(&stft(&clip(rev), N_FFT, HOP_LENGTH).unwrap(), N_MELS, N_MFCC);
        assert_eq!(a, b);
    }

    #[test]
    fn extract_all_zero_window_is_exact() {
        let fv = extract_features(&clip(vec![0.0; SR as usize])).unwrap();
        let v = fv.as_slice();
        for (i, &x) in v.iter().take(6).enumerate() {
            assert_eq!(x, 0.0, "feature {i}");
        }
        // constant -100 dB mel spectrum: DCT coefficient 0 = -100 * sqrt(128)
        let expect = -100.0 * (N_MELS as f64).sqrt();
        assert!((v[6] - expect).abs() < 1e-6, "{} vs {expect}", v[6]);
        for (c, &x) in v[7..].iter().enumerate() {
            assert!(x.abs() < 1e-9, "mfcc {} = {x}", c + 2);
        }
    }

    #[test]
    fn extract_pure_tone_matches_analytic_oracles() {
        let fv = extract_features(&sine(440.0, 1.0, 0.9)).unwrap();
        let v = fv.as_slice();
        let bin_hz = f64::from(SR) / N_FFT as f64;
        assert!((v[2] - 440.0).abs() < 25.0, "centroid {}", v[2]);
        // the Hann main lobe puts the 85% magnitude point at the lobe's upper
        // edge (~bin 42) and the two reflected boundary frames push the mean
        // a little further; three bins bounds both effects
        assert!((v[4] - 440.0).abs() < 3.0 * bin_hz, "rolloff {}", v[4]);
        assert!((v[5] - 2.0 * 440.0 / f64::from(SR)).abs() < 0.005, "zcr {}", v[5]);
    }

    #[test]
    fn extract_is_deterministic_and_finite() {
        let w = noise(42, SR as usize);
        let a = extract_features(&w).unwrap();
        let b = extract_features(&w).unwrap();
        assert_eq!(a, b);
        assert!(a.as_slice().iter().all(|v| v.is_finite()));
        assert!(a.as_slice()[0] >= 0.0 && a.as_slice()[0] <= 1.0);
        assert!(a.as_slice()[5] >= 0.0 && a.as_slice()[5] <= 1.0);

        let err = extract_features(&clip(vec![0.1; 2000])).unwrap_err();
        assert!(matches!(err, DspError::WindowTooShort { needed: 2048, got: 2000 }));
    }

    #[test]
    fn extract_scale_covariance_single_signal() {
        let base = noise(3, SR as usize);
        let scaled = clip(base.samples.iter().map(|&x| x * 3.0).collect());
        let a = extract_features(&base).unwrap();
        let b = extract_features(&scaled).unwrap();
        let (a, b) = (a.as_slice(), b.as_slice());

        assert!((b[0] - a[0]).abs() < 1e-12, "chroma");
        assert!((b[1] - 3.0 * a[1]).abs() < 1e-9 * a[1].abs(), "rms");
        for i in [2usize, 3] {
            assert!((b[i] - a[i]).abs() < 1e-9 * a[i].abs(), "feature {i}");
        }
        assert_eq!(b[4], a[4], "rolloff picks the same bin");
        assert_eq!(b[5], a[5], "zcr ignores scale");
        let shift = (N_MELS as f64).sqrt() * 10.0 * 9.0f64.log10();
        assert!(((b[6] - a[6]) - shift).abs() < 1e-6, "mfcc 1");
        for i in 7..NUM_FEATURES {
            assert!((b[i] - a[i]).abs() < 1e-6, "mfcc {}", i - 5);
        }
    }
}
