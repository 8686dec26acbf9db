//! Windowed-sinc polyphase sample-rate conversion.
//!
//! 16 taps per phase with a Kaiser window. The sinc cutoff is scaled to the
//! lower of the two Nyquist frequencies so downsampling does not alias into
//! the spectral-feature band.

use crate::audio_io::AudioClip;
use crate::num::Scalar;

const TAPS: usize = 16;
const HALF: isize = (TAPS / 2) as isize; // taps span [-8, 8) around the read point
const PHASES: usize = 256;
const KAISER_BETA: f64 = 8.6;

/// Resample `clip` to `target_rate_hz`. Equal rates return the samples unchanged.
pub fn resample<F: Scalar>(clip: &AudioClip<F>, target_rate_hz: u32) -> AudioClip<F> {
    assert!(target_rate_hz > 0, "target rate must be positive");
    assert!(!clip.samples.is_empty(), "cannot resample an empty clip");
    if clip.sample_rate_hz == target_rate_hz {
        return clip.clone();
    }

    let src = clip.sample_rate_hz as f64;
    let dst = f64::from(target_rate_hz);
    let ratio = dst / src;
    let table = PhaseTable::new(ratio.min(1.0));

    let n_in = clip.samples.len();
    let n_out = ((n_in as u128 * u128::from(target_rate_hz))
        / u128::from(clip.sample_rate_hz)) as usize;
    let n_out = n_out.max(1);

    let mut out = Vec::with_capacity(n_out);
    let step = src / dst; // input samples advanced per output sample
    for j in 0..n_out {
        let t = j as f64 * step;
        let center = t.floor() as isize;
        let frac = t - t.floor();
        let phase = table.phase_for(frac);
        let mut acc = F::zero();
        for (tap, &w) in phase.iter().enumerate() {
            let idx = center + tap as isize - (HALF - 1);
            if idx >= 0 && (idx as usize) < n_in {
                acc = acc + clip.samples[idx as usize] * F::from_f64_c(w);
            }
        }
        out.push(acc);
    }
    AudioClip::new(out, target_rate_hz)
}

/// Precomputed filter bank: PHASES rows of TAPS kernel weights.
struct PhaseTable {
    weights: Vec<[f64; TAPS]>,
}

impl PhaseTable {
    fn new(cutoff: f64) -> Self {
        let mut weights = Vec::with_capacity(PHASES + 1);
        for p in 0..=PHASES {
            let frac = p as f64 / PHASES as f64;
            let mut row = [0.0f64; TAPS];
            let mut sum = 0.0;
            for (tap, w) in row.iter_mut().enumerate() {
                // offset of the contributing input sample relative to the read point
                let u = (tap as isize - (HALF - 1)) as f64 - frac;
                *w = cutoff * sinc(cutoff * u) * kaiser(u / HALF as f64);
                sum += *w;
            }
            // unity DC gain per phase
            if sum.abs() > f64::EPSILON {
                for w in row.iter_mut() {
                    *w /= sum;
                }
            }
            weights.push(row);
        }
        Self { weights }
    }

    fn phase_for(&self, frac: f64) -> &[f64; TAPS] {
        let idx = (frac * PHASES as f64).round() as usize;
        &self.weights[idx.min(PHASES)]
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn kaiser(x: f64) -> f64 {
    if x.abs() > 1.0 {
        return 0.0;
    }
    bessel_i0(KAISER_BETA * (1.0 - x * x).sqrt()) / bessel_i0(KAISER_BETA)
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let half_x2 = (x / 2.0) * (x / 2.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= half_x2 / ((k * k) as f64);
        sum += term;
        if term < sum * 1e-16 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: u32, seconds: f64) -> AudioClip<f64> {
        let n = (seconds * f64::from(rate)).round() as usize;
        let samples = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(rate)).sin())
            .collect();
        AudioClip::new(samples, rate)
    }

    /// Direct DFT magnitude at each bin; argmax bin of the whole signal.
    fn dft_peak_hz(clip: &AudioClip<f64>) -> f64 {
        let n = clip.samples.len();
        let mut best = (0usize, -1.0f64);
        for k in 0..n / 2 {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &x) in clip.samples.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64;
                re += x * ang.cos();
                im += x * ang.sin();
            }
            let mag = re * re + im * im;
            if mag > best.1 {
                best = (k, mag);
            }
        }
        best.0 as f64 * f64::from(clip.sample_rate_hz) / n as f64
    }

    #[test]
    fn identity_when_rates_equal() {
        let clip = sine(440.0, 22050, 0.1);
        let out = resample(&clip, 22050);
        assert_eq!(out.samples, clip.samples);
    }

    #[test]
    fn preserves_duration() {
        let clip = sine(440.0, 44100, 1.0);
        let out = resample(&clip, 22050);
        assert_eq!(out.samples.len(), 22050);
    }

    #[test]
    fn sine_peak_survives_downsampling() {
        // keep the signal short so the O(n^2) DFT oracle stays quick
        let clip = sine(440.0, 44100, 0.25);
        let out = resample(&clip, 22050);
        let bin_width = 22050.0 / out.samples.len() as f64;
        let peak = dft_peak_hz(&out);
        assert!(
            (peak - 440.0).abs() <= bin_width + 1e-9,
            "peak {peak} Hz; expected 440 +- {bin_width}"
        );
    }

    #[test]
    fn upsample_then_downsample_duration() {
        let clip = sine(300.0, 22050, 0.5);
        let up = resample(&clip, 44100);
        let back = resample(&up, 22050);
        let diff = back.samples.len().abs_diff(clip.samples.len());
        assert!(diff <= 2, "duration drifted by {diff} samples");
    }

    #[test]
    fn amplitude_roughly_preserved() {
        let clip = sine(440.0, 44100, 0.5);
        let out = resample(&clip, 22050);
        let peak = out
            .samples
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        assert!((peak - 1.0).abs() < 0.05, "peak amplitude {peak}");
    }
}
