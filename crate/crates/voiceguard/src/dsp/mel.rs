//! Mel filterbank and MFCC computation.
//!
//! Conventions follow the extraction tooling the reference dataset was built
//! with: Slaney-style mel scale with area-normalized triangular filters over
//! the power spectrum, decibel log compression (floor 1e-10, 80 dB dynamic
//! range), and an orthonormal type-II DCT whose first `n_mfcc` coefficients
//! (including coefficient 0) are reported as MFCC 1..n_mfcc.

use crate::dsp::Spectrogram;
use crate::num::Scalar;

/// Power floor before log compression.
const AMIN: f64 = 1e-10;
/// Dynamic range below the spectrogram maximum retained after compression.
const TOP_DB: f64 = 80.0;

/// Triangular mel filterbank: `n_mels` rows of `n_bins` non-negative weights.
#[derive(Debug, Clone)]
pub struct MelFilterbank<F> {
    weights: Vec<F>,
    n_mels: usize,
    n_bins: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

impl<F: Scalar> MelFilterbank<F> {
    /// Build a filterbank for spectra of `n_bins = n_fft/2 + 1` bins.
    pub fn new(n_mels: usize, n_fft: usize, sample_rate_hz: u32, fmin: f64, fmax: f64) -> Self {
        assert!(n_mels >= 1 && fmax > fmin && fmin >= 0.0);
        let n_bins = n_fft / 2 + 1;

        // n_mels + 2 corner frequencies, evenly spaced on the mel scale
        let mel_lo = hz_to_mel(fmin);
        let mel_hi = hz_to_mel(fmax);
        let corners: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
            .collect();

        let bin_hz = f64::from(sample_rate_hz) / n_fft as f64;
        let mut weights = vec![F::zero(); n_mels * n_bins];
        for m in 0..n_mels {
            let (lo, center, hi) = (corners[m], corners[m + 1], corners[m + 2]);
            // area normalization keeps filter response independent of width
            let gain = 2.0 / (hi - lo);
            for k in 0..n_bins {
                let f = k as f64 * bin_hz;
                let rising = (f - lo) / (center - lo);
                let falling = (hi - f) / (hi - center);
                let w = rising.min(falling).max(0.0) * gain;
                weights[m * n_bins + k] = F::from_f64_c(w);
            }
        }
        Self {
            weights,
            n_mels,
            n_bins,
            fmin_hz: fmin,
            fmax_hz: fmax,
        }
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Weights of filter `m`, one per spectrum bin.
    pub fn filter(&self, m: usize) -> &[F] {
        &self.weights[m * self.n_bins..(m + 1) * self.n_bins]
    }

    /// Apply the bank to one power spectrum.
    pub fn apply(&self, power: &[F]) -> Vec<F> {
        assert_eq!(power.len(), self.n_bins);
        (0..self.n_mels)
            .map(|m| {
                self.filter(m)
                    .iter()
                    .zip(power)
                    .fold(F::zero(), |acc, (&w, &p)| acc + w * p)
            })
            .collect()
    }
}

/// Slaney mel scale: linear below 1 kHz, logarithmic above.
pub fn hz_to_mel(hz: f64) -> f64 {
    const F_SP: f64 = 200.0 / 3.0;
    const MIN_LOG_HZ: f64 = 1000.0;
    const MIN_LOG_MEL: f64 = MIN_LOG_HZ / F_SP;
    let logstep = 6.4f64.ln() / 27.0;
    if hz < MIN_LOG_HZ {
        hz / F_SP
    } else {
        MIN_LOG_MEL + (hz / MIN_LOG_HZ).ln() / logstep
    }
}

pub fn mel_to_hz(mel: f64) -> f64 {
    const F_SP: f64 = 200.0 / 3.0;
    const MIN_LOG_HZ: f64 = 1000.0;
    const MIN_LOG_MEL: f64 = MIN_LOG_HZ / F_SP;
    let logstep = 6.4f64.ln() / 27.0;
    if mel < MIN_LOG_MEL {
        mel * F_SP
    } else {
        MIN_LOG_HZ * ((mel - MIN_LOG_MEL) * logstep).exp()
    }
}

/// MFCC matrix, one row of `n_mfcc` coefficients per frame.
///
/// Squares magnitudes to power, applies the mel bank, compresses to decibels
/// with floor [`AMIN`] and an 80 dB range below the global maximum, then
/// takes the first `n_mfcc` orthonormal DCT-II coefficients per frame.
pub fn mfcc<F: Scalar>(spec: &Spectrogram<F>, n_mels: usize, n_mfcc: usize) -> Vec<Vec<F>> {
    assert!(n_mfcc <= n_mels, "n_mfcc must not exceed n_mels");
    let bank = MelFilterbank::new(
        n_mels,
        spec.n_fft(),
        spec.sample_rate_hz(),
        0.0,
        f64::from(spec.sample_rate_hz()) / 2.0,
    );

    let ten = F::from_f64_c(10.0);
    let amin = F::from_f64_c(AMIN);
    let mut log_mel: Vec<Vec<F>> = Vec::with_capacity(spec.n_frames());
    let mut global_max = F::neg_infinity();
    for m in 0..spec.n_frames() {
        let power: Vec<F> = spec.frame(m).iter().map(|&x| x * x).collect();
        let row: Vec<F> = bank
            .apply(&power)
            .into_iter()
            .map(|e| ten * e.max(amin).log10())
            .collect();
        for &v in &row {
            global_max = global_max.max(v);
        }
        log_mel.push(row);
    }
    let floor = global_max - F::from_f64_c(TOP_DB);
    for row in &mut log_mel {
        for v in row.iter_mut() {
            *v = v.max(floor);
        }
    }

    let dct = DctMatrix::new(n_mfcc, n_mels);
    log_mel.iter().map(|row| dct.apply(row)).collect()
}

/// Orthonormal DCT-II: `y[k] = s(k) * sum_n x[n] cos(pi k (2n+1) / 2N)`.
struct DctMatrix<F> {
    rows: Vec<F>,
    n_coeffs: usize,
    n_inputs: usize,
}

impl<F: Scalar> DctMatrix<F> {
    fn new(n_coeffs: usize, n_inputs: usize) -> Self {
        let n = n_inputs as f64;
        let mut rows = vec![F::zero(); n_coeffs * n_inputs];
        for k in 0..n_coeffs {
            let scale = if k == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            for i in 0..n_inputs {
                let angle = std::f64::consts::PI * k as f64 * (2.0 * i as f64 + 1.0) / (2.0 * n);
                rows[k * n_inputs + i] = F::from_f64_c(scale * angle.cos());
            }
        }
        Self {
            rows,
            n_coeffs,
            n_inputs,
        }
    }

    fn apply(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.n_inputs);
        (0..self.n_coeffs)
            .map(|k| {
                self.rows[k * self.n_inputs..(k + 1) * self.n_inputs]
                    .iter()
                    .zip(x)
                    .fold(F::zero(), |acc, (&c, &v)| acc + c * v)
            })
            .collect()
    }
}
