//! Naive Bayes families: Gaussian (per-feature normal densities) and
//! Bernoulli (median-binarized features with Laplace smoothing).

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::dsp::NUM_FEATURES;

const D: usize = NUM_FEATURES;

/// Gaussian naive Bayes. Class priors are stored as raw counts so a
/// single-class fit round-trips through JSON (ln 0 would not).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNbModel {
    pub class_counts: [usize; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl GaussianNbModel {
    pub fn fit(x: &[[f64; D]], y: &[Label]) -> Self {
        assert!(!x.is_empty());
        let mut counts = [0usize; 2];
        let mut means = [vec![0.0; D], vec![0.0; D]];
        for (xi, &yi) in x.iter().zip(y) {
            let c = yi.as_f64() as usize;
            counts[c] += 1;
            for (m, v) in means[c].iter_mut().zip(xi) {
                *m += v;
            }
        }
        for c in 0..2 {
            if counts[c] > 0 {
                for m in &mut means[c] {
                    *m /= counts[c] as f64;
                }
            }
        }
        let mut variances = [vec![0.0; D], vec![0.0; D]];
        for (xi, &yi) in x.iter().zip(y) {
            let c = yi.as_f64() as usize;
            for j in 0..D {
                let d = xi[j] - means[c][j];
                variances[c][j] += d * d;
            }
        }
        let mut max_var = 0.0f64;
        for c in 0..2 {
            if counts[c] > 0 {
                for v in &mut variances[c] {
                    *v /= counts[c] as f64;
                    max_var = max_var.max(*v);
                }
            }
        }
        // variance smoothing keeps degenerate (constant) features usable
        let eps = (1e-9 * max_var).max(1e-12);
        for c in 0..2 {
            for v in &mut variances[c] {
                *v += eps;
            }
        }
        GaussianNbModel {
            class_counts: counts,
            means,
            variances,
        }
    }

    fn joint_log_likelihood(&self, c: usize, row: &[f64]) -> f64 {
        if self.class_counts[c] == 0 {
            return f64::NEG_INFINITY;
        }
        let n: usize = self.class_counts.iter().sum();
        let mut ll = (self.class_counts[c] as f64 / n as f64).ln();
        for j in 0..D {
            let var = self.variances[c][j];
            let d = row[j] - self.means[c][j];
            ll -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
        }
        ll
    }

    /// Posterior P(FAKE | row) via log-sum-exp.
    pub fn probability(&self, row: &[f64]) -> f64 {
        let ll = [
            self.joint_log_likelihood(0, row),
            self.joint_log_likelihood(1, row),
        ];
        let hi = ll[0].max(ll[1]);
        if hi == f64::NEG_INFINITY {
            return 0.5;
        }
        let e0 = (ll[0] - hi).exp();
        let e1 = (ll[1] - hi).exp();
        e1 / (e0 + e1)
    }

    /// Both class posteriors, in REAL, FAKE order.
    pub fn posteriors(&self, row: &[f64]) -> [f64; 2] {
        let p = self.probability(row);
        [1.0 - p, p]
    }
}

/// Bernoulli naive Bayes on median-binarized features. Thresholds are the
/// per-feature training medians; Laplace smoothing keeps every conditional
/// probability strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliNbModel {
    pub thresholds: Vec<f64>,
    pub class_counts: [usize; 2],
    /// `p_one[c][j]` = smoothed P(bit_j = 1 | class c).
    pub p_one: [Vec<f64>; 2],
    pub alpha: f64,
}

impl BernoulliNbModel {
    pub fn fit(x: &[[f64; D]], y: &[Label], alpha: f64) -> Self {
        assert!(!x.is_empty());
        let n = x.len();
        let mut thresholds = vec![0.0; D];
        let mut column = vec![0.0; n];
        for (j, t) in thresholds.iter_mut().enumerate() {
            for (slot, xi) in column.iter_mut().zip(x) {
                *slot = xi[j];
            }
            column.sort_by(|a, b| a.partial_cmp(b).unwrap());
            *t = if n % 2 == 1 {
                column[n / 2]
            } else {
                0.5 * (column[n / 2 - 1] + column[n / 2])
            };
        }

        let mut counts = [0usize; 2];
        let mut ones = [vec![0usize; D], vec![0usize; D]];
        for (xi, &yi) in x.iter().zip(y) {
            let c = yi.as_f64() as usize;
            counts[c] += 1;
            for j in 0..D {
                if xi[j] > thresholds[j] {
                    ones[c][j] += 1;
                }
            }
        }
        let mut p_one = [vec![0.0; D], vec![0.0; D]];
        for c in 0..2 {
            for j in 0..D {
                p_one[c][j] =
                    (ones[c][j] as f64 + alpha) / (counts[c] as f64 + 2.0 * alpha);
            }
        }
        BernoulliNbModel {
            thresholds,
            class_counts: counts,
            p_one,
            alpha,
        }
    }

    fn joint_log_likelihood(&self, c: usize, row: &[f64]) -> f64 {
        if self.class_counts[c] == 0 {
            return f64::NEG_INFINITY;
        }
        let n: usize = self.class_counts.iter().sum();
        let mut ll = (self.class_counts[c] as f64 / n as f64).ln();
        for j in 0..D {
            let p = self.p_one[c][j];
            ll += if row[j] > self.thresholds[j] {
                p.ln()
            } else {
                (1.0 - p).ln()
            };
        }
        ll
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        let ll = [
            self.joint_log_likelihood(0, row),
            self.joint_log_likelihood(1, row),
        ];
        let hi = ll[0].max(ll[1]);
        if hi == f64::NEG_INFINITY {
            return 0.5;
        }
        let e0 = (ll[0] - hi).exp();
        let e1 = (ll[1] - hi).exp();
        e1 / (e0 + e1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifted_rows(n_each: usize, sep: f64) -> (Vec<[f64; D]>, Vec<Label>) {
        // deterministic low-discrepancy jitter, no RNG needed
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_each {
            let jitter = (i as f64 * 0.618_033_988_75).fract() - 0.5;
            let mut a = [0.0; D];
            let mut b = [0.0; D];
            for j in 0..D {
                let wiggle = jitter * (1.0 + j as f64 * 0.01);
                a[j] = -sep + wiggle;
                b[j] = sep + wiggle;
            }
            x.push(a);
            y.push(Label::Real);
            x.push(b);
            y.push(Label::Fake);
        }
        (x, y)
    }

    #[test]
    fn gaussian_nb_separates_and_posteriors_sum_to_one() {
        let (x, y) = shifted_rows(50, 2.0);
        let model = GaussianNbModel::fit(&x, &y);
        for (xi, &yi) in x.iter().zip(&y) {
            let p = model.probability(xi);
            assert_eq!(p >= 0.5, yi == Label::Fake);
            let [p_real, p_fake] = model.posteriors(xi);
            assert!((p_real + p_fake - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_nb_handles_constant_feature() {
        // feature variance would be zero without smoothing
        let mut x = vec![[1.0; D]; 6];
        for (i, row) in x.iter_mut().enumerate() {
            row[3] = i as f64;
        }
        let y: Vec<Label> = (0..6)
            .map(|i| if i < 3 { Label::Real } else { Label::Fake })
            .collect();
        let model = GaussianNbModel::fit(&x, &y);
        let p = model.probability(&x[5]);
        assert!(p.is_finite() && p > 0.5);
    }

    #[test]
    fn bernoulli_nb_median_split_classifies() {
        let (x, y) = shifted_rows(40, 1.0);
        let model = BernoulliNbModel::fit(&x, &y, 1.0);
        // medians sit between the clusters, so the bit pattern is decisive
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(r, &l)| (model.probability(*r) >= 0.5) == (l == Label::Fake))
            .count();
        assert_eq!(correct, x.len());
        // Laplace smoothing keeps all conditionals strictly inside (0,1)
        for c in 0..2 {
            for &p in &model.p_one[c] {
                assert!(p > 0.0 && p < 1.0);
            }
        }
    }

    #[test]
    fn bernoulli_nb_single_class_round_trips() {
        let x = vec![[0.5; D]; 4];
        let y = vec![Label::Fake; 4];
        let model = BernoulliNbModel::fit(&x, &y, 1.0);
        assert!(model.probability(&x[0]) > 0.5);
        let json = serde_json::to_string(&model).unwrap();
        let back: BernoulliNbModel = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);

        let gnb = GaussianNbModel::fit(&x, &y);
        let json = serde_json::to_string(&gnb).unwrap();
        let back: GaussianNbModel = serde_json::from_str(&json).unwrap();
        assert_eq!(gnb, back);
        assert!(back.probability(&x[0]) > 0.5);
    }
}
