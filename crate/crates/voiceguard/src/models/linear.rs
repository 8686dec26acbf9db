//! Linear and Gaussian discriminant families: LDA, QDA, the ridge
//! classifier, and logistic regression by plain SGD.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::dsp::NUM_FEATURES;
use crate::models::gbt::sigmoid;
use crate::models::linalg::{quad_form, Cholesky};

const D: usize = NUM_FEATURES;

fn class_mean(x: &[[f64; D]], y: &[Label], class: Label) -> (Vec<f64>, usize) {
    let mut mean = vec![0.0; D];
    let mut count = 0usize;
    for (xi, &yi) in x.iter().zip(y) {
        if yi == class {
            for (m, v) in mean.iter_mut().zip(xi) {
                *m += v;
            }
            count += 1;
        }
    }
    if count > 0 {
        for m in &mut mean {
            *m /= count as f64;
        }
    }
    (mean, count)
}

/// Factor a symmetric matrix, ridging the diagonal by successively larger
/// multiples of trace/D until it becomes positive definite.
fn chol_with_jitter(mut a: Vec<f64>, base_reg: f64) -> Option<Cholesky> {
    let trace: f64 = (0..D).map(|i| a[i * D + i]).sum();
    let unit = (trace.abs() / D as f64).max(1e-12);
    let mut reg = base_reg;
    for _ in 0..8 {
        if reg > 0.0 {
            for i in 0..D {
                a[i * D + i] += reg * unit;
            }
        }
        if let Some(c) = Cholesky::new(&a, D) {
            return Some(c);
        }
        reg = if reg == 0.0 { 1e-6 } else { reg * 100.0 };
    }
    None
}

// ------------------------------------------------------------------- LDA

/// Linear discriminant: pooled-covariance Gaussian classes reduce to a
/// single hyperplane; the score is the logistic posterior of the margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LdaModel {
    pub fn fit(x: &[[f64; D]], y: &[Label]) -> Option<Self> {
        let n = x.len();
        let (mean_real, n_real) = class_mean(x, y, Label::Real);
        let (mean_fake, n_fake) = class_mean(x, y, Label::Fake);
        if n_real == 0 || n_fake == 0 || n < 3 {
            return None;
        }

        // pooled within-class covariance, df = n - 2
        let mut cov = vec![0.0; D * D];
        for (xi, &yi) in x.iter().zip(y) {
            let mean = if yi == Label::Fake { &mean_fake } else { &mean_real };
            for i in 0..D {
                let di = xi[i] - mean[i];
                for j in 0..=i {
                    cov[i * D + j] += di * (xi[j] - mean[j]);
                }
            }
        }
        for i in 0..D {
            for j in 0..=i {
                cov[i * D + j] /= (n - 2) as f64;
                cov[j * D + i] = cov[i * D + j];
            }
        }

        let chol = chol_with_jitter(cov, 0.0)?;
        let diff: Vec<f64> = mean_fake.iter().zip(&mean_real).map(|(a, b)| a - b).collect();
        let weights = chol.solve(&diff);
        let mid: Vec<f64> = mean_fake
            .iter()
            .zip(&mean_real)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let prior_term = (n_fake as f64 / n_real as f64).ln();
        let bias = prior_term - weights.iter().zip(&mid).map(|(w, m)| w * m).sum::<f64>();
        Some(LdaModel { weights, bias })
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }
}

// ------------------------------------------------------------------- QDA

/// Quadratic discriminant: one regularized Gaussian per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaModel {
    pub means: [Vec<f64>; 2],
    /// Cholesky factors of the (regularized) class covariances, row-major.
    pub chol_l: [Vec<f64>; 2],
    pub ln_det: [f64; 2],
    pub ln_prior: [f64; 2],
}

impl QdaModel {
    /// Regularization per the fixed policy: add (reg · trace/D)·I.
    pub const REG: f64 = 1e-6;

    pub fn fit(x: &[[f64; D]], y: &[Label]) -> Option<Self> {
        let mut means: [Vec<f64>; 2] = [vec![], vec![]];
        let mut chol_l: [Vec<f64>; 2] = [vec![], vec![]];
        let mut ln_det = [0.0; 2];
        let mut ln_prior = [0.0; 2];
        let n = x.len();

        for (c, class) in [Label::Real, Label::Fake].into_iter().enumerate() {
            let (mean, count) = class_mean(x, y, class);
            if count < 2 {
                return None;
            }
            let mut cov = vec![0.0; D * D];
            for (xi, &yi) in x.iter().zip(y) {
                if yi != class {
                    continue;
                }
                for i in 0..D {
                    let di = xi[i] - mean[i];
                    for j in 0..=i {
                        cov[i * D + j] += di * (xi[j] - mean[j]);
                    }
                }
            }
            for i in 0..D {
                for j in 0..=i {
                    cov[i * D + j] /= (count - 1) as f64;
                    cov[j * D + i] = cov[i * D + j];
                }
            }
            let chol = chol_with_jitter(cov, Self::REG)?;
            ln_det[c] = chol.ln_det();
            ln_prior[c] = (count as f64 / n as f64).ln();
            means[c] = mean;
            chol_l[c] = chol.into_raw();
        }
        Some(QdaModel {
            means,
            chol_l,
            ln_det,
            ln_prior,
        })
    }

    fn discriminant(&self, c: usize, row: &[f64]) -> f64 {
        let diff: Vec<f64> = row.iter().zip(&self.means[c]).map(|(v, m)| v - m).collect();
        let chol = Cholesky::from_raw(self.chol_l[c].clone(), D);
        self.ln_prior[c] - 0.5 * self.ln_det[c] - 0.5 * quad_form(&chol, &diff)
    }

    /// Posterior P(FAKE | row).
    pub fn probability(&self, row: &[f64]) -> f64 {
        let d_real = self.discriminant(0, row);
        let d_fake = self.discriminant(1, row);
        sigmoid(d_fake - d_real)
    }
}

// ----------------------------------------------------------------- Ridge

/// Ridge classifier: least-squares on ±1 targets with an L2 penalty on the
/// weights (α = spec value) and an unpenalized intercept via centering.
/// The score is the raw margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl RidgeModel {
    pub fn fit(x: &[[f64; D]], y: &[Label], alpha: f64) -> Option<Self> {
        let n = x.len();
        if n == 0 {
            return None;
        }
        let targets: Vec<f64> = y.iter().map(|l| l.as_pm1()).collect();
        let y_mean = targets.iter().sum::<f64>() / n as f64;
        let mut x_mean = vec![0.0; D];
        for xi in x {
            for (m, v) in x_mean.iter_mut().zip(xi) {
                *m += v;
            }
        }
        for m in &mut x_mean {
            *m /= n as f64;
        }

        // normal equations on centered data: (Xc' Xc + αI) w = Xc' yc
        let mut gram = vec![0.0; D * D];
        let mut rhs = vec![0.0; D];
        for (xi, &ti) in x.iter().zip(&targets) {
            let centered: Vec<f64> = xi.iter().zip(&x_mean).map(|(v, m)| v - m).collect();
            for i in 0..D {
                rhs[i] += centered[i] * (ti - y_mean);
                for j in 0..=i {
                    gram[i * D + j] += centered[i] * centered[j];
                }
            }
        }
        for i in 0..D {
            gram[i * D + i] += alpha;
            for j in 0..i {
                gram[j * D + i] = gram[i * D + j];
            }
        }
        let chol = chol_with_jitter(gram, 0.0)?;
        let weights = chol.solve(&rhs);
        let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
        Some(RidgeModel { weights, intercept })
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>()
    }
}

// ------------------------------------------------------------------- SGD

/// Logistic regression trained by per-sample SGD: constant learning rate,
/// fixed epoch count, seeded per-epoch shuffle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl SgdModel {
    pub fn fit(x: &[[f64; D]], y: &[Label], learning_rate: f64, epochs: usize, seed: u64) -> Self {
        assert!(!x.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = vec![0.0; D];
        let mut bias = 0.0;
        let mut order: Vec<usize> = (0..x.len()).collect();
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let margin =
                    bias + weights.iter().zip(&x[i]).map(|(w, v)| w * v).sum::<f64>();
                let err = sigmoid(margin) - y[i].as_f64();
                for (w, v) in weights.iter_mut().zip(&x[i]) {
                    *w -= learning_rate * err * v;
                }
                bias -= learning_rate * err;
            }
        }
        SgdModel { weights, bias }
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.bias + self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>())
    }
}
