//! Dense symmetric linear algebra for the Gaussian and ridge families.

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix, stored row-major.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    l: Vec<f64>,
    n: usize,
}

impl Cholesky {
    /// Factor a row-major symmetric matrix; `None` when a pivot is not
    /// strictly positive (matrix not positive definite).
    pub fn new(a: &[f64], n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return None;
                    }
                    l[i * n + j] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Some(Self { l, n })
    }

    /// Solve A x = b via forward and back substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= self.l[k * n + i] * x[k];
            }
            x[i] = sum / self.l[i * n + i];
        }
        x
    }

    /// ln|A| = 2 Σ ln L_ii.
    pub fn ln_det(&self) -> f64 {
        (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<f64>() * 2.0
    }

    /// Serialized form for persisted models.
    pub fn into_raw(self) -> Vec<f64> {
        self.l
    }

    pub fn from_raw(l: Vec<f64>, n: usize) -> Self {
        assert_eq!(l.len(), n * n);
        Self { l, n }
    }
}

/// x^T A^{-1} x computed from the Cholesky factor: ||L^{-1} x||^2.
pub(crate) fn quad_form(chol: &Cholesky, x: &[f64]) -> f64 {
    let n = chol.n;
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = x[i];
        for k in 0..i {
            sum -= chol.l[i * n + k] * y[k];
        }
        y[i] = sum / chol.l[i * n + i];
    }
    y.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_solve_round_trip() {
        // A = M M^T + I is SPD by construction
        let n = 4;
        let m = [
            1.0, 0.2, -0.3, 0.5, //
            0.0, 2.0, 0.1, -0.7, //
            0.4, 0.0, 1.5, 0.2, //
            -0.1, 0.3, 0.0, 1.1,
        ];
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a[i * n + j] += m[i * n + k] * m[j * n + k];
                }
            }
            a[i * n + i] += 1.0;
        }
        let chol = Cholesky::new(&a, n).unwrap();
        let x_true = [0.5, -1.25, 2.0, 0.125];
        let mut b = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[i * n + j] * x_true[j];
            }
        }
        let x = chol.solve(&b);
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-10);
        }
        // quad form agrees with solve
        let q = quad_form(&chol, &b);
        let direct: f64 = b.iter().zip(&x).map(|(bi, xi)| bi * xi).sum();
        assert!((q - direct).abs() < 1e-8 * direct.abs());
    }

    #[test]
    fn identity_has_zero_log_det_and_rejects_indefinite() {
        let n = 3;
        let mut eye = vec![0.0; 9];
        for i in 0..n {
            eye[i * n + i] = 1.0;
        }
        let chol = Cholesky::new(&eye, n).unwrap();
        assert!(chol.ln_det().abs() < 1e-14);
        assert_eq!(chol.solve(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);

        let indefinite = [1.0, 2.0, 2.0, 1.0];
        assert!(Cholesky::new(&indefinite, 2).is_none());
    }
}
