//! Logistic regression trained by full-batch gradient descent.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::sigmoid;

#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub beta0: f64,
    pub beta1: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingDiagnostics {
    pub final_cost: f64,
    /// Epochs where the monitored cost went up (a sign the rates are too
    /// large for the data).
    pub cost_increase_epochs: usize,
}

/// Negative log-likelihood of the model on (x, y).
pub fn logistic_cost(x: &Matrix, y: &[f64], beta0: f64, beta1: &[f64]) -> f64 {
    let mut cost = 0.0;
    for i in 0..x.rows() {
        let z = logit(x.row(i), beta0, beta1);
        // ln(1 + e^z) computed stably
        cost += z.max(0.0) + (-z.abs()).exp().ln_1p() - y[i] * z;
    }
    cost
}

/// Summed gradient of the cost: (d/d beta0, d/d beta1).
pub fn logistic_gradient(x: &Matrix, y: &[f64], beta0: f64, beta1: &[f64]) -> (f64, Vec<f64>) {
    let mut g0 = 0.0;
    let mut g1 = vec![0.0; beta1.len()];
    for i in 0..x.rows() {
        let r = sigmoid(logit(x.row(i), beta0, beta1)) - y[i];
        g0 += r;
        for (gj, &xj) in g1.iter_mut().zip(x.row(i)) {
            *gj += r * xj;
        }
    }
    (g0, g1)
}

fn logit(row: &[f64], beta0: f64, beta1: &[f64]) -> f64 {
    beta0 + row.iter().zip(beta1).map(|(a, b)| a * b).sum::<f64>()
}

/// Full-batch gradient descent from the zero model, with separate learning
/// rates for the bias and the coefficient vector.
pub fn train_logistic(
    x: &Matrix,
    y: &[f64],
    lr0: f64,
    lr1: f64,
    epochs: usize,
) -> Result<(LogisticModel, TrainingDiagnostics)> {
    if x.rows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.rows(),
            y.len()
        )));
    }
    for &v in y {
        if v != 0.0 && v != 1.0 {
            return Err(Error::NonBinaryLabels(v));
        }
    }
    let mut beta0 = 0.0;
    let mut beta1 = vec![0.0; x.cols()];
    let mut diag = TrainingDiagnostics {
        final_cost: logistic_cost(x, y, beta0, &beta1),
        cost_increase_epochs: 0,
    };
    for epoch in 0..epochs {
        let (g0, g1) = logistic_gradient(x, y, beta0, &beta1);
        beta0 -= lr0 * g0;
        for (b, g) in beta1.iter_mut().zip(&g1) {
            *b -= lr1 * g;
        }
        let cost = logistic_cost(x, y, beta0, &beta1);
        if !cost.is_finite() {
            return Err(Error::Divergence(epoch));
        }
        if cost > diag.final_cost {
            diag.cost_increase_epochs += 1;
        }
        diag.final_cost = cost;
    }
    Ok((LogisticModel { beta0, beta1 }, diag))
}

impl LogisticModel {
    /// Probability that the label is 1.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.beta1.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} features vs {} coefficients",
                x.len(),
                self.beta1.len()
            )));
        }
        Ok(sigmoid(logit(x, self.beta0, &self.beta1)))
    }

    /// Class rule: 1 iff p >= 0.5 (threshold inclusive).
    pub fn predict_class(&self, x: &[f64]) -> Result<u8> {
        Ok(if self.predict_proba(x)? >= 0.5 { 1 } else { 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::rng_from_seed;
    use rand::Rng;

    #[test]
    fn zero_epochs_returns_zero_model() {
        let x = Matrix::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let (m, _) = train_logistic(&x, &[0.0, 1.0], 0.01, 0.01, 0).unwrap();
        assert_eq!(m.beta0, 0.0);
        assert_eq!(m.beta1, vec![0.0]);
    }

    #[test]
    fn zero_model_predicts_half_and_class_one() {
        let m = LogisticModel {
            beta0: 0.0,
            beta1: vec![0.0; 2],
        };
        assert_eq!(m.predict_proba(&[3.0, -1.0]).unwrap(), 0.5);
        assert_eq!(m.predict_class(&[3.0, -1.0]).unwrap(), 1);
    }

    #[test]
    fn large_logit_saturates() {
        let m = LogisticModel {
            beta0: 10.0,
            beta1: vec![0.0],
        };
        assert!(m.predict_proba(&[0.0]).unwrap() > 0.9999);
    }

    #[test]
    fn class_invariant_under_positive_rescale() {
        let m = LogisticModel {
            beta0: -0.4,
            beta1: vec![1.2, -0.7],
        };
        let scaled = LogisticModel {
            beta0: m.beta0 * 13.0,
            beta1: m.beta1.iter().map(|b| b * 13.0).collect(),
        };
        let mut rng = rng_from_seed(0);
        for _ in 0..200 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            assert_eq!(
                m.predict_class(&x).unwrap(),
                scaled.predict_class(&x).unwrap()
            );
        }
    }

    #[test]
    fn separable_data_reaches_full_training_accuracy() {
        // x < 0 -> 0, x > 1 -> 1, margin 1
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            let neg: f64 = rng.gen_range(-4.0..0.0);
            rows.push(vec![neg]);
            labels.push(0.0);
            let pos: f64 = rng.gen_range(1.0..5.0);
            rows.push(vec![pos]);
            labels.push(1.0);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let (m, _) = train_logistic(&x, &labels, 0.01, 0.01, 3000).unwrap();
        let correct = rows
            .iter()
            .zip(&labels)
            .filter(|(r, &y)| m.predict_class(r).unwrap() as f64 == y)
            .count();
        assert_eq!(correct, rows.len());
    }

    #[test]
    fn rejects_non_binary_labels() {
        let x = Matrix::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            train_logistic(&x, &[0.0, 0.5], 0.01, 0.01, 1),
            Err(Error::NonBinaryLabels(_))
        ));
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(7);
        let mut x = Matrix::zeros(20, 3);
        let mut y = Vec::new();
        for i in 0..20 {
            for j in 0..3 {
                x.set(i, j, rng.gen_range(-2.0..2.0));
            }
            y.push(if rng.gen::<bool>() { 1.0 } else { 0.0 });
        }
        let h = 1e-5;
        for _ in 0..10 {
            let beta0: f64 = rng.gen_range(-1.0..1.0);
            let beta1: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (g0, g1) = logistic_gradient(&x, &y, beta0, &beta1);
            let fd0 = (logistic_cost(&x, &y, beta0 + h, &beta1)
                - logistic_cost(&x, &y, beta0 - h, &beta1))
                / (2.0 * h);
            assert!((g0 - fd0).abs() / fd0.abs().max(1.0) < 1e-5);
            for j in 0..3 {
                let mut bp = beta1.clone();
                bp[j] += h;
                let mut bm = beta1.clone();
                bm[j] -= h;
                let fd = (logistic_cost(&x, &y, beta0, &bp) - logistic_cost(&x, &y, beta0, &bm))
                    / (2.0 * h);
                assert!((g1[j] - fd).abs() / fd.abs().max(1.0) < 1e-5);
            }
        }
    }
}
