//! Shallow feed-forward network: one sigmoid hidden layer of 10 units and a
//! 2-class softmax output, trained on squared error with weight decay.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::{sigmoid, NoiseRng};
use rand::Rng;

pub const HIDDEN_UNITS: usize = 10;
pub const CLASSES: usize = 2;

#[derive(Debug, Clone)]
pub struct ShallowNet {
    /// hidden x input weights.
    pub w1: Matrix,
    pub b1: Vec<f64>,
    /// output x hidden weights.
    pub w2: Matrix,
    pub b2: Vec<f64>,
    pub lambda: f64,
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

struct ForwardPass {
    a1: Vec<f64>,
    probs: Vec<f64>,
}

impl ShallowNet {
    pub fn new(n_in: usize, lambda: f64, rng: &mut NoiseRng) -> Self {
        let mut w1 = Matrix::zeros(HIDDEN_UNITS, n_in);
        for i in 0..HIDDEN_UNITS {
            for j in 0..n_in {
                w1.set(i, j, rng.gen_range(-0.5..0.5));
            }
        }
        let mut w2 = Matrix::zeros(CLASSES, HIDDEN_UNITS);
        for i in 0..CLASSES {
            for j in 0..HIDDEN_UNITS {
                w2.set(i, j, rng.gen_range(-0.5..0.5));
            }
        }
        ShallowNet {
            w1,
            b1: vec![0.0; HIDDEN_UNITS],
            w2,
            b2: vec![0.0; CLASSES],
            lambda,
        }
    }

    pub fn n_in(&self) -> usize {
        self.w1.cols()
    }

    fn forward(&self, x: &[f64]) -> ForwardPass {
        let mut a1 = vec![0.0; HIDDEN_UNITS];
        for i in 0..HIDDEN_UNITS {
            let z: f64 =
                self.b1[i] + self.w1.row(i).iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            a1[i] = sigmoid(z);
        }
        let mut z2 = vec![0.0; CLASSES];
        for i in 0..CLASSES {
            z2[i] = self.b2[i]
                + self.w2.row(i).iter().zip(&a1).map(|(w, v)| w * v).sum::<f64>();
        }
        let probs = softmax(&z2);
        ForwardPass { a1, probs }
    }

    /// Class probabilities for one input.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_in() {
            return Err(Error::ShapeMismatch(format!(
                "{} features vs {} inputs",
                x.len(),
                self.n_in()
            )));
        }
        Ok(self.forward(x).probs)
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<u8> {
        let p = self.predict(x)?;
        Ok(if p[1] > p[0] { 1 } else { 0 })
    }

    /// Mean squared-error loss over samples plus the weight-decay penalty.
    pub fn loss(&self, x: &Matrix, y: &Matrix) -> f64 {
        let n = x.rows() as f64;
        let mut data_term = 0.0;
        for i in 0..x.rows() {
            let p = self.forward(x.row(i)).probs;
            for k in 0..CLASSES {
                let d = p[k] - y.get(i, k);
                data_term += 0.5 * d * d;
            }
        }
        let decay: f64 = self.w1.data().iter().map(|w| w * w).sum::<f64>()
            + self.w2.data().iter().map(|w| w * w).sum::<f64>();
        data_term / n + 0.5 * self.lambda * decay
    }

    /// Analytic gradient of [`Self::loss`] in the same parameter layout.
    pub fn gradient(&self, x: &Matrix, y: &Matrix) -> NetGradient {
        let n = x.rows() as f64;
        let mut g = NetGradient::zeros(self.n_in());
        for s in 0..x.rows() {
            let row = x.row(s);
            let f = self.forward(row);
            // softmax Jacobian applied to the squared-error residual
            let resid: Vec<f64> = (0..CLASSES).map(|k| f.probs[k] - y.get(s, k)).collect();
            let dot: f64 = resid.iter().zip(&f.probs).map(|(r, p)| r * p).sum();
            let delta2: Vec<f64> = (0..CLASSES)
                .map(|k| f.probs[k] * (resid[k] - dot))
                .collect();
            let mut delta1 = vec![0.0; HIDDEN_UNITS];
            for j in 0..HIDDEN_UNITS {
                let back: f64 = (0..CLASSES).map(|k| self.w2.get(k, j) * delta2[k]).sum();
                delta1[j] = back * f.a1[j] * (1.0 - f.a1[j]);
            }
            for k in 0..CLASSES {
                g.b2[k] += delta2[k] / n;
                for j in 0..HIDDEN_UNITS {
                    g.w2.set(k, j, g.w2.get(k, j) + delta2[k] * f.a1[j] / n);
                }
            }
            for j in 0..HIDDEN_UNITS {
                g.b1[j] += delta1[j] / n;
                for (i, &xi) in row.iter().enumerate() {
                    g.w1.set(j, i, g.w1.get(j, i) + delta1[j] * xi / n);
                }
            }
        }
        // decay acts on weights only, never biases
        for (gw, w) in g.w1.data_mut().iter_mut().zip(self.w1.data()) {
            *gw += self.lambda * w;
        }
        for (gw, w) in g.w2.data_mut().iter_mut().zip(self.w2.data()) {
            *gw += self.lambda * w;
        }
        g
    }
}

#[derive(Debug, Clone)]
pub struct NetGradient {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

impl NetGradient {
    fn zeros(n_in: usize) -> Self {
        NetGradient {
            w1: Matrix::zeros(HIDDEN_UNITS, n_in),
            b1: vec![0.0; HIDDEN_UNITS],
            w2: Matrix::zeros(CLASSES, HIDDEN_UNITS),
            b2: vec![0.0; CLASSES],
        }
    }
}

/// One-hot encoding of binary labels.
pub fn one_hot(labels: &[f64]) -> Result<Matrix> {
    let mut y = Matrix::zeros(labels.len(), CLASSES);
    for (i, &v) in labels.iter().enumerate() {
        if v != 0.0 && v != 1.0 {
            return Err(Error::NonBinaryLabels(v));
        }
        y.set(i, v as usize, 1.0);
    }
    Ok(y)
}

/// Full-batch gradient descent with learning rate alpha1 for weights and
/// alpha2 for biases.
pub fn train_shallow_net(
    x: &Matrix,
    y: &Matrix,
    alpha1: f64,
    alpha2: f64,
    lambda: f64,
    epochs: usize,
    rng: &mut NoiseRng,
) -> Result<ShallowNet> {
    if x.rows() != y.rows() || y.cols() != CLASSES {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} inputs vs {}x{} targets",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let mut net = ShallowNet::new(x.cols(), lambda, rng);
    for epoch in 0..epochs {
        let g = net.gradient(x, y);
        for (w, gw) in net.w1.data_mut().iter_mut().zip(g.w1.data()) {
            *w -= alpha1 * gw;
        }
        for (w, gw) in net.w2.data_mut().iter_mut().zip(g.w2.data()) {
            *w -= alpha1 * gw;
        }
        for (b, gb) in net.b1.iter_mut().zip(&g.b1) {
            *b -= alpha2 * gb;
        }
        for (b, gb) in net.b2.iter_mut().zip(&g.b2) {
            *b -= alpha2 * gb;
        }
        if !net.w1.data().iter().all(|v| v.is_finite())
            || !net.w2.data().iter().all(|v| v.is_finite())
        {
            return Err(Error::Divergence(epoch));
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::rng_from_seed;

    #[test]
    fn zero_weight_network_outputs_half_half() {
        let mut rng = rng_from_seed(0);
        let mut net = ShallowNet::new(3, 0.0, &mut rng);
        net.w1 = Matrix::zeros(HIDDEN_UNITS, 3);
        net.w2 = Matrix::zeros(CLASSES, HIDDEN_UNITS);
        let p = net.predict(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn softmax_outputs_are_a_distribution() {
        let mut rng = rng_from_seed(3);
        let net = ShallowNet::new(4, 0.0, &mut rng);
        for s in 0..50 {
            let x: Vec<f64> = (0..4).map(|i| ((s * 4 + i) as f64).sin() * 3.0).collect();
            let p = net.predict(&x).unwrap();
            assert!(p.iter().all(|&v| v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn argmax_invariant_under_logit_shift() {
        // adding a constant to both output biases must not change the class
        let mut rng = rng_from_seed(4);
        let net = ShallowNet::new(2, 0.0, &mut rng);
        let mut shifted = net.clone();
        for b in shifted.b2.iter_mut() {
            *b += 7.5;
        }
        for s in 0..50 {
            let x = [(s as f64).sin() * 2.0, (s as f64).cos() * 2.0];
            assert_eq!(
                net.predict_class(&x).unwrap(),
                shifted.predict_class(&x).unwrap()
            );
        }
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(5);
        let x = Matrix::from_rows(&[
            vec![0.3, -1.2],
            vec![1.1, 0.4],
            vec![-0.7, 0.9],
            vec![0.0, -0.2],
        ])
        .unwrap();
        let y = one_hot(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        let h = 1e-5;
        for _ in 0..10 {
            let net = ShallowNet::new(2, 1e-3, &mut rng);
            let g = net.gradient(&x, &y);
            let mut check = |get: &dyn Fn(&ShallowNet) -> f64,
                             set: &dyn Fn(&mut ShallowNet, f64),
                             analytic: f64| {
                let base = get(&net);
                let mut np = net.clone();
                set(&mut np, base + h);
                let mut nm = net.clone();
                set(&mut nm, base - h);
                let fd = (np.loss(&x, &y) - nm.loss(&x, &y)) / (2.0 * h);
                assert!(
                    (analytic - fd).abs() / fd.abs().max(1e-3) < 1e-5,
                    "analytic {analytic} vs fd {fd}"
                );
            };
            // spot-check a representative parameter from each group
            check(
                &|n| n.w1.get(2, 1),
                &|n, v| n.w1.set(2, 1, v),
                g.w1.get(2, 1),
            );
            check(
                &|n| n.w2.get(1, 3),
                &|n, v| n.w2.set(1, 3, v),
                g.w2.get(1, 3),
            );
            check(&|n| n.b1[4], &|n, v| n.b1[4] = v, g.b1[4]);
            check(&|n| n.b2[0], &|n, v| n.b2[0] = v, g.b2[0]);
        }
    }

    #[test]
    fn xor_is_learnable_with_restarts() {
        let x = Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let labels = [0.0, 1.0, 1.0, 0.0];
        let y = one_hot(&labels).unwrap();
        let mut solved = false;
        for restart in 0..5 {
            let mut rng = rng_from_seed(1000 + restart);
            let net = train_shallow_net(&x, &y, 2.0, 2.0, 0.0, 8000, &mut rng).unwrap();
            let correct = (0..4)
                .filter(|&i| net.predict_class(x.row(i)).unwrap() as f64 == labels[i])
                .count();
            if correct == 4 {
                solved = true;
                break;
            }
        }
        assert!(solved, "no restart solved XOR");
    }

    #[test]
    fn heavy_decay_shrinks_weights() {
        let x = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let y = one_hot(&[1.0, 0.0]).unwrap();
        let mut rng = rng_from_seed(9);
        let init = ShallowNet::new(1, 1e3, &mut rng);
        let init_norm: f64 = init.w1.data().iter().map(|w| w * w).sum::<f64>()
            + init.w2.data().iter().map(|w| w * w).sum::<f64>();
        let mut rng2 = rng_from_seed(9);
        let net = train_shallow_net(&x, &y, 1e-4, 1e-4, 1e3, 2000, &mut rng2).unwrap();
        let norm: f64 = net.w1.data().iter().map(|w| w * w).sum::<f64>()
            + net.w2.data().iter().map(|w| w * w).sum::<f64>();
        assert!(norm < init_norm);
    }

    #[test]
    fn rejects_non_binary_one_hot() {
        assert!(matches!(one_hot(&[0.0, 2.0]), Err(Error::NonBinaryLabels(_))));
    }
}
