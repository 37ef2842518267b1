//! Bundled synthetic tabular dataset: integer-valued predictors with a
//! binary label from a (optionally noisy) linear rule.

use crate::matrix::Matrix;
use crate::noise::rng_from_seed;
use rand::Rng;

/// Fixed linear rule behind the label.
pub const SYNTH_WEIGHTS: [f64; 8] = [1.0, -1.0, 0.8, -0.6, 0.5, 0.4, -0.3, 0.2];
pub const SYNTH_PREDICTORS: usize = 8;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub rows: usize,
    /// Standard deviation of the Gaussian perturbation on the label rule;
    /// zero makes the classes linearly separable.
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            // 2187 train + 729 test
            rows: 2916,
            label_noise: 0.6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub matrix: Matrix,
    pub column_names: Vec<String>,
    pub label_col: usize,
}

/// Predictors are integers drawn uniformly from 0..=10; the label is
/// 1 when the weighted sum of the centered predictors (plus the optional
/// Gaussian term) is positive.
pub fn synth_dataset(cfg: &SynthConfig) -> SynthDataset {
    let mut rng = rng_from_seed(cfg.seed);
    let mut m = Matrix::zeros(cfg.rows, SYNTH_PREDICTORS + 1);
    for i in 0..cfg.rows {
        let mut score = 0.0;
        for (j, w) in SYNTH_WEIGHTS.iter().enumerate() {
            let x = rng.gen_range(0..=10) as f64;
            m.set(i, j, x);
            score += w * (x - 5.0);
        }
        if cfg.label_noise > 0.0 {
            // Box-Muller standard normal
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            score += cfg.label_noise * g;
        }
        m.set(i, SYNTH_PREDICTORS, if score > 0.0 { 1.0 } else { 0.0 });
    }
    let mut column_names: Vec<String> = (1..=SYNTH_PREDICTORS).map(|j| format!("x{j}")).collect();
    column_names.push("label".into());
    SynthDataset {
        matrix: m,
        column_names,
        label_col: SYNTH_PREDICTORS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_value_ranges() {
        let d = synth_dataset(&SynthConfig::default());
        assert_eq!(d.matrix.rows(), 2916);
        assert_eq!(d.matrix.cols(), 9);
        for i in 0..d.matrix.rows() {
            for j in 0..SYNTH_PREDICTORS {
                let v = d.matrix.get(i, j);
                assert!(v.fract() == 0.0 && (0.0..=10.0).contains(&v));
            }
            let y = d.matrix.get(i, 8);
            assert!(y == 0.0 || y == 1.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = synth_dataset(&SynthConfig::default());
        let b = synth_dataset(&SynthConfig::default());
        assert_eq!(a.matrix, b.matrix);
        let c = synth_dataset(&SynthConfig {
            seed: 1,
            ..SynthConfig::default()
        });
        assert_ne!(a.matrix, c.matrix);
    }

    #[test]
    fn classes_are_roughly_balanced() {
        let d = synth_dataset(&SynthConfig::default());
        let ones: f64 = d.matrix.column(8).iter().sum();
        let frac = ones / d.matrix.rows() as f64;
        assert!((0.35..=0.65).contains(&frac), "positive fraction {frac}");
    }

    #[test]
    fn separable_variant_matches_the_rule_exactly() {
        let d = synth_dataset(&SynthConfig {
            rows: 300,
            label_noise: 0.0,
            seed: 2,
        });
        for i in 0..300 {
            let score: f64 = (0..8)
                .map(|j| SYNTH_WEIGHTS[j] * (d.matrix.get(i, j) - 5.0))
                .sum();
            let expect = if score > 0.0 { 1.0 } else { 0.0 };
            assert_eq!(d.matrix.get(i, 8), expect);
        }
    }
}
