//! Repeated-trial protocol measuring how well models learn from privatized
//! data.
//!
//! Each trial draws disjoint train/test subsets, privatizes the training set
//! (label re-binarized), privatizes the test predictors, and scores the
//! trained model against the untouched test labels. Predictors are
//! standardized with statistics fitted on the (privatized) training split so
//! the fixed learning rates behave the same across mechanisms and scales.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mechanisms::{
    binarize_column, ls_plus_privatize, ls_privatize, PrivacyParams,
};
use crate::ml::logistic::train_logistic;
use crate::ml::net::{one_hot, train_shallow_net};
use crate::noise::{derive_seed, rng_from_seed};
use crate::pq::pq_privatize;
use rand::Rng;

/// Which privatization to apply per trial. Identity is the clean-data
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismSpec {
    Identity,
    Ls,
    LsPlus { block_rows: usize },
    Pq,
}

impl MechanismSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MechanismSpec::Identity => "identity",
            MechanismSpec::Ls => "ls",
            MechanismSpec::LsPlus { .. } => "lsplus",
            MechanismSpec::Pq => "pq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Logistic,
    Nn,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Nn => "nn",
        }
    }
}

/// Learner hyperparameters for the trial runs. The logistic rate is in
/// mean-gradient units and is divided by the training-set size internally
/// (the trainer sums per-sample gradients).
#[derive(Debug, Clone)]
pub struct TrialOptions {
    pub logistic_lr: f64,
    pub logistic_epochs: usize,
    pub nn_alpha: f64,
    pub nn_lambda: f64,
    pub nn_epochs: usize,
}

impl Default for TrialOptions {
    fn default() -> Self {
        TrialOptions {
            logistic_lr: 1.0,
            logistic_epochs: 2000,
            nn_alpha: 0.5,
            nn_lambda: 1e-4,
            nn_epochs: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub mechanism: &'static str,
    pub model: &'static str,
    pub params: PrivacyParams,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub trials: usize,
    pub train_size: usize,
    pub test_size: usize,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Column means and standard deviations of a predictor matrix.
struct Standardizer {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix) -> Self {
        let n = x.rows() as f64;
        let mut means = vec![0.0; x.cols()];
        let mut stds = vec![0.0; x.cols()];
        for j in 0..x.cols() {
            let col = x.column(j);
            let m = col.iter().sum::<f64>() / n;
            let v = col.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / n;
            means[j] = m;
            stds[j] = v.sqrt().max(1e-9);
        }
        Standardizer { means, stds }
    }

    fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                out.set(i, j, (x.get(i, j) - self.means[j]) / self.stds[j]);
            }
        }
        out
    }
}

fn privatize(
    data: &Matrix,
    spec: MechanismSpec,
    params: &PrivacyParams,
) -> Result<Matrix> {
    match spec {
        MechanismSpec::Identity => {
            let mut out = data.clone();
            if let Some(col) = params.label_col {
                binarize_column(&mut out, col, params.label_threshold);
            }
            Ok(out)
        }
        MechanismSpec::Ls => Ok(ls_privatize(data, params)?.data),
        MechanismSpec::LsPlus { block_rows } => {
            Ok(ls_plus_privatize(data, params, block_rows)?.data)
        }
        MechanismSpec::Pq => Ok(pq_privatize(data, params)?.data),
    }
}

/// Row-count constraint a subset must satisfy for the given mechanism.
fn check_divisibility(rows: usize, spec: MechanismSpec) -> Result<()> {
    let unit = match spec {
        MechanismSpec::LsPlus { block_rows } => block_rows,
        _ => 3,
    };
    if rows % unit != 0 || rows < 6 {
        return Err(Error::InvalidSize(rows));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    dataset: &Matrix,
    spec: MechanismSpec,
    params: &PrivacyParams,
    model: ModelKind,
    n_trials: usize,
    train_size: usize,
    test_size: usize,
    opts: &TrialOptions,
) -> Result<TrialReport> {
    if n_trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    let label_col = params
        .label_col
        .ok_or_else(|| Error::Usage("evaluation requires a label column".into()))?;
    if label_col >= dataset.cols() {
        return Err(Error::ShapeMismatch(format!(
            "label column {} out of range for {} columns",
            label_col,
            dataset.cols()
        )));
    }
    if dataset.rows() < train_size + test_size {
        return Err(Error::InsufficientData {
            have: dataset.rows(),
            need: train_size + test_size,
        });
    }
    if spec != MechanismSpec::Identity {
        check_divisibility(train_size, spec)?;
        check_divisibility(test_size, spec)?;
    }

    let mut accuracies = Vec::with_capacity(n_trials);
    for trial in 0..n_trials {
        let trial_seed = derive_seed(params.seed, trial as u64);
        accuracies.push(run_one_trial(
            dataset, spec, params, model, train_size, test_size, label_col, trial_seed, opts,
        )?);
    }
    let (mean, std_dev) = mean_std(&accuracies);
    Ok(TrialReport {
        mechanism: spec.name(),
        model: model.name(),
        params: params.clone(),
        accuracies,
        mean,
        std_dev,
        trials: n_trials,
        train_size,
        test_size,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_one_trial(
    dataset: &Matrix,
    spec: MechanismSpec,
    params: &PrivacyParams,
    model: ModelKind,
    train_size: usize,
    test_size: usize,
    label_col: usize,
    trial_seed: u64,
    opts: &TrialOptions,
) -> Result<f64> {
    // disjoint subsets via a Fisher-Yates shuffle of the row indices
    let mut shuffle_rng = rng_from_seed(derive_seed(trial_seed, 0));
    let mut idx: Vec<usize> = (0..dataset.rows()).collect();
    for i in (1..idx.len()).rev() {
        idx.swap(i, shuffle_rng.gen_range(0..=i));
    }
    let take = |range: std::ops::Range<usize>| -> Matrix {
        let rows: Vec<Vec<f64>> = idx[range].iter().map(|&i| dataset.row(i).to_vec()).collect();
        Matrix::from_rows(&rows).expect("subset rows are rectangular")
    };
    let train = take(0..train_size);
    let test = take(train_size..train_size + test_size);

    // train side: whole rows privatized, label column re-binarized
    let mut train_params = params.clone();
    train_params.seed = derive_seed(trial_seed, 1);
    let train_priv = privatize(&train, spec, &train_params)?;
    let train_x = train_priv.drop_column(label_col);
    let train_y = train_priv.column(label_col);

    // test side: predictors privatized, labels kept clean for scoring
    let test_x_clean = test.drop_column(label_col);
    let mut test_params = params.clone();
    test_params.seed = derive_seed(trial_seed, 2);
    test_params.label_col = None;
    let test_x_priv = privatize(&test_x_clean, spec, &test_params)?;
    let test_y = test.column(label_col);

    let scaler = Standardizer::fit(&train_x);
    let train_x = scaler.apply(&train_x);
    let test_x = scaler.apply(&test_x_priv);

    let mut correct = 0usize;
    match model {
        ModelKind::Logistic => {
            let lr = opts.logistic_lr / train_size as f64;
            let (m, _) = train_logistic(&train_x, &train_y, lr, lr, opts.logistic_epochs)?;
            for i in 0..test_x.rows() {
                if m.predict_class(test_x.row(i))? as f64 == test_y[i] {
                    correct += 1;
                }
            }
        }
        ModelKind::Nn => {
            let y = one_hot(&train_y)?;
            let mut init_rng = rng_from_seed(derive_seed(trial_seed, 3));
            let net = train_shallow_net(
                &train_x,
                &y,
                opts.nn_alpha,
                opts.nn_alpha,
                opts.nn_lambda,
                opts.nn_epochs,
                &mut init_rng,
            )?;
            for i in 0..test_x.rows() {
                if net.predict_class(test_x.row(i))? as f64 == test_y[i] {
                    correct += 1;
                }
            }
        }
    }
    Ok(correct as f64 / test_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::DEFAULT_BLOCK_ROWS;
    use crate::synth::{synth_dataset, SynthConfig};

    fn small_params(epsilon: f64, seed: u64) -> PrivacyParams {
        let mut p = PrivacyParams::new(epsilon, seed);
        p.label_col = Some(8);
        p
    }

    #[test]
    fn identity_on_separable_data_is_near_perfect() {
        let mut cfg = SynthConfig::default();
        cfg.label_noise = 0.0;
        let d = synth_dataset(&cfg);
        let r = run_trials(
            &d.matrix,
            MechanismSpec::Identity,
            &small_params(1.0, 5),
            ModelKind::Logistic,
            2,
            2187,
            729,
            &TrialOptions::default(),
        )
        .unwrap();
        assert!(r.mean >= 0.99, "mean accuracy {}", r.mean);
    }

    #[test]
    fn report_shape_and_range() {
        let d = synth_dataset(&SynthConfig {
            rows: 135,
            ..SynthConfig::default()
        });
        let r = run_trials(
            &d.matrix,
            MechanismSpec::Ls,
            &small_params(1.0, 7),
            ModelKind::Logistic,
            4,
            81,
            27,
            &TrialOptions {
                logistic_epochs: 50,
                ..TrialOptions::default()
            },
        )
        .unwrap();
        assert_eq!(r.accuracies.len(), 4);
        assert!(r.accuracies.iter().all(|&a| (0.0..=1.0).contains(&a)));
        assert!((r.mean - r.accuracies.iter().sum::<f64>() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn trials_are_reproducible() {
        let d = synth_dataset(&SynthConfig {
            rows: 135,
            ..SynthConfig::default()
        });
        let run = || {
            run_trials(
                &d.matrix,
                MechanismSpec::Pq,
                &small_params(2.0, 11),
                ModelKind::Logistic,
                3,
                81,
                27,
                &TrialOptions {
                    logistic_epochs: 50,
                    ..TrialOptions::default()
                },
            )
            .unwrap()
        };
        assert_eq!(run().accuracies, run().accuracies);
    }

    #[test]
    fn insufficient_rows_is_an_error() {
        let d = synth_dataset(&SynthConfig {
            rows: 27,
            ..SynthConfig::default()
        });
        assert!(matches!(
            run_trials(
                &d.matrix,
                MechanismSpec::Identity,
                &small_params(1.0, 0),
                ModelKind::Logistic,
                1,
                27,
                9,
                &TrialOptions::default(),
            ),
            Err(Error::InsufficientData { have: 27, need: 36 })
        ));
    }

    #[test]
    fn lsplus_trial_respects_block_divisibility() {
        let d = synth_dataset(&SynthConfig {
            rows: 135,
            ..SynthConfig::default()
        });
        assert!(matches!(
            run_trials(
                &d.matrix,
                MechanismSpec::LsPlus {
                    block_rows: DEFAULT_BLOCK_ROWS
                },
                &small_params(1.0, 0),
                ModelKind::Logistic,
                1,
                84,
                27,
                &TrialOptions::default(),
            ),
            Err(Error::InvalidSize(84))
        ));
    }

    #[test]
    fn nn_trials_run_end_to_end() {
        let mut cfg = SynthConfig::default();
        cfg.rows = 135;
        cfg.label_noise = 0.0;
        let d = synth_dataset(&cfg);
        let r = run_trials(
            &d.matrix,
            MechanismSpec::Identity,
            &small_params(1.0, 3),
            ModelKind::Nn,
            2,
            81,
            27,
            &TrialOptions {
                nn_epochs: 200,
                ..TrialOptions::default()
            },
        )
        .unwrap();
        assert!(r.mean > 0.8, "mean accuracy {}", r.mean);
    }
}
