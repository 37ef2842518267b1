//! The LS and LS+ privatization mechanisms.
//!
//! Both transform the dataset column-wise into the wavelet domain, add
//! Laplace-Sigmoid noise to the approximation block only, and invert the
//! transform. LS+ partitions the rows into fixed-size blocks and applies LS
//! independently per block with a derived seed, so results do not depend on
//! the order in which blocks are processed.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::{derive_seed, laplace_sigmoid, rng_from_seed, sample_laplace, NoiseRng};
use crate::wavelet::WaveletOperator;
use rand::Rng;

pub const DEFAULT_BLOCK_ROWS: usize = 9;

/// Which mechanism produced a privatized dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    Ls,
    LsPlus,
    Pq,
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Ls => "ls",
            Mechanism::LsPlus => "lsplus",
            Mechanism::Pq => "pq",
        }
    }
}

/// Everything a privatization run needs.
#[derive(Debug, Clone)]
pub struct PrivacyParams {
    /// Privacy budget.
    pub epsilon: f64,
    /// Data-sensitive bound parameter (LS / LS+).
    pub gamma: f64,
    /// Embedding intensity (pseudo-quantum).
    pub delta: f64,
    /// Embedding bias in [0, 1] (pseudo-quantum).
    pub eta: f64,
    /// Column holding the binary label, if any.
    pub label_col: Option<usize>,
    /// Threshold for re-binarizing the label column.
    pub label_threshold: f64,
    pub seed: u64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        PrivacyParams {
            epsilon,
            gamma: 1.0,
            delta: 0.1,
            eta: 0.0,
            label_col: None,
            label_threshold: 0.5,
            seed,
        }
    }

    /// Effective budget driving the Laplace scale: the sigmoid multiplier
    /// caps the noise at |X| / (1 + e^-gamma), so eps' = eps / (1 + e^-gamma)
    /// preserves the overall budget.
    pub fn epsilon_prime(&self) -> f64 {
        self.epsilon / (1.0 + (-self.gamma).exp())
    }

    pub fn validate(&self, mechanism: Mechanism) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Usage("epsilon must be positive".into()));
        }
        match mechanism {
            Mechanism::Ls | Mechanism::LsPlus => {
                if !(self.gamma > 0.0) {
                    return Err(Error::Usage("gamma must be positive".into()));
                }
            }
            Mechanism::Pq => {
                if !(0.0..=1.0).contains(&self.eta) {
                    return Err(Error::Usage("eta must lie in [0, 1]".into()));
                }
                if self.delta < 0.0 {
                    return Err(Error::Usage("delta must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }
}

/// Sign pattern of the Laplace draws, one entry per approximation
/// coefficient. Retained only for attack experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    pub signs: Matrix,
}

/// Output of a privatization run.
#[derive(Debug, Clone)]
pub struct PrivatizedDataset {
    pub data: Matrix,
    pub mechanism: Mechanism,
    pub params: PrivacyParams,
    /// Laplace sign trace (LS / LS+).
    pub trace: Option<NoiseTrace>,
    /// Branch selector values k_ij in [0, 1) (pseudo-quantum).
    pub selectors: Option<Matrix>,
    /// Row-block size (LS+).
    pub block_rows: Option<usize>,
}

/// Affine squash of the approximation block into [-gamma, gamma].
pub fn bound_transform(a: &Matrix, gamma: f64) -> Result<Matrix> {
    let (v, mu) = a.min_max()?;
    if mu == v {
        return Err(Error::DegenerateRange);
    }
    Ok(a.map(|x| gamma * (2.0 * x - mu - v) / (mu - v)))
}

/// Laplace-Sigmoid noise matrix for a bounded approximation block, plus the
/// sign trace of the underlying Laplace draws.
pub fn laplace_sigmoid_noise(
    bounded: &Matrix,
    eps_prime: f64,
    rng: &mut NoiseRng,
) -> (Matrix, NoiseTrace) {
    let scale = 1.0 / eps_prime;
    let mut noise = Matrix::zeros(bounded.rows(), bounded.cols());
    let mut signs = Matrix::zeros(bounded.rows(), bounded.cols());
    for i in 0..bounded.rows() {
        for j in 0..bounded.cols() {
            let x = sample_laplace(scale, rng);
            noise.set(i, j, laplace_sigmoid(x, bounded.get(i, j)));
            signs.set(i, j, if x >= 0.0 { 1.0 } else { -1.0 });
        }
    }
    (noise, NoiseTrace { signs })
}

/// Re-binarize one column in place at the given threshold.
pub fn binarize_column(data: &mut Matrix, col: usize, threshold: f64) {
    for i in 0..data.rows() {
        let v = if data.get(i, col) >= threshold { 1.0 } else { 0.0 };
        data.set(i, col, v);
    }
}

fn ls_core(data: &Matrix, params: &PrivacyParams, rng: &mut NoiseRng) -> Result<(Matrix, NoiseTrace)> {
    let op = WaveletOperator::standard(data.rows())?;
    let mut t = op.forward(data)?;
    let bounded = bound_transform(&t.approx, params.gamma)?;
    let (noise, trace) = laplace_sigmoid_noise(&bounded, params.epsilon_prime(), rng);
    for i in 0..t.approx.rows() {
        for j in 0..t.approx.cols() {
            t.approx.set(i, j, t.approx.get(i, j) + noise.get(i, j));
        }
    }
    Ok((op.inverse(&t)?, trace))
}

/// LS: single-wavelet privatization of the full dataset.
pub fn ls_privatize(data: &Matrix, params: &PrivacyParams) -> Result<PrivatizedDataset> {
    params.validate(Mechanism::Ls)?;
    let mut rng = rng_from_seed(params.seed);
    let (mut noisy, trace) = ls_core(data, params, &mut rng)?;
    if let Some(col) = params.label_col {
        check_label_col(data, col)?;
        binarize_column(&mut noisy, col, params.label_threshold);
    }
    Ok(PrivatizedDataset {
        data: noisy,
        mechanism: Mechanism::Ls,
        params: params.clone(),
        trace: Some(trace),
        selectors: None,
        block_rows: None,
    })
}

/// LS+: independent LS runs over disjoint row blocks, concatenated.
/// Block i draws from seed derive_seed(params.seed, i).
pub fn ls_plus_privatize(
    data: &Matrix,
    params: &PrivacyParams,
    block_rows: usize,
) -> Result<PrivatizedDataset> {
    params.validate(Mechanism::LsPlus)?;
    if block_rows % 3 != 0 || block_rows < 6 {
        return Err(Error::InvalidSize(block_rows));
    }
    if data.rows() % block_rows != 0 {
        return Err(Error::ShapeMismatch(format!(
            "{} rows are not divisible into blocks of {}",
            data.rows(),
            block_rows
        )));
    }
    let n_blocks = data.rows() / block_rows;
    let mut parts = Vec::with_capacity(n_blocks);
    let mut sign_parts = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        let block = data.row_slice(b * block_rows, block_rows);
        let mut rng = rng_from_seed(derive_seed(params.seed, b as u64));
        let (noisy, trace) = ls_core(&block, params, &mut rng)?;
        parts.push(noisy);
        sign_parts.push(trace.signs);
    }
    let mut noisy = Matrix::vstack(&parts.iter().collect::<Vec<_>>())?;
    let signs = Matrix::vstack(&sign_parts.iter().collect::<Vec<_>>())?;
    if let Some(col) = params.label_col {
        check_label_col(data, col)?;
        binarize_column(&mut noisy, col, params.label_threshold);
    }
    Ok(PrivatizedDataset {
        data: noisy,
        mechanism: Mechanism::LsPlus,
        params: params.clone(),
        trace: Some(NoiseTrace { signs }),
        selectors: None,
        block_rows: Some(block_rows),
    })
}

pub(crate) fn check_label_col(data: &Matrix, col: usize) -> Result<()> {
    if col >= data.cols() {
        return Err(Error::ShapeMismatch(format!(
            "label column {} out of range for {} columns",
            col,
            data.cols()
        )));
    }
    Ok(())
}

/// Uniform branch values in [0, 1), used by the pseudo-quantum mechanism.
pub(crate) fn uniform_matrix(rows: usize, cols: usize, rng: &mut NoiseRng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.gen::<f64>());
        }
    }
    m
}
