//! De-noising attack simulation.
//!
//! The factor-sweep attack assumes an adversary who somehow obtained the
//! sign trace of the Laplace draws and tries to cancel the noise by scaling
//! that trace with a factor r. The H metric is the average minimum absolute
//! difference to the original dataset over the r grid; it is computed
//! against the original data, which only the experimenter holds, so this is
//! a measurement harness rather than a usable adversary tool.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mechanisms::{ls_privatize, PrivacyParams, PrivatizedDataset};
use crate::noise::derive_seed;
use crate::pq::is_cosine_branch;
use crate::wavelet::{TransformedData, WaveletOperator};

/// Enumeration bound for the selector brute force.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Candidate scale factors for the sign trace.
    pub r_grid: Vec<f64>,
    /// Privatization repetitions per epsilon.
    pub trials: usize,
    pub epsilon_grid: Vec<f64>,
    pub gamma: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r_grid: (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect(),
            trials: 100,
            epsilon_grid: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    /// (epsilon, average minimum absolute difference) pairs.
    pub h_per_epsilon: Vec<(f64, f64)>,
    pub trials: usize,
    pub r_grid: Vec<f64>,
}

/// One sweep: the best (smallest) mean absolute difference achievable by
/// subtracting r * trace from the privatized dataset, over the r grid.
pub fn denoise_sweep(
    original: &Matrix,
    privatized: &PrivatizedDataset,
    r_grid: &[f64],
) -> Result<f64> {
    let trace = privatized.trace.as_ref().ok_or(Error::MissingTrace)?;
    if !original.same_shape(&privatized.data) {
        return Err(Error::ShapeMismatch(
            "original and privatized datasets differ in shape".into(),
        ));
    }
    if r_grid.is_empty() {
        return Err(Error::Usage("empty r grid".into()));
    }
    // LS+ traces stack per block; the sweep here covers the single-wavelet
    // case where the trace spans the whole approximation block.
    let op = WaveletOperator::standard(original.rows())?;
    if trace.signs.rows() != original.rows() / 3 || trace.signs.cols() != original.cols() {
        return Err(Error::ShapeMismatch(
            "trace does not match a whole-dataset approximation block".into(),
        ));
    }
    let zero = Matrix::zeros(trace.signs.rows(), trace.signs.cols());
    let mut best = f64::INFINITY;
    for &r in r_grid {
        let t = TransformedData {
            approx: trace.signs.map(|s| r * s),
            detail1: zero.clone(),
            detail2: zero.clone(),
        };
        let correction = op.inverse(&t)?;
        let mut acc = 0.0;
        for i in 0..original.rows() {
            for j in 0..original.cols() {
                let candidate = privatized.data.get(i, j) - correction.get(i, j);
                acc += (original.get(i, j) - candidate).abs();
            }
        }
        best = best.min(acc / (original.rows() * original.cols()) as f64);
    }
    Ok(best)
}

/// Full factor-sweep experiment: repeated LS privatizations per epsilon,
/// averaging the per-trial sweep minimum.
pub fn attack_experiment(original: &Matrix, cfg: &SweepConfig, seed: u64) -> Result<AttackReport> {
    if cfg.trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    let mut h_per_epsilon = Vec::with_capacity(cfg.epsilon_grid.len());
    for (e_idx, &eps) in cfg.epsilon_grid.iter().enumerate() {
        let mut acc = 0.0;
        for t in 0..cfg.trials {
            let mut params = PrivacyParams::new(eps, 0);
            params.gamma = cfg.gamma;
            params.seed = derive_seed(seed, (e_idx * cfg.trials + t) as u64);
            let privatized = ls_privatize(original, &params)?;
            acc += denoise_sweep(original, &privatized, &cfg.r_grid)?;
        }
        h_per_epsilon.push((eps, acc / cfg.trials as f64));
    }
    Ok(AttackReport {
        h_per_epsilon,
        trials: cfg.trials,
        r_grid: cfg.r_grid.clone(),
    })
}

/// Probability that blind selector guessing decodes the noise: one correct
/// pattern among 2^(selector entries), with (m/3) * n selector entries for
/// an m x n dataset.
pub fn decode_probability(m: usize, n: usize) -> Result<f64> {
    if m % 3 != 0 || m == 0 {
        return Err(Error::InvalidSize(m));
    }
    Ok(2.0_f64.powi(-(((m / 3) * n) as i32)))
}

/// All branch assignments (true = cosine) under which extraction yields
/// arguments inside the valid noise-angle image [1/2, sqrt(3)/2]. The
/// ground-truth assignment is always consistent.
pub fn brute_force_decode(
    theta_e: &Matrix,
    theta: &Matrix,
    delta: f64,
    eta: f64,
) -> Result<Vec<Vec<bool>>> {
    if delta == 0.0 {
        return Err(Error::ZeroDelta);
    }
    if !theta_e.same_shape(theta) {
        return Err(Error::ShapeMismatch("angle matrices differ in shape".into()));
    }
    let entries = theta_e.rows() * theta_e.cols();
    if entries > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(entries, BRUTE_FORCE_LIMIT));
    }
    let lo = 0.5 - 1e-9;
    let hi = 3.0_f64.sqrt() / 2.0 + 1e-9;
    // with eta = 1 the cosine branch has probability 0 and is infeasible
    let cosine_feasible = eta < 1.0;
    let mut consistent = Vec::new();
    'pattern: for mask in 0u32..(1 << entries) {
        let mut pattern = Vec::with_capacity(entries);
        for idx in 0..entries {
            let cosine = mask & (1 << idx) != 0;
            if cosine && !cosine_feasible {
                continue 'pattern;
            }
            let (i, j) = (idx / theta_e.cols(), idx % theta_e.cols());
            let (te, t) = (theta_e.get(i, j), theta.get(i, j));
            let arg = if cosine {
                (te.cos() - t.cos()) / delta
            } else {
                (te.sin() - t.sin()) / delta
            };
            if !(lo..=hi).contains(&arg) {
                continue 'pattern;
            }
            pattern.push(cosine);
        }
        consistent.push(pattern);
    }
    Ok(consistent)
}

/// Ground-truth branch pattern from retained selectors, row-major.
pub fn pattern_from_selectors(selectors: &Matrix, eta: f64) -> Vec<bool> {
    selectors
        .data()
        .iter()
        .map(|&k| is_cosine_branch(k, eta))
        .collect()
}
