//! The 2-regular 3-band orthonormal filter bank.

use crate::error::{Error, Result};

pub const FILTER_LEN: usize = 6;
pub const BANDS: usize = 3;

/// Low-pass taps of the 2-regular 3-band orthonormal wavelet.
pub const ALPHA: [f64; FILTER_LEN] = [
    0.33838609728386,
    0.53083618701374,
    0.72328627674361,
    0.23896417190576,
    0.04651408217589,
    -0.14593600755399,
];

/// First high-pass (detail) filter.
pub const BETA1: [f64; FILTER_LEN] = [
    -0.11737701613483,
    0.54433105395181,
    -0.01870574735313,
    -0.69911956479289,
    -0.13608276348796,
    0.42695403781698,
];

/// Second high-pass (detail) filter.
pub const BETA2: [f64; FILTER_LEN] = [
    0.40363686892892,
    -0.62853936105471,
    0.46060475252131,
    -0.40363686892892,
    -0.07856742013185,
    0.24650202866523,
];

/// A 3-band filter bank: one scaling filter and two detail filters,
/// all of length 6.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub alpha: [f64; FILTER_LEN],
    pub beta1: [f64; FILTER_LEN],
    pub beta2: [f64; FILTER_LEN],
}

const NORM_TOL: f64 = 1e-10;
const REGULARITY_TOL: f64 = 1e-9;

impl FilterBank {
    /// The standard 2-regular 3-band bank shipped with the toolkit.
    pub fn standard() -> Self {
        FilterBank {
            alpha: ALPHA,
            beta1: BETA1,
            beta2: BETA2,
        }
    }

    /// Build a bank from raw taps, validating the orthonormal filter
    /// identities (unit norms, sum rules, cross-orthogonality, first-moment
    /// regularity of the detail filters).
    pub fn new(
        alpha: [f64; FILTER_LEN],
        beta1: [f64; FILTER_LEN],
        beta2: [f64; FILTER_LEN],
    ) -> Result<Self> {
        let bank = FilterBank {
            alpha,
            beta1,
            beta2,
        };
        let r = bank.max_identity_residual();
        if r > NORM_TOL.max(REGULARITY_TOL) {
            return Err(Error::OrthonormalityFailure(r));
        }
        Ok(bank)
    }

    pub fn filters(&self) -> [&[f64; FILTER_LEN]; BANDS] {
        [&self.alpha, &self.beta1, &self.beta2]
    }

    /// Largest residual over all the filter-bank identities.
    pub fn max_identity_residual(&self) -> f64 {
        let norm = |f: &[f64; FILTER_LEN]| f.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sum = |f: &[f64; FILTER_LEN]| f.iter().sum::<f64>();
        let dot = |a: &[f64; FILTER_LEN], b: &[f64; FILTER_LEN]| {
            a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
        };
        // first moment with 1-based tap index
        let moment = |f: &[f64; FILTER_LEN]| {
            f.iter()
                .enumerate()
                .map(|(i, x)| (i + 1) as f64 * x)
                .sum::<f64>()
        };
        [
            (norm(&self.alpha) - 1.0).abs(),
            (norm(&self.beta1) - 1.0).abs(),
            (norm(&self.beta2) - 1.0).abs(),
            (sum(&self.alpha) - (BANDS as f64).sqrt()).abs(),
            sum(&self.beta1).abs(),
            sum(&self.beta2).abs(),
            dot(&self.alpha, &self.beta1).abs(),
            dot(&self.alpha, &self.beta2).abs(),
            moment(&self.beta1).abs(),
            moment(&self.beta2).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        FilterBank::standard()
    }
}
