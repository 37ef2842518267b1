//! Wavelet-domain differential-privacy toolkit.
//!
//! A 3-band orthonormal wavelet transform splits tabular data (or grayscale
//! images) column-wise into one approximation and two detail blocks. Three
//! mechanisms perturb only the approximation block: LS adds data-sensitive
//! Laplace-Sigmoid noise, LS+ applies LS independently over disjoint row
//! blocks, and the pseudo-quantum mechanism folds Laplace noise into the
//! data through per-entry trigonometric embeddings. Attack simulations,
//! from-scratch learners, and a CLI round out the toolkit.

pub mod attack;
pub mod error;
pub mod filter;
pub mod io;
pub mod matrix;
pub mod mechanisms;
pub mod ml;
pub mod noise;
pub mod pq;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use mechanisms::{
    ls_plus_privatize, ls_privatize, Mechanism, PrivacyParams, PrivatizedDataset,
    DEFAULT_BLOCK_ROWS,
};
pub use pq::{pq_embed_image, pq_privatize};
pub use wavelet::{TransformedData, WaveletOperator};
