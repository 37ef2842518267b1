//! Matrix-free 3-band orthonormal wavelet transform.
//!
//! The transform matrix W is never materialized for production use. Its rows
//! are the three filters placed at stride-3 offsets with periodic wraparound,
//! so forward and inverse transforms are strided circular correlations and
//! run in O(rows * cols * filter_len). A dense constructor exists for small
//! sizes so tests can compare against the explicit matrix product.

use crate::error::{Error, Result};
use crate::filter::{FilterBank, BANDS};
use crate::matrix::Matrix;

/// Upper size bound for the dense test oracle.
pub const DENSE_LIMIT: usize = 81;

/// One approximation block and two detail blocks of equal shape.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedData {
    pub approx: Matrix,
    pub detail1: Matrix,
    pub detail2: Matrix,
}

impl TransformedData {
    pub fn block_rows(&self) -> usize {
        self.approx.rows()
    }

    pub fn cols(&self) -> usize {
        self.approx.cols()
    }

    fn check_consistent(&self) -> Result<()> {
        if !self.approx.same_shape(&self.detail1) || !self.approx.same_shape(&self.detail2) {
            return Err(Error::ShapeMismatch(
                "approximation and detail blocks differ in shape".into(),
            ));
        }
        Ok(())
    }

    /// Stack the blocks into a single (3b)xn matrix in band order.
    pub fn stacked(&self) -> Matrix {
        Matrix::vstack(&[&self.approx, &self.detail1, &self.detail2]).expect("blocks share shape")
    }
}

/// A size-N orthonormal 3-band transform applied column-wise.
#[derive(Debug, Clone)]
pub struct WaveletOperator {
    size: usize,
    filters: FilterBank,
}

const SELF_CHECK_TOL: f64 = 1e-8;

impl WaveletOperator {
    /// Build the operator and run a norm-preservation / perfect-reconstruction
    /// self-check on a deterministic probe vector.
    pub fn new(filters: FilterBank, size: usize) -> Result<Self> {
        if size % BANDS != 0 || size < 2 * BANDS {
            return Err(Error::InvalidSize(size));
        }
        let op = WaveletOperator { size, filters };
        op.self_check()?;
        Ok(op)
    }

    /// Operator with the standard filter bank.
    pub fn standard(size: usize) -> Result<Self> {
        WaveletOperator::new(FilterBank::standard(), size)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn filters(&self) -> &FilterBank {
        &self.filters
    }

    fn self_check(&self) -> Result<()> {
        // deterministic quasi-random probe
        let probe: Vec<f64> = (0..self.size)
            .map(|i| ((i as f64 * 0.754877666) % 1.0) - 0.5 + ((i % 7) as f64) * 0.1)
            .collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let fwd = self.forward_column(&probe);
        let back = self.inverse_column(&fwd);
        let n0 = norm(&probe);
        let mut residual = (norm(&fwd) - n0).abs() / n0;
        for (a, b) in probe.iter().zip(&back) {
            residual = residual.max((a - b).abs() / n0);
        }
        if residual > SELF_CHECK_TOL {
            return Err(Error::OrthonormalityFailure(residual));
        }
        Ok(())
    }

    /// Apply W to one column: three strided circular correlations.
    fn forward_column(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size;
        let b = n / BANDS;
        let mut out = vec![0.0; n];
        for (blk, filter) in self.filters.filters().into_iter().enumerate() {
            for r in 0..b {
                let mut acc = 0.0;
                for (t, &h) in filter.iter().enumerate() {
                    acc += h * x[(3 * r + t) % n];
                }
                out[blk * b + r] = acc;
            }
        }
        out
    }

    /// Apply W^T to one stacked coefficient column.
    fn inverse_column(&self, y: &[f64]) -> Vec<f64> {
        let n = self.size;
        let b = n / BANDS;
        let mut out = vec![0.0; n];
        for (blk, filter) in self.filters.filters().into_iter().enumerate() {
            for r in 0..b {
                let c = y[blk * b + r];
                for (t, &h) in filter.iter().enumerate() {
                    out[(3 * r + t) % n] += h * c;
                }
            }
        }
        out
    }

    /// Column-wise forward transform of an m x n matrix, m = size.
    pub fn forward(&self, data: &Matrix) -> Result<TransformedData> {
        if data.rows() != self.size {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} rows, operator expects {}",
                data.rows(),
                self.size
            )));
        }
        let b = self.size / BANDS;
        let n = data.cols();
        let mut approx = Matrix::zeros(b, n);
        let mut detail1 = Matrix::zeros(b, n);
        let mut detail2 = Matrix::zeros(b, n);
        for j in 0..n {
            let col = data.column(j);
            let y = self.forward_column(&col);
            for r in 0..b {
                approx.set(r, j, y[r]);
                detail1.set(r, j, y[b + r]);
                detail2.set(r, j, y[2 * b + r]);
            }
        }
        Ok(TransformedData {
            approx,
            detail1,
            detail2,
        })
    }

    /// Column-wise inverse transform back to the data domain.
    pub fn inverse(&self, t: &TransformedData) -> Result<Matrix> {
        t.check_consistent()?;
        let b = self.size / BANDS;
        if t.block_rows() != b {
            return Err(Error::ShapeMismatch(format!(
                "blocks have {} rows, operator expects {}",
                t.block_rows(),
                b
            )));
        }
        let n = t.cols();
        let mut out = Matrix::zeros(self.size, n);
        let mut y = vec![0.0; self.size];
        for j in 0..n {
            for r in 0..b {
                y[r] = t.approx.get(r, j);
                y[b + r] = t.detail1.get(r, j);
                y[2 * b + r] = t.detail2.get(r, j);
            }
            let col = self.inverse_column(&y);
            out.set_column(j, &col);
        }
        Ok(out)
    }

    /// Explicit dense W, available only at oracle scale (N <= 81).
    pub fn dense_matrix(&self) -> Result<Matrix> {
        if self.size > DENSE_LIMIT {
            return Err(Error::TooLarge(self.size, DENSE_LIMIT));
        }
        let n = self.size;
        let b = n / BANDS;
        let mut w = Matrix::zeros(n, n);
        for (blk, filter) in self.filters.filters().into_iter().enumerate() {
            for r in 0..b {
                for (t, &h) in filter.iter().enumerate() {
                    let j = (3 * r + t) % n;
                    w.set(blk * b + r, j, w.get(blk * b + r, j) + h);
                }
            }
        }
        Ok(w)
    }

    /// Plain-text dump of the dense matrix (row-major, full precision),
    /// for comparison against external oracles.
    pub fn dump_dense(&self) -> Result<String> {
        let w = self.dense_matrix()?;
        let mut s = String::new();
        for i in 0..w.rows() {
            let row: Vec<String> = w.row(i).iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        Ok(s)
    }
}
