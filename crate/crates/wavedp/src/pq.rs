//! Pseudo-quantum steganographic noise embedding.
//!
//! Approximation coefficients and Laplace noise are both mapped affinely to
//! angles in [pi/6, pi/3]; each noise angle is then folded into the matching
//! data angle through either a cosine or a sine branch, chosen per entry by
//! a uniform selector. Real-valued output requires the embedding intensity
//! delta to stay at or below 2/sqrt(3) - 1; above that the inverse trig
//! arguments can leave [-1, 1] and the imaging mode switches to the complex
//! principal branch.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mechanisms::{
    binarize_column, check_label_col, uniform_matrix, Mechanism, PrivacyParams, PrivatizedDataset,
};
use crate::noise::{rng_from_seed, sample_laplace, NoiseRng};
use crate::wavelet::WaveletOperator;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Least upper bound of delta for real-valued output.
pub fn delta_real_max() -> f64 {
    2.0 / 3.0_f64.sqrt() - 1.0
}

/// Angles in [pi/6, pi/3] together with the affine map endpoints needed to
/// invert them.
#[derive(Debug, Clone)]
pub struct AngleBundle {
    pub theta: Matrix,
    /// Maximum of the source matrix.
    pub mu1: f64,
    /// Minimum of the source matrix.
    pub v1: f64,
}

/// Affine map of a non-constant matrix onto angles in [pi/6, pi/3].
pub fn angles_from_values(values: &Matrix) -> Result<AngleBundle> {
    let (v1, mu1) = values.min_max()?;
    if mu1 == v1 {
        return Err(Error::DegenerateRange);
    }
    let theta = values.map(|x| PI * (x + mu1 - 2.0 * v1) / (6.0 * (mu1 - v1)));
    Ok(AngleBundle { theta, mu1, v1 })
}

/// Exact affine inverse of [`angles_from_values`].
pub fn values_from_angles(theta_e: &Matrix, mu1: f64, v1: f64) -> Result<Matrix> {
    if mu1 <= v1 {
        return Err(Error::DegenerateRange);
    }
    Ok(theta_e.map(|t| 6.0 * t * (mu1 - v1) / PI - mu1 + 2.0 * v1))
}

/// Cosine branch iff k >= (1 + eta) / 2, so the cosine branch has
/// probability (1 - eta) / 2.
#[inline]
pub fn is_cosine_branch(k: f64, eta: f64) -> bool {
    k >= (1.0 + eta) / 2.0
}

fn embed_entry(theta: f64, x: f64, delta: f64, cosine: bool) -> f64 {
    if cosine {
        (theta.cos() + delta * x.cos()).clamp(-1.0, 1.0).acos()
    } else {
        (theta.sin() + delta * x.sin()).clamp(-1.0, 1.0).asin()
    }
}

/// Embed noise angles `x` into data angles, drawing one selector per entry.
/// Returns the embedded angles and the selector matrix.
pub fn pq_embed(
    theta: &AngleBundle,
    x: &Matrix,
    delta: f64,
    eta: f64,
    rng: &mut NoiseRng,
) -> Result<(Matrix, Matrix)> {
    if !theta.theta.same_shape(x) {
        return Err(Error::ShapeMismatch(
            "data angles and noise angles differ in shape".into(),
        ));
    }
    if delta > delta_real_max() {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let selectors = uniform_matrix(theta.theta.rows(), theta.theta.cols(), rng);
    let mut out = Matrix::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let cosine = is_cosine_branch(selectors.get(i, j), eta);
            out.set(
                i,
                j,
                embed_entry(theta.theta.get(i, j), x.get(i, j), delta, cosine),
            );
        }
    }
    Ok((out, selectors))
}

/// Recover the embedded noise angles from the embedded data, the original
/// data angles, and the true selectors. Fails when the inverse-trig argument
/// leaves [-1, 1], which signals wrong selectors or a wrong delta.
pub fn pq_extract(
    theta_e: &Matrix,
    theta: &Matrix,
    selectors: &Matrix,
    delta: f64,
    eta: f64,
) -> Result<Matrix> {
    if delta == 0.0 {
        return Err(Error::ZeroDelta);
    }
    if !theta_e.same_shape(theta) || !theta_e.same_shape(selectors) {
        return Err(Error::ShapeMismatch("extraction inputs differ in shape".into()));
    }
    let mut out = Matrix::zeros(theta_e.rows(), theta_e.cols());
    for i in 0..theta_e.rows() {
        for j in 0..theta_e.cols() {
            let (te, t) = (theta_e.get(i, j), theta.get(i, j));
            let arg = if is_cosine_branch(selectors.get(i, j), eta) {
                (te.cos() - t.cos()) / delta
            } else {
                (te.sin() - t.sin()) / delta
            };
            if arg.abs() > 1.0 + 1e-12 {
                return Err(Error::ArgumentOutOfDomain(arg));
            }
            let a = arg.clamp(-1.0, 1.0);
            out.set(
                i,
                j,
                if is_cosine_branch(selectors.get(i, j), eta) {
                    a.acos()
                } else {
                    a.asin()
                },
            );
        }
    }
    Ok(out)
}

fn laplace_matrix(rows: usize, cols: usize, scale: f64, rng: &mut NoiseRng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, sample_laplace(scale, rng));
        }
    }
    m
}

/// Full pseudo-quantum pipeline on a tabular dataset, real-output mode.
pub fn pq_privatize(data: &Matrix, params: &PrivacyParams) -> Result<PrivatizedDataset> {
    params.validate(Mechanism::Pq)?;
    if params.delta > delta_real_max() {
        return Err(Error::DeltaOutOfRange(params.delta));
    }
    let mut rng = rng_from_seed(params.seed);
    let op = WaveletOperator::standard(data.rows())?;
    let mut t = op.forward(data)?;
    let bundle = angles_from_values(&t.approx)?;
    let raw_noise = laplace_matrix(
        t.approx.rows(),
        t.approx.cols(),
        2.0 / params.epsilon,
        &mut rng,
    );
    let noise_angles = angles_from_values(&raw_noise)?;
    let (theta_e, selectors) = pq_embed(
        &bundle,
        &noise_angles.theta,
        params.delta,
        params.eta,
        &mut rng,
    )?;
    t.approx = values_from_angles(&theta_e, bundle.mu1, bundle.v1)?;
    let mut noisy = op.inverse(&t)?;
    if let Some(col) = params.label_col {
        check_label_col(data, col)?;
        binarize_column(&mut noisy, col, params.label_threshold);
    }
    Ok(PrivatizedDataset {
        data: noisy,
        mechanism: Mechanism::Pq,
        params: params.clone(),
        trace: None,
        selectors: Some(selectors),
        block_rows: None,
    })
}

/// Complex-valued dataset produced by the imaging mode.
#[derive(Debug, Clone)]
pub struct ComplexImage {
    pub re: Matrix,
    pub im: Matrix,
}

impl ComplexImage {
    pub fn rows(&self) -> usize {
        self.re.rows()
    }

    pub fn cols(&self) -> usize {
        self.re.cols()
    }

    /// Componentwise modulus, rescaled linearly onto [0, 1].
    pub fn modulus_view(&self) -> Matrix {
        let mut m = Matrix::zeros(self.re.rows(), self.re.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m.set(i, j, self.re.get(i, j).hypot(self.im.get(i, j)));
            }
        }
        rescale_unit(&m)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.im.max_abs()
    }
}

/// Linear rescale onto [0, 1]; constant input maps to all zeros.
pub fn rescale_unit(m: &Matrix) -> Matrix {
    let (lo, hi) = m.min_max().unwrap_or((0.0, 0.0));
    if hi == lo {
        return Matrix::zeros(m.rows(), m.cols());
    }
    m.map(|v| (v - lo) / (hi - lo))
}

/// Pseudo-quantum embedding on a grayscale image, allowing delta beyond the
/// real-output bound. Out-of-domain inverse-trig arguments take the complex
/// principal branch.
pub fn pq_embed_image(img: &Matrix, params: &PrivacyParams) -> Result<(ComplexImage, Matrix)> {
    params.validate(Mechanism::Pq)?;
    if img.rows() % 3 != 0 || img.rows() < 6 {
        return Err(Error::InvalidSize(img.rows()));
    }
    let mut rng = rng_from_seed(params.seed);
    let op = WaveletOperator::standard(img.rows())?;
    let t = op.forward(img)?;
    let bundle = angles_from_values(&t.approx)?;
    let raw_noise = laplace_matrix(
        t.approx.rows(),
        t.approx.cols(),
        2.0 / params.epsilon,
        &mut rng,
    );
    let noise_angles = angles_from_values(&raw_noise)?;
    let selectors = uniform_matrix(t.approx.rows(), t.approx.cols(), &mut rng);

    let b = t.approx.rows();
    let n = t.approx.cols();
    let mut approx_re = Matrix::zeros(b, n);
    let mut approx_im = Matrix::zeros(b, n);
    let span = bundle.mu1 - bundle.v1;
    for i in 0..b {
        for j in 0..n {
            let theta = bundle.theta.get(i, j);
            let x = noise_angles.theta.get(i, j);
            let cosine = is_cosine_branch(selectors.get(i, j), params.eta);
            let arg = if cosine {
                theta.cos() + params.delta * x.cos()
            } else {
                theta.sin() + params.delta * x.sin()
            };
            let theta_e = if arg.abs() <= 1.0 {
                Complex64::new(if cosine { arg.acos() } else { arg.asin() }, 0.0)
            } else {
                let z = Complex64::new(arg, 0.0);
                if cosine {
                    z.acos()
                } else {
                    z.asin()
                }
            };
            let a_star = theta_e * 6.0 * span / PI - bundle.mu1 + 2.0 * bundle.v1;
            approx_re.set(i, j, a_star.re);
            approx_im.set(i, j, a_star.im);
        }
    }

    // the inverse transform is linear, so real and imaginary parts invert
    // independently
    let mut t_re = t.clone();
    t_re.approx = approx_re;
    let re = op.inverse(&t_re)?;
    let t_im = crate::wavelet::TransformedData {
        approx: approx_im,
        detail1: Matrix::zeros(b, n),
        detail2: Matrix::zeros(b, n),
    };
    let im = op.inverse(&t_im)?;
    Ok((ComplexImage { re, im }, selectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::rng_from_seed;
    use rand::{Rng, SeedableRng};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = NoiseRng::seed_from_u64(seed);
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.gen_range(-5.0..5.0));
            }
        }
        m
    }

    #[test]
    fn angle_map_endpoints_and_midpoint() {
        let v = Matrix::from_vec(1, 3, vec![2.0, 5.0, 8.0]).unwrap();
        let b = angles_from_values(&v).unwrap();
        assert!((b.theta.get(0, 0) - PI / 6.0).abs() < 1e-15);
        assert!((b.theta.get(0, 1) - PI / 4.0).abs() < 1e-15);
        assert!((b.theta.get(0, 2) - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn angle_map_roundtrip_exact() {
        let v = random_matrix(4, 5, 9);
        let b = angles_from_values(&v).unwrap();
        let back = values_from_angles(&b.theta, b.mu1, b.v1).unwrap();
        for (a, x) in v.data().iter().zip(back.data()) {
            assert!((a - x).abs() < 1e-12);
        }
    }

    #[test]
    fn values_from_angles_endpoints() {
        let t = Matrix::from_vec(1, 2, vec![PI / 3.0, PI / 6.0]).unwrap();
        let v = values_from_angles(&t, 8.0, 2.0).unwrap();
        assert!((v.get(0, 0) - 8.0).abs() < 1e-12);
        assert!((v.get(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_embedding_is_identity() {
        let v = random_matrix(3, 4, 1);
        let b = angles_from_values(&v).unwrap();
        let x = angles_from_values(&random_matrix(3, 4, 2)).unwrap();
        let mut rng = rng_from_seed(0);
        let (te, _) = pq_embed(&b, &x.theta, 0.0, 0.0, &mut rng).unwrap();
        for (a, c) in b.theta.data().iter().zip(te.data()) {
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn eta_one_forces_sine_branch() {
        assert!(!is_cosine_branch(0.9999, 1.0));
        assert!(is_cosine_branch(0.5, 0.0));
        assert!(!is_cosine_branch(0.4999, 0.0));
    }

    #[test]
    fn embed_extract_roundtrip() {
        let v = random_matrix(6, 4, 3);
        let b = angles_from_values(&v).unwrap();
        let x = angles_from_values(&random_matrix(6, 4, 4)).unwrap();
        let mut rng = rng_from_seed(5);
        let (te, sel) = pq_embed(&b, &x.theta, 0.1, 0.0, &mut rng).unwrap();
        let rec = pq_extract(&te, &b.theta, &sel, 0.1, 0.0).unwrap();
        for (a, c) in x.theta.data().iter().zip(rec.data()) {
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn extract_rejects_zero_delta() {
        let m = Matrix::zeros(2, 2);
        assert!(matches!(
            pq_extract(&m, &m, &m, 0.0, 0.0),
            Err(Error::ZeroDelta)
        ));
    }

    #[test]
    fn flipped_selector_is_detectable() {
        let v = random_matrix(3, 3, 6);
        let b = angles_from_values(&v).unwrap();
        let x = angles_from_values(&random_matrix(3, 3, 7)).unwrap();
        let mut rng = rng_from_seed(8);
        let (te, sel) = pq_embed(&b, &x.theta, 0.1, 0.0, &mut rng).unwrap();
        let mut flipped = sel.clone();
        flipped.set(1, 1, 1.0 - sel.get(1, 1));
        match pq_extract(&te, &b.theta, &flipped, 0.1, 0.0) {
            Err(Error::ArgumentOutOfDomain(_)) => {}
            Ok(rec) => {
                // wrong value on the flipped entry
                let truth = x.theta.get(1, 1);
                assert!((rec.get(1, 1) - truth).abs() > 1e-6);
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn pq_zero_delta_is_identity_pipeline() {
        let d = random_matrix(9, 3, 10);
        let mut p = PrivacyParams::new(1.0, 4);
        p.delta = 0.0;
        let out = pq_privatize(&d, &p).unwrap();
        let scale = d.max_abs();
        for (a, b) in d.data().iter().zip(out.data.data()) {
            assert!((a - b).abs() < 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn pq_preserves_detail_blocks() {
        let d = random_matrix(27, 5, 11);
        let mut p = PrivacyParams::new(1.0, 6);
        p.delta = 0.1;
        let out = pq_privatize(&d, &p).unwrap();
        let op = WaveletOperator::standard(27).unwrap();
        let t0 = op.forward(&d).unwrap();
        let t1 = op.forward(&out.data).unwrap();
        for (a, b) in t0.detail1.data().iter().zip(t1.detail1.data()) {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in t0.detail2.data().iter().zip(t1.detail2.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn pq_deterministic_per_seed() {
        let d = random_matrix(9, 4, 12);
        let p = PrivacyParams::new(2.0, 31);
        let a = pq_privatize(&d, &p).unwrap();
        let b = pq_privatize(&d, &p).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.selectors.unwrap(), b.selectors.unwrap());
    }

    #[test]
    fn pq_rejects_large_delta_in_real_mode() {
        let d = random_matrix(9, 3, 13);
        let mut p = PrivacyParams::new(1.0, 0);
        p.delta = 0.16;
        assert!(matches!(
            pq_privatize(&d, &p),
            Err(Error::DeltaOutOfRange(_))
        ));
    }

    #[test]
    fn image_mode_small_delta_stays_real() {
        let img = rescale_unit(&random_matrix(9, 9, 14));
        let mut p = PrivacyParams::new(1.0, 15);
        p.delta = 0.1;
        let (z, _) = pq_embed_image(&img, &p).unwrap();
        assert_eq!(z.max_abs_imag(), 0.0);
    }

    #[test]
    fn image_mode_large_delta_goes_complex() {
        let mut seen_complex = false;
        for seed in 0..10 {
            let img = rescale_unit(&random_matrix(9, 9, 100 + seed));
            let mut p = PrivacyParams::new(1.0, seed);
            p.delta = 0.7;
            let (z, _) = pq_embed_image(&img, &p).unwrap();
            if z.max_abs_imag() > 0.0 {
                seen_complex = true;
            }
            assert_eq!(z.modulus_view().rows(), 9);
            assert_eq!(z.modulus_view().cols(), 9);
        }
        assert!(seen_complex);
    }
}
