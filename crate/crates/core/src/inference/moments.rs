use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sample mean and covariance of an S x K matrix, plus the unbiased
/// estimates of `tr(Sigma^2)` and `tr(Sigma^3)` the cumulant estimates need.
#[derive(Debug, Clone)]
pub struct SampleMoments {
    pub s: usize,
    pub k: usize,
    pub mean: DVector<f64>,
    /// Diagonal of the sample covariance (divisor `S - 1`).
    pub cov_diag: Vec<f64>,
    /// `tr(Sigma_hat)`.
    pub tr1: f64,
    /// `tr(Sigma_hat^2)`.
    pub tr_sq: f64,
    /// `tr(Sigma_hat^3)`.
    pub tr_cube: f64,
    /// Unbiased estimate of `tr(Sigma^2)`.
    pub tr2_hat: f64,
    /// Unbiased estimate of `tr(Sigma^3)`.
    pub tr3_hat: f64,
    centered: DMatrix<f64>,
    cov: Option<DMatrix<f64>>,
}

/// Smallest sample size for which every estimator is defined.
pub const MIN_SAMPLE: usize = 4;

pub fn moments(phi: &DMatrix<f64>) -> Result<SampleMoments> {
    let (s, k) = phi.shape();
    if s < MIN_SAMPLE {
        return Err(Error::SampleTooSmall {
            required: MIN_SAMPLE,
            actual: s,
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("matrix has no columns".into()));
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("matrix contains non-finite values".into()));
    }

    let sf = s as f64;
    let mean = phi.row_mean().transpose();
    let mut centered = phi.clone();
    for (mut col, m) in centered.column_iter_mut().zip(mean.iter()) {
        col.add_scalar_mut(-m);
    }
    let cov_diag: Vec<f64> = centered.column_iter().map(|c| c.norm_squared() / (sf - 1.0)).collect();

    // Y'Y and Y Y' share their nonzero spectrum, so the traces come from
    // whichever Gram matrix is smaller: tr(A^2) = |A|_F^2, tr(A^3) = <A^2, A>.
    let denom = sf - 1.0;
    let gram = if k <= s {
        centered.tr_mul(&centered)
    } else {
        &centered * centered.transpose()
    };
    let gram_sq = &gram * &gram;
    let tr_sq = gram.norm_squared() / denom.powi(2);
    let tr_cube = gram_sq.dot(&gram) / denom.powi(3);
    let cov = (k <= s).then(|| gram / denom);
    let tr1 = cov_diag.iter().sum::<f64>();

    let tr2_hat = denom.powi(2) / ((sf - 2.0) * (sf + 1.0)) * (tr_sq - tr1 * tr1 / denom);
    let tr3_hat = denom.powi(4) / ((sf * sf + sf - 6.0) * (sf * sf - 2.0 * sf - 3.0))
        * (tr_cube - 3.0 * tr1 * tr_sq / denom + 2.0 * tr1.powi(3) / denom.powi(2));

    Ok(SampleMoments {
        s,
        k,
        mean,
        cov_diag,
        tr1,
        tr_sq,
        tr_cube,
        tr2_hat,
        tr3_hat,
        centered,
        cov,
    })
}

impl SampleMoments {
    /// Full K x K sample covariance.
    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.cov {
            Some(c) => c.clone(),
            None => self.centered.tr_mul(&self.centered) / (self.s as f64 - 1.0),
        }
    }

    pub(crate) fn cov_ref(&self) -> Option<&DMatrix<f64>> {
        self.cov.as_ref()
    }

    pub fn mean_norm_sq(&self) -> f64 {
        self.mean.norm_squared()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn five_point_hand_example() {
        let phi = DMatrix::from_column_slice(5, 1, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let m = moments(&phi).unwrap();
        assert_relative_eq!(m.tr1, 2.5, max_relative = 1e-15);
        // (16/18)(6.25 - 6.25/4)
        assert_relative_eq!(m.tr2_hat, 16.0 / 18.0 * (6.25 - 6.25 / 4.0), max_relative = 1e-14);
        assert_relative_eq!(m.tr2_hat, 4.166_666_666_666_667, max_relative = 1e-12);
        // (256/(24*12))(15.625 - 3*2.5*6.25/4 + 2*15.625/16)
        let expected = 256.0 / 288.0 * (15.625 - 3.0 * 2.5 * 6.25 / 4.0 + 2.0 * 15.625 / 16.0);
        assert_relative_eq!(m.tr3_hat, expected, max_relative = 1e-14);
        // bracket = 15.625 - 11.71875 + 1.953125 = 5.859375
        assert_relative_eq!(m.tr3_hat, 5.208_333_333_333_333, max_relative = 1e-12);
    }

    #[test]
    fn identical_rows_have_zero_spread() {
        let phi = DMatrix::from_fn(6, 3, |_, j| j as f64 + 0.5);
        let m = moments(&phi).unwrap();
        assert_eq!(m.tr1, 0.0);
        assert_eq!(m.tr2_hat, 0.0);
        assert_eq!(m.tr3_hat, 0.0);
    }

    #[test]
    fn both_gram_routes_agree() {
        // K > S takes the S x S route; the transpose problem takes K x K.
        let phi = DMatrix::from_fn(5, 9, |i, j| ((i * 7 + j * 3) % 11) as f64 - 0.3 * j as f64);
        let wide = moments(&phi).unwrap();
        let cov = wide.covariance();
        let direct_sq = (&cov * &cov).trace();
        let direct_cube = (&cov * &cov * &cov).trace();
        assert_relative_eq!(wide.tr_sq, direct_sq, max_relative = 1e-12);
        assert_relative_eq!(wide.tr_cube, direct_cube, max_relative = 1e-12);
        assert_relative_eq!(wide.tr1, cov.trace(), max_relative = 1e-12);

        let tall_phi = DMatrix::from_fn(12, 3, |i, j| ((i * 5 + j) % 7) as f64);
        let tall = moments(&tall_phi).unwrap();
        let cov = tall.covariance();
        assert_relative_eq!(tall.tr_cube, (&cov * &cov * &cov).trace(), max_relative = 1e-12);
    }

    #[test]
    fn too_small() {
        let phi = DMatrix::zeros(3, 2);
        assert!(matches!(moments(&phi), Err(Error::SampleTooSmall { required: 4, actual: 3 })));
    }
}
