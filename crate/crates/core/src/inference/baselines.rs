use nalgebra::DMatrix;

use super::{check_alpha, moments, Degeneracy, NullReference, SampleMoments, TestKind, TestReport};
use crate::distributions::{f_sf, f_upper_quantile};
use crate::error::Result;

/// Cholesky pivots whose squared ratio exceeds this are treated as singular.
const MAX_CONDITION: f64 = 1e12;

/// Wald statistic `mean' Sigma_hat^{-1} mean / sqrt(S)`, decided through
/// the exact Hotelling calibration `T2 (S-K) / (K (S-1)) ~ F(K, S-K)` with
/// `T2 = S mean' Sigma_hat^{-1} mean`. The critical value is reported on
/// the scale of the statistic.
pub fn wald_test(phi: &DMatrix<f64>, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    wald_test_with_moments(&moments(phi)?, alpha)
}

pub fn wald_test_with_moments(m: &SampleMoments, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (k, s) = (m.k, m.s);
    let singular = || TestReport::degenerate(TestKind::Wald, alpha, Degeneracy::SingularCovariance);
    if k >= s {
        return Ok(singular());
    }
    let cov = match m.cov_ref() {
        Some(c) => c.clone(),
        None => m.covariance(),
    };
    let Some(chol) = cov.cholesky() else {
        return Ok(singular());
    };
    let l = chol.l_dirty();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..k {
        let d = l[(i, i)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo.is_nan() || lo <= 0.0 || (hi / lo).powi(2) > MAX_CONDITION {
        return Ok(singular());
    }

    let quad = m.mean.dot(&chol.solve(&m.mean));
    let (kf, sf) = (k as f64, s as f64);
    let statistic = quad / sf.sqrt();
    let t2 = sf * quad;
    let to_f = (sf - kf) / (kf * (sf - 1.0));
    let (d1, d2) = (kf, sf - kf);
    let crit_t2 = f_upper_quantile(alpha, d1, d2) / to_f;
    let critical_value = crit_t2 / (sf * sf.sqrt());
    Ok(TestReport {
        test: TestKind::Wald,
        statistic: Some(statistic),
        t0: None,
        t1_normalized: None,
        approx: None,
        reference: Some(NullReference::F { d1, d2 }),
        critical_value: Some(critical_value),
        p_value: Some(f_sf(t2 * to_f, d1, d2)),
        alpha,
        reject: statistic >= critical_value,
        hotelling_t2: Some(t2),
        degenerate: None,
        fallback: None,
    })
}

/// Standardized pairwise U-statistic
/// `U = sum_{i != j} phi_i' phi_j / (S (S-1))` over `sqrt(2 tr2_hat / (S (S-1)))`,
/// referred to the standard normal.
pub fn cq_test(phi: &DMatrix<f64>, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    cq_test_with_moments(phi, &moments(phi)?, alpha)
}

pub fn cq_test_with_moments(phi: &DMatrix<f64>, m: &SampleMoments, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let s = phi.nrows() as f64;
    let k2 = 2.0 * m.tr2_hat / (s * (s - 1.0));
    if !(k2 > 0.0 && k2.is_finite()) {
        return Ok(TestReport::degenerate(TestKind::Cq, alpha, Degeneracy::DegenerateVariance));
    }
    let statistic = pairwise_u(phi) / k2.sqrt();
    let reference = NullReference::Normal;
    let critical_value = reference.critical_value(alpha);
    Ok(TestReport {
        test: TestKind::Cq,
        statistic: Some(statistic),
        t0: None,
        t1_normalized: None,
        approx: None,
        reference: Some(reference),
        critical_value: Some(critical_value),
        p_value: Some(reference.p_value(statistic)),
        alpha,
        reject: statistic >= critical_value,
        hotelling_t2: None,
        degenerate: None,
        fallback: None,
    })
}

/// `sum_{i != j} phi_i' phi_j / (S (S-1))` via `|sum_i phi_i|^2 - sum_i |phi_i|^2`.
pub(crate) fn pairwise_u(phi: &DMatrix<f64>) -> f64 {
    let s = phi.nrows() as f64;
    let total = phi.row_sum();
    let own: f64 = phi.norm_squared();
    (total.norm_squared() - own) / (s * (s - 1.0))
}
