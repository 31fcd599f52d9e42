//! Significance tests for a matrix of attributions (rows are observations,
//! columns are groups or features), testing whether the column means are
//! jointly zero.
//!
//! The main test adds a screening term `T0` to the standardized trace
//! statistic and calibrates the sum with a three-cumulant chi-square match.
//! Hotelling/Wald and the standardized pairwise U-statistic test are
//! included as baselines.

mod baselines;
mod joint;
mod moments;
mod report;

pub use baselines::{cq_test, cq_test_with_moments, wald_test, wald_test_with_moments};
pub use joint::{group_joint_test, GroupTest, JointMode};
pub use moments::{moments, SampleMoments, MIN_SAMPLE};
pub use report::{Degeneracy, Fallback, NullReference, TestKind, TestReport};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest fitted degrees of freedom handled by the chi-square reference;
/// beyond it the normal limit is used.
pub const MAX_CHI2_DF: f64 = 1e10;

/// Trace statistic centered to have mean zero under the null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T1Statistic {
    /// `|mean|^2 - tr(Sigma_hat) / S`.
    pub raw: f64,
    /// Estimated variance of `raw` under the null.
    pub k2_hat: f64,
    /// `raw / sqrt(k2_hat)`.
    pub normalized: f64,
}

pub fn t1_statistic(m: &SampleMoments) -> Result<T1Statistic> {
    let s = m.s as f64;
    let raw = m.mean_norm_sq() - m.tr1 / s;
    let k2_hat = estimated_k2(m);
    if !(k2_hat > 0.0 && k2_hat.is_finite()) {
        return Err(Error::DegenerateVariance);
    }
    Ok(T1Statistic {
        raw,
        k2_hat,
        normalized: raw / k2_hat.sqrt(),
    })
}

fn estimated_k2(m: &SampleMoments) -> f64 {
    let s = m.s as f64;
    2.0 * m.tr2_hat / (s * (s - 1.0))
}

fn estimated_k3(m: &SampleMoments) -> f64 {
    let s = m.s as f64;
    8.0 * (s - 2.0) * m.tr3_hat / (s * s * (s - 1.0).powi(2))
}

/// Parameters of `R = beta0 + beta1 * chi2_d` matched to the first three
/// cumulants (0, k2, k3) of the centered trace statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSqApprox {
    pub beta0: f64,
    pub beta1: f64,
    pub d: f64,
    pub k2_hat: f64,
    pub k3_hat: f64,
}

impl ChiSqApprox {
    pub fn from_cumulants(k2: f64, k3: f64) -> Result<Self> {
        if !(k2 > 0.0 && k2.is_finite()) {
            return Err(Error::DegenerateVariance);
        }
        if k3 == 0.0 || !k3.is_finite() {
            return Err(Error::SkewlessFallback);
        }
        Ok(ChiSqApprox {
            beta0: -2.0 * k2 * k2 / k3,
            beta1: k3 / (4.0 * k2),
            d: 8.0 * k2.powi(3) / (k3 * k3),
            k2_hat: k2,
            k3_hat: k3,
        })
    }

    /// First three cumulants of `beta0 + beta1 * chi2_d`.
    pub fn cumulants(&self) -> [f64; 3] {
        [
            self.beta0 + self.beta1 * self.d,
            2.0 * self.beta1 * self.beta1 * self.d,
            8.0 * self.beta1.powi(3) * self.d,
        ]
    }

    /// Reference law of the standardized statistic `raw / sqrt(k2)`.
    pub fn reference(&self) -> NullReference {
        if self.d.is_finite() && self.d <= MAX_CHI2_DF {
            NullReference::ChiSquare {
                d: self.d,
                upper_skew: self.k3_hat > 0.0,
            }
        } else {
            NullReference::Normal
        }
    }
}

pub fn chi_sq_approx(m: &SampleMoments) -> Result<ChiSqApprox> {
    ChiSqApprox::from_cumulants(estimated_k2(m), estimated_k3(m))
}

/// Screening component: studentized squared means above `9 * delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerEnhancement {
    pub delta: f64,
    pub threshold: f64,
    pub t0: f64,
    /// Coordinates whose `h_i` cleared the threshold.
    pub selected: Vec<usize>,
    /// Coordinates with zero sample variance, left out of the screen.
    pub skipped: Vec<usize>,
}

/// `delta = (ln ln S)^2 ln K`.
pub fn screening_delta(s: usize, k: usize) -> f64 {
    let ll = (s as f64).ln().ln();
    ll * ll * (k as f64).ln()
}

pub fn t0_statistic(m: &SampleMoments) -> Result<PowerEnhancement> {
    if (m.s as f64) <= std::f64::consts::E {
        return Err(Error::SampleTooSmall {
            required: 3,
            actual: m.s,
        });
    }
    let delta = screening_delta(m.s, m.k);
    let threshold = 9.0 * delta;
    let s = m.s as f64;
    let mut t = 0.0;
    let mut selected = Vec::new();
    let mut skipped = Vec::new();
    for (i, (&mu, &var)) in m.mean.iter().zip(&m.cov_diag).enumerate() {
        if var <= 0.0 {
            skipped.push(i);
            continue;
        }
        let h = s * mu * mu / var;
        if h >= threshold {
            t += h;
            selected.push(i);
        }
    }
    Ok(PowerEnhancement {
        delta,
        threshold,
        t0: (m.k as f64).sqrt() * t,
        selected,
        skipped,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Power-enhanced trace test: `T0 + T1 / sqrt(k2_hat)` against the
/// cumulant-matched chi-square reference.
pub fn gs_test(phi: &DMatrix<f64>, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    gs_test_with_moments(&moments(phi)?, alpha)
}

pub fn gs_test_with_moments(m: &SampleMoments, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let t1 = match t1_statistic(m) {
        Ok(t) => t,
        Err(Error::DegenerateVariance) => {
            return Ok(TestReport::degenerate(TestKind::Gs, alpha, Degeneracy::DegenerateVariance))
        }
        Err(e) => return Err(e),
    };
    let t0 = t0_statistic(m)?;
    let (approx, reference, fallback) = match chi_sq_approx(m) {
        Ok(a) => {
            let r = a.reference();
            let fb = matches!(r, NullReference::Normal).then_some(Fallback::LargeDegreesOfFreedom);
            (Some(a), r, fb)
        }
        Err(Error::SkewlessFallback) => (None, NullReference::Normal, Some(Fallback::Skewless)),
        Err(e) => return Err(e),
    };
    let statistic = t0.t0 + t1.normalized;
    let critical_value = reference.critical_value(alpha);
    Ok(TestReport {
        test: TestKind::Gs,
        statistic: Some(statistic),
        t0: Some(t0.t0),
        t1_normalized: Some(t1.normalized),
        approx,
        reference: Some(reference),
        critical_value: Some(critical_value),
        p_value: Some(reference.p_value(statistic)),
        alpha,
        reject: statistic >= critical_value,
        hotelling_t2: None,
        degenerate: None,
        fallback,
    })
}

/// Runs the requested tests on one matrix, sharing the moment computation.
pub fn run_tests(phi: &DMatrix<f64>, alpha: f64, tests: &[TestKind]) -> Result<Vec<TestReport>> {
    check_alpha(alpha)?;
    let m = moments(phi)?;
    tests
        .iter()
        .map(|t| match t {
            TestKind::Gs => gs_test_with_moments(&m, alpha),
            TestKind::Wald => wald_test_with_moments(&m, alpha),
            TestKind::Cq => cq_test_with_moments(phi, &m, alpha),
        })
        .collect()
}
