use std::fmt;

use crate::distributions::{
    chi2_cdf, chi2_lower_quantile, chi2_sf, chi2_upper_quantile, f_sf, f_upper_quantile, normal_sf,
    normal_upper_quantile,
};
use crate::error::Error;

use super::ChiSqApprox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestKind {
    Wald,
    Cq,
    Gs,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::Wald, TestKind::Cq, TestKind::Gs];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Gs => "GS",
            TestKind::Wald => "Wald",
            TestKind::Cq => "CQ",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gs" => Some(TestKind::Gs),
            "wald" => Some(TestKind::Wald),
            "cq" => Some(TestKind::Cq),
            _ => None,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Null law used to calibrate a test statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullReference {
    /// `(chi2_d - d) / sqrt(2d)`, or its mirror image when the fitted
    /// third cumulant is negative.
    ChiSquare { d: f64, upper_skew: bool },
    Normal,
    /// Snedecor F on the Hotelling scale.
    F { d1: f64, d2: f64 },
}

impl NullReference {
    pub fn p_value(&self, t: f64) -> f64 {
        match *self {
            NullReference::ChiSquare { d, upper_skew } => {
                let spread = (2.0 * d).sqrt();
                if upper_skew {
                    chi2_sf(d + spread * t, d)
                } else {
                    chi2_cdf(d - spread * t, d)
                }
            }
            NullReference::Normal => normal_sf(t),
            NullReference::F { d1, d2 } => f_sf(t, d1, d2),
        }
    }

    pub fn critical_value(&self, alpha: f64) -> f64 {
        match *self {
            NullReference::ChiSquare { d, upper_skew } => {
                let spread = (2.0 * d).sqrt();
                if upper_skew {
                    (chi2_upper_quantile(alpha, d) - d) / spread
                } else {
                    (d - chi2_lower_quantile(alpha, d)) / spread
                }
            }
            NullReference::Normal => normal_upper_quantile(alpha),
            NullReference::F { d1, d2 } => f_upper_quantile(alpha, d1, d2),
        }
    }

    pub fn df_label(&self) -> String {
        match *self {
            NullReference::ChiSquare { d, .. } => format!("{d:.4}"),
            NullReference::Normal => "inf".into(),
            NullReference::F { d1, d2 } => format!("{d1},{d2}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    SingularCovariance,
    DegenerateVariance,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degeneracy::SingularCovariance => "singular covariance",
            Degeneracy::DegenerateVariance => "degenerate variance",
        })
    }
}

/// Why the chi-square reference was replaced by the normal limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Skewless,
    LargeDegreesOfFreedom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub test: TestKind,
    pub statistic: Option<f64>,
    pub t0: Option<f64>,
    pub t1_normalized: Option<f64>,
    pub approx: Option<ChiSqApprox>,
    pub reference: Option<NullReference>,
    pub critical_value: Option<f64>,
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub reject: bool,
    /// Hotelling `S * mean' Sigma_hat^{-1} mean` (Wald only).
    pub hotelling_t2: Option<f64>,
    pub degenerate: Option<Degeneracy>,
    pub fallback: Option<Fallback>,
}

impl TestReport {
    pub fn degenerate(test: TestKind, alpha: f64, why: Degeneracy) -> Self {
        TestReport {
            test,
            statistic: None,
            t0: None,
            t1_normalized: None,
            approx: None,
            reference: None,
            critical_value: None,
            p_value: None,
            alpha,
            reject: false,
            hotelling_t2: None,
            degenerate: Some(why),
            fallback: None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.is_some()
    }

    /// Converts a degenerate report into the matching error.
    pub fn into_result(self, k: usize, s: usize) -> Result<Self, Error> {
        match self.degenerate {
            None => Ok(self),
            Some(Degeneracy::SingularCovariance) => Err(Error::SingularCovariance { k, s }),
            Some(Degeneracy::DegenerateVariance) => Err(Error::DegenerateVariance),
        }
    }

    /// Significance stars: `***` p < 0.01, `**` p < 0.05, `*` p < 0.1.
    pub fn stars(&self) -> &'static str {
        match self.p_value {
            Some(p) if p < 0.01 => "***",
            Some(p) if p < 0.05 => "**",
            Some(p) if p < 0.1 => "*",
            _ => "",
        }
    }

    pub fn df_label(&self) -> String {
        self.reference.map(|r| r.df_label()).unwrap_or_else(|| "NaN".into())
    }
}
