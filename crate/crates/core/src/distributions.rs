//! Reference distributions for the tests: chi-square with fractional
//! degrees of freedom, the standard normal, and Snedecor's F.
//!
//! CDFs come from the regularized incomplete gamma and beta functions.
//! Quantiles are solved by bracketed bisection on the CDF, which is slow
//! compared with a tuned inverse but is accurate to a few ulps for every
//! degrees-of-freedom value the tests produce.

use statrs::function::{beta, erf, gamma};

const BISECTION_ITERS: usize = 400;

/// `Pr(chi2_d >= x)`.
pub fn chi2_sf(x: f64, d: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma::gamma_ur(0.5 * d, 0.5 * x)
    }
}

/// `Pr(chi2_d <= x)`.
pub fn chi2_cdf(x: f64, d: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma::gamma_lr(0.5 * d, 0.5 * x)
    }
}

/// Upper `alpha` point of `chi2_d`: the `x` with `Pr(chi2_d >= x) = alpha`.
pub fn chi2_upper_quantile(alpha: f64, d: f64) -> f64 {
    // sf is decreasing in x; use whichever tail is smaller for precision.
    if alpha <= 0.5 {
        invert_decreasing(|x| chi2_sf(x, d), alpha, d)
    } else {
        invert_increasing(|x| chi2_cdf(x, d), 1.0 - alpha, d)
    }
}

/// Lower `alpha` point of `chi2_d`: the `x` with `Pr(chi2_d <= x) = alpha`.
pub fn chi2_lower_quantile(alpha: f64, d: f64) -> f64 {
    if alpha <= 0.5 {
        invert_increasing(|x| chi2_cdf(x, d), alpha, d)
    } else {
        invert_decreasing(|x| chi2_sf(x, d), 1.0 - alpha, d)
    }
}

/// `Pr(Z >= z)` for a standard normal `Z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erf::erfc(z / std::f64::consts::SQRT_2)
}

/// Upper `alpha` point of the standard normal.
pub fn normal_upper_quantile(alpha: f64) -> f64 {
    std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * alpha)
}

/// `Pr(F_{d1,d2} >= x)`.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        beta::beta_reg(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x))
    }
}

/// Upper `alpha` point of `F_{d1,d2}`.
pub fn f_upper_quantile(alpha: f64, d1: f64, d2: f64) -> f64 {
    invert_decreasing(|x| f_sf(x, d1, d2), alpha, 1.0)
}

/// Solves `f(x) = target` for a decreasing `f` on `[0, inf)`.
fn invert_decreasing(f: impl Fn(f64) -> f64, target: f64, scale: f64) -> f64 {
    let (mut lo, mut hi) = bracket(|x| f(x) <= target, scale);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `f(x) = target` for an increasing `f` on `[0, inf)`.
fn invert_increasing(f: impl Fn(f64) -> f64, target: f64, scale: f64) -> f64 {
    let (mut lo, mut hi) = bracket(|x| f(x) >= target, scale);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Returns `(lo, hi)` with `past(hi)` true, growing `hi` geometrically.
fn bracket(past: impl Fn(f64) -> bool, scale: f64) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = scale.max(1.0);
    while !past(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return (lo, f64::MAX);
        }
    }
    (lo, hi)
}
