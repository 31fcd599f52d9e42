use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::shapley::ShapMatrix;

/// Lorenz curve of normalized mean absolute attributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Lorenz {
    /// `(j / K, cumulative share of the j smallest)` for `j = 0..=K`.
    pub points: Vec<(f64, f64)>,
    pub gini: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub lorenz: Lorenz,
    /// Determinant of the column correlation matrix; absent when there are
    /// more columns than observations.
    pub corr_det: Option<f64>,
}

/// Sorts ascending, normalizes to unit sum and accumulates. The Gini index
/// is one minus twice the trapezoid area under the curve.
pub fn lorenz_gini(values: &[f64]) -> Result<Lorenz> {
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidData("concentration input must be finite and nonnegative".into()));
    }
    let total: f64 = values.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateConcentration);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len() as f64;
    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push((0.0, 0.0));
    let mut cum = 0.0;
    for (j, v) in sorted.iter().enumerate() {
        cum += v;
        points.push(((j + 1) as f64 / k, cum / total));
    }
    // cumulative rounding can leave the last share a hair off 1
    if let Some(last) = points.last_mut() {
        last.1 = 1.0;
    }
    let area: f64 = points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum();
    let gini = (1.0 - 2.0 * area).max(0.0);
    Ok(Lorenz { points, gini })
}

/// Determinant of the Pearson correlation matrix of the columns.
pub fn corr_determinant(values: &DMatrix<f64>, names: &[String]) -> Result<f64> {
    let (s, k) = values.shape();
    if names.len() != k {
        return Err(Error::Shape {
            expected: k,
            actual: names.len(),
            row: None,
        });
    }
    if k > s {
        return Err(Error::InvalidParameter(format!(
            "correlation determinant needs at most as many columns ({k}) as rows ({s})"
        )));
    }
    let mut z = values.clone();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::ZeroVarianceColumn(names[j].clone()));
        }
        col /= norm;
    }
    let corr = z.tr_mul(&z);
    Ok(corr.lu().determinant())
}

pub fn concentration(shap: &ShapMatrix) -> Result<ConcentrationReport> {
    let lorenz = lorenz_gini(&shap.mean_abs())?;
    let values = shap.values();
    let corr_det = if values.ncols() <= values.nrows() {
        Some(corr_determinant(values, shap.names())?)
    } else {
        None
    };
    Ok(ConcentrationReport { lorenz, corr_det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("c{j}")).collect()
    }

    #[test]
    fn equality_is_zero() {
        let l = lorenz_gini(&[2.0; 7]).unwrap();
        assert!(l.gini.abs() < 1e-12);
        for &(x, y) in &l.points {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_of_three() {
        let l = lorenz_gini(&[0.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(l.gini, 2.0 / 3.0, max_relative = 1e-14);
        assert_eq!(l.points.len(), 4);
    }

    #[test]
    fn single_entry() {
        assert_eq!(lorenz_gini(&[3.5]).unwrap().gini, 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(lorenz_gini(&[0.0, 0.0]), Err(Error::DegenerateConcentration)));
        assert!(lorenz_gini(&[1.0, -1.0]).is_err());
        let m = DMatrix::from_fn(5, 2, |i, j| if j == 1 { 3.0 } else { i as f64 });
        match corr_determinant(&m, &names(2)) {
            Err(Error::ZeroVarianceColumn(name)) => assert_eq!(name, "c1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orthogonal_and_duplicated_columns() {
        let m = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        assert_relative_eq!(corr_determinant(&m, &names(2)).unwrap(), 1.0, epsilon = 1e-12);
        let d = DMatrix::from_fn(6, 3, |i, j| if j == 2 { i as f64 } else { (i * (j + 2)) as f64 % 5.0 });
        let mut dup = d.clone();
        dup.set_column(1, &d.column(2));
        assert!(corr_determinant(&dup, &names(3)).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn grouping_correlated_columns_raises_determinant() {
        // Two independent factors, each loaded by a triplet of features.
        let s = 200;
        let f = |i: usize, t: usize| (((i * (7 + 5 * t) + 3 * t) % 23) as f64 - 11.0) / 11.0;
        let e = |i: usize, j: usize| (((i * (13 + 2 * j) + 17 * j) % 29) as f64 - 14.0) / 40.0;
        let x = DMatrix::from_fn(s, 6, |i, j| f(i, j / 3) + e(i, j));
        let grouped = DMatrix::from_fn(s, 2, |i, g| (0..3).map(|m| x[(i, 3 * g + m)]).sum());
        let individual = corr_determinant(&x, &names(6)).unwrap();
        let group = corr_determinant(&grouped, &names(2)).unwrap();
        assert!(individual > 0.0 && group <= 1.0 + 1e-12);
        assert!(group > individual, "{group} vs {individual}");
    }
}
