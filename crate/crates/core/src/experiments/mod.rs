//! Monte Carlo size and power studies over grids of simulation cells,
//! plus concentration summaries of attribution matrices.

mod concentration;
mod tables;

pub use concentration::{concentration, corr_determinant, lorenz_gini, ConcentrationReport, Lorenz};
pub use tables::{emit_tables, read_grid_csv, render_text, write_are_csv, write_grid_csv, TableKind};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::{run_tests, TestKind};
use crate::simgen::{alternative_mu, covariance_root, generate_with, Alternative, SimSpec, ZModel};

/// Replications per cell unless overridden.
pub const DEFAULT_REPLICATIONS: usize = 2000;
/// Replications used by the long-running reproduction profile.
pub const FULL_REPLICATIONS: usize = 10_000;

/// Rejection counts of one test in one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub model: ZModel,
    pub k: usize,
    pub s: usize,
    pub rho: f64,
    pub alternative: Alternative,
    pub test: TestKind,
    pub rejections: u64,
    pub replications: u64,
    /// Replications where the test could not be computed; never counted
    /// as rejections.
    pub degenerate: u64,
}

impl CellRecord {
    /// Fraction of replications rejected, absent when every replication
    /// was degenerate.
    pub fn rejection_rate(&self) -> Option<f64> {
        (self.degenerate < self.replications).then(|| self.rejections as f64 / self.replications as f64)
    }

    /// Binomial standard error `sqrt(p (1 - p) / reps)`.
    pub fn std_error(&self) -> Option<f64> {
        self.rejection_rate()
            .map(|p| (p * (1.0 - p) / self.replications as f64).sqrt())
    }

    fn same_cell(&self, other: &CellRecord) -> bool {
        self.model == other.model
            && self.k == other.k
            && self.s == other.s
            && self.rho == other.rho
            && self.alternative == other.alternative
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub alpha: f64,
    pub records: Vec<CellRecord>,
}

/// ARE of one test at one correlation level.
#[derive(Debug, Clone, PartialEq)]
pub struct AreRow {
    pub test: TestKind,
    pub rho: f64,
    pub are: Option<f64>,
    pub cells_used: usize,
    pub cells_total: usize,
}

impl GridResult {
    pub fn find(&self, model: ZModel, k: usize, s: usize, rho: f64, alternative: Alternative, test: TestKind) -> Option<&CellRecord> {
        self.records.iter().find(|r| {
            r.model == model && r.k == k && r.s == s && r.rho == rho && r.alternative == alternative && r.test == test
        })
    }

    pub fn tests(&self) -> Vec<TestKind> {
        let mut t: Vec<TestKind> = self.records.iter().map(|r| r.test).collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn rhos(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.records.iter().map(|r| r.rho).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// ARE of `test` over all cells at `rho`, skipping degenerate cells.
    pub fn are(&self, test: TestKind, rho: f64) -> Result<f64> {
        let sizes: Vec<Option<f64>> = self
            .records
            .iter()
            .filter(|r| r.test == test && r.rho == rho)
            .map(CellRecord::rejection_rate)
            .collect();
        are_metric(&sizes, self.alpha)
    }

    pub fn are_table(&self) -> Vec<AreRow> {
        let mut rows = Vec::new();
        for rho in self.rhos() {
            for test in self.tests() {
                let cells: Vec<&CellRecord> =
                    self.records.iter().filter(|r| r.test == test && r.rho == rho).collect();
                let used = cells.iter().filter(|r| r.rejection_rate().is_some()).count();
                rows.push(AreRow {
                    test,
                    rho,
                    are: self.are(test, rho).ok(),
                    cells_used: used,
                    cells_total: cells.len(),
                });
            }
        }
        rows
    }

    /// Whether `record` is the best test of its cell: size closest to
    /// alpha for size tables, highest power otherwise. Ties are all best.
    pub fn is_best(&self, record: &CellRecord, kind: TableKind) -> bool {
        let Some(own) = record.rejection_rate() else {
            return false;
        };
        let score = |p: f64| match kind {
            TableKind::Size => -(p - self.alpha).abs(),
            TableKind::Power => p,
        };
        let best = self
            .records
            .iter()
            .filter(|r| r.same_cell(record))
            .filter_map(CellRecord::rejection_rate)
            .map(score)
            .fold(f64::NEG_INFINITY, f64::max);
        score(own) == best
    }
}

/// `100 * mean |a_hat - alpha| / alpha` over the available sizes.
pub fn are_metric(sizes: &[Option<f64>], alpha: f64) -> Result<f64> {
    let used: Vec<f64> = sizes.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::AreUnavailable);
    }
    Ok(100.0 * used.iter().map(|a| (a - alpha).abs()).sum::<f64>() / (used.len() as f64 * alpha))
}

#[derive(Clone, Copy, Default)]
struct Tally {
    rejections: u64,
    degenerate: u64,
}

/// Runs every replication of one cell. Replications are spread over the
/// rayon pool; counts are summed, so the result does not depend on the
/// number of workers.
pub fn run_cell(spec: &SimSpec, tests: &[TestKind]) -> Result<Vec<CellRecord>> {
    spec.validate()?;
    let root = covariance_root(spec.k, spec.rho, spec.sigma2)?;
    let mu = alternative_mu(spec.alternative, spec.k, spec.s);
    let n = tests.len();
    let tallies = (0..spec.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let sample = generate_with(spec, &root, &mu, rep);
            let mut out = vec![Tally::default(); n];
            match run_tests(&sample.phi, spec.alpha, tests) {
                Ok(reports) => {
                    for (t, r) in out.iter_mut().zip(reports) {
                        if r.is_degenerate() {
                            t.degenerate += 1;
                        } else if r.reject {
                            t.rejections += 1;
                        }
                    }
                }
                Err(_) => out.iter_mut().for_each(|t| t.degenerate += 1),
            }
            out
        })
        .reduce(
            || vec![Tally::default(); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.rejections += y.rejections;
                    x.degenerate += y.degenerate;
                }
                a
            },
        );
    Ok(tests
        .iter()
        .zip(tallies)
        .map(|(&test, t)| CellRecord {
            model: spec.model,
            k: spec.k,
            s: spec.s,
            rho: spec.rho,
            alternative: spec.alternative,
            test,
            rejections: t.rejections,
            replications: spec.replications as u64,
            degenerate: t.degenerate,
        })
        .collect())
}

fn run_grid(specs: &[SimSpec], tests: &[TestKind]) -> Result<GridResult> {
    let Some(first) = specs.first() else {
        return Err(Error::InvalidParameter("empty simulation grid".into()));
    };
    if tests.is_empty() {
        return Err(Error::InvalidParameter("no tests requested".into()));
    }
    if specs.iter().any(|s| s.alpha != first.alpha) {
        return Err(Error::InvalidParameter("all cells must share one alpha".into()));
    }
    let mut records = Vec::with_capacity(specs.len() * tests.len());
    for spec in specs {
        records.extend(run_cell(spec, tests)?);
    }
    Ok(GridResult {
        alpha: first.alpha,
        records,
    })
}

/// Empirical sizes; every spec must be a null cell.
pub fn run_size_grid(specs: &[SimSpec], tests: &[TestKind]) -> Result<GridResult> {
    if let Some(bad) = specs.iter().find(|s| s.alternative != Alternative::Null) {
        return Err(Error::InvalidParameter(format!("size grid cell '{}' is not null", bad.label())));
    }
    run_grid(specs, tests)
}

/// Empirical power; every spec must be a sparse or dense alternative.
pub fn run_power_grid(specs: &[SimSpec], tests: &[TestKind]) -> Result<GridResult> {
    if let Some(bad) = specs.iter().find(|s| s.alternative == Alternative::Null) {
        return Err(Error::InvalidParameter(format!("power grid cell '{}' is a null cell", bad.label())));
    }
    run_grid(specs, tests)
}

/// Axes of a rectangular grid of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxes {
    pub models: Vec<ZModel>,
    pub ks: Vec<usize>,
    pub ss: Vec<usize>,
    pub rhos: Vec<f64>,
    pub alternatives: Vec<Alternative>,
    pub replications: usize,
    pub seed: u64,
    pub alpha: f64,
    pub sigma2: f64,
}

impl GridAxes {
    /// The published size design: three models, K in {20, 100, 500},
    /// S in {50, 300, 600}, rho in {0.2, 0.5, 0.8}.
    pub fn size_design(replications: usize, seed: u64) -> Self {
        GridAxes {
            models: ZModel::ALL.to_vec(),
            ks: vec![20, 100, 500],
            ss: vec![50, 300, 600],
            rhos: vec![0.2, 0.5, 0.8],
            alternatives: vec![Alternative::Null],
            replications,
            seed,
            alpha: 0.05,
            sigma2: 4.0,
        }
    }

    /// The published power design: as the size design at rho = 0.5 under
    /// both alternatives.
    pub fn power_design(replications: usize, seed: u64) -> Self {
        GridAxes {
            rhos: vec![0.5],
            alternatives: vec![Alternative::Sparse, Alternative::Dense],
            ..Self::size_design(replications, seed)
        }
    }

    /// Cells in table order: model, K, S, rho, alternative.
    pub fn specs(&self) -> Result<Vec<SimSpec>> {
        let mut out = Vec::new();
        for &model in &self.models {
            for &k in &self.ks {
                for &s in &self.ss {
                    for &rho in &self.rhos {
                        for &alternative in &self.alternatives {
                            let spec = SimSpec {
                                model,
                                k,
                                s,
                                rho,
                                sigma2: self.sigma2,
                                alternative,
                                replications: self.replications,
                                seed: self.seed,
                                alpha: self.alpha,
                            };
                            spec.validate()?;
                            out.push(spec);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
