//! Synthetic attribution samples from the compound-symmetric factor model
//! `phi_s = mu + Sigma^{1/2} z_s`, and synthetic regression data with a
//! known set of influential feature groups.

mod config;
mod regression;

pub use config::{parse_key_values, KeyValues};
pub use regression::{synth_regression, SynthData};

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, StudentT};

use crate::error::{Error, Result};

/// Distribution of the standardized innovations `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZModel {
    Normal,
    /// `t_4 / sqrt(2)`.
    Symmetric,
    /// `(chi2_1 - 1) / sqrt(2)`.
    Skewed,
}

impl ZModel {
    pub const ALL: [ZModel; 3] = [ZModel::Normal, ZModel::Symmetric, ZModel::Skewed];

    pub fn name(self) -> &'static str {
        match self {
            ZModel::Normal => "normal",
            ZModel::Symmetric => "symmetric",
            ZModel::Skewed => "skewed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(ZModel::Normal),
            "symmetric" => Ok(ZModel::Symmetric),
            "skewed" => Ok(ZModel::Skewed),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }

    fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for ZModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alternative {
    Null,
    /// First `ceil(K/S)` means equal 0.5.
    Sparse,
    /// First `ceil(sqrt K)` means equal `sqrt(ln K / S)`.
    Dense,
}

impl Alternative {
    pub fn name(self) -> &'static str {
        match self {
            Alternative::Null => "null",
            Alternative::Sparse => "sparse",
            Alternative::Dense => "dense",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "null" => Ok(Alternative::Null),
            "sparse" => Ok(Alternative::Sparse),
            "dense" => Ok(Alternative::Dense),
            other => Err(Error::InvalidParameter(format!("unknown alternative '{other}'"))),
        }
    }

    fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One simulation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub model: ZModel,
    pub k: usize,
    pub s: usize,
    pub rho: f64,
    pub sigma2: f64,
    pub alternative: Alternative,
    pub replications: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        SimSpec {
            model: ZModel::Normal,
            k: 20,
            s: 50,
            rho: 0.5,
            sigma2: 4.0,
            alternative: Alternative::Null,
            replications: 2000,
            seed: 0,
            alpha: 0.05,
        }
    }
}

/// Stream role tags mixed into the per-replication stream id.
pub mod role {
    pub const INNOVATIONS: u64 = 0;
    pub const REGRESSION: u64 = 1;
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.s == 0 {
            return Err(Error::InvalidParameter("K and S must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidCorrelation(self.rho));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    /// Stable 64-bit identifier of the cell (everything except the
    /// replication count, seed and alpha).
    pub fn cell_key(&self) -> u64 {
        let mut h = Fnv::new();
        h.write(&[self.model.code(), self.alternative.code()]);
        h.write(&(self.k as u64).to_le_bytes());
        h.write(&(self.s as u64).to_le_bytes());
        h.write(&self.rho.to_bits().to_le_bytes());
        h.write(&self.sigma2.to_bits().to_le_bytes());
        h.finish()
    }

    /// Independent generator for replication `rep` and stream `role`.
    pub fn rng(&self, rep: u64, role: u64) -> ChaCha8Rng {
        stream_rng(self.seed, self.cell_key(), rep, role)
    }

    pub fn label(&self) -> String {
        format!(
            "{} K={} S={} rho={} {}",
            self.model, self.k, self.s, self.rho, self.alternative
        )
    }
}

/// ChaCha keyed by `(seed, key)` with stream `rep << 8 | role`, so every
/// replication draws from its own non-overlapping stream.
pub fn stream_rng(seed: u64, key: u64, rep: u64, role: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&key.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(bytes);
    rng.set_stream((rep << 8) | (role & 0xff));
    rng
}

/// 64-bit FNV-1a; only used to derive stable cell keys.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// S x K matrix of i.i.d. standardized innovations.
pub fn draw_z<R: Rng + ?Sized>(model: ZModel, s: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut z = DMatrix::zeros(s, k);
    match model {
        ZModel::Normal => {
            for i in 0..s {
                for j in 0..k {
                    z[(i, j)] = rng.sample(StandardNormal);
                }
            }
        }
        ZModel::Symmetric => {
            let t4 = StudentT::new(4.0).expect("valid degrees of freedom");
            for i in 0..s {
                for j in 0..k {
                    z[(i, j)] = rng.sample(t4) * scale;
                }
            }
        }
        ZModel::Skewed => {
            for i in 0..s {
                for j in 0..k {
                    let n: f64 = rng.sample(StandardNormal);
                    z[(i, j)] = (n * n - 1.0) * scale;
                }
            }
        }
    }
    z
}

/// Symmetric root `a I + b J` of `sigma2 [(1 - rho) I + rho J]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovRoot {
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

pub fn covariance_root(k: usize, rho: f64, sigma2: f64) -> Result<CovRoot> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidCorrelation(rho));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    // Eigenvalues sigma2 (1 - rho) on the complement of the ones vector and
    // sigma2 (1 - rho + rho K) along it.
    let kf = k as f64;
    let a = (sigma2 * (1.0 - rho)).sqrt();
    let b = ((sigma2 * (1.0 - rho + rho * kf)).sqrt() - a) / kf;
    Ok(CovRoot { k, a, b })
}

impl CovRoot {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.k, |i, j| if i == j { self.a + self.b } else { self.b })
    }

    /// Replaces each row `z` by `z (a I + b J)`.
    pub fn apply(&self, z: &mut DMatrix<f64>) {
        assert_eq!(z.ncols(), self.k, "dimension mismatch");
        let sums = z.column_sum();
        for mut col in z.column_iter_mut() {
            for (v, &rs) in col.iter_mut().zip(sums.iter()) {
                *v = self.a * *v + self.b * rs;
            }
        }
    }
}

pub fn compound_symmetry(k: usize, rho: f64, sigma2: f64) -> DMatrix<f64> {
    DMatrix::from_fn(k, k, |i, j| if i == j { sigma2 } else { sigma2 * rho })
}

pub fn alternative_mu(kind: Alternative, k: usize, s: usize) -> DVector<f64> {
    let mut mu = DVector::zeros(k);
    match kind {
        Alternative::Null => {}
        Alternative::Sparse => {
            let n = k.div_ceil(s).min(k);
            mu.rows_mut(0, n).fill(0.5);
        }
        Alternative::Dense => {
            let n = ((k as f64).sqrt().ceil() as usize).min(k);
            mu.rows_mut(0, n).fill(((k as f64).ln() / s as f64).sqrt());
        }
    }
    mu
}

#[derive(Debug, Clone)]
pub struct FactorSample {
    pub phi: DMatrix<f64>,
    pub mu: DVector<f64>,
    pub spec: SimSpec,
}

/// Replication `rep` of `spec`; a pure function of `(spec, rep)`.
pub fn generate(spec: &SimSpec, rep: u64) -> Result<FactorSample> {
    spec.validate()?;
    let root = covariance_root(spec.k, spec.rho, spec.sigma2)?;
    let mu = alternative_mu(spec.alternative, spec.k, spec.s);
    Ok(generate_with(spec, &root, &mu, rep))
}

pub(crate) fn generate_with(spec: &SimSpec, root: &CovRoot, mu: &DVector<f64>, rep: u64) -> FactorSample {
    let mut rng = spec.rng(rep, role::INNOVATIONS);
    let mut phi = draw_z(spec.model, spec.s, spec.k, &mut rng);
    root.apply(&mut phi);
    for (mut col, &m) in phi.column_iter_mut().zip(mu.iter()) {
        if m != 0.0 {
            col.add_scalar_mut(m);
        }
    }
    FactorSample {
        phi,
        mu: mu.clone(),
        spec: *spec,
    }
}

impl FactorSample {
    /// Writes `phi` with header `phi_1..phi_K`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let header: Vec<String> = (1..=self.phi.ncols()).map(|j| format!("phi_{j}")).collect();
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for row in self.phi.row_iter() {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
