//! Gaussian toy processes and the two Monte Carlo studies built on them.
//!
//! The convergence study scores `N(0, 1)` ensembles of growing size against
//! `x = 0` and compares each estimator with the closed-form value. The
//! sensitivity study draws observations from a bivariate Gaussian with
//! correlation `rho`, ensembles from one with correlation `varrho`, and
//! reports how far the mean CRPS-Sum and Energy Score move away from the
//! `varrho = rho` reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multivariate::energy_score_unchecked;
use crate::scoring::{crps_gaussian_analytic, CrpsEstimator, GaussianSpec1D, QuantileConfig, SamplePairing};

/// Relative tolerance for zero pivots when factoring a covariance matrix.
const PSD_TOL: f64 = 1e-12;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer, used to derive independent child seeds.
pub fn mix_seed(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a pair of indices.
pub fn derive_seed(seed: u64, a: usize, b: usize) -> u64 {
    seed ^ mix_seed(((a as u64) << 32) | b as u64)
}

/// Multivariate Gaussian with a precomputed square-root factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    mu: Vec<f64>,
    cov: Vec<Vec<f64>>,
    factor: Vec<Vec<f64>>,
}

impl GaussianSpec {
    pub fn new(mu: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::invalid("mu", "[]", "must have at least one dimension"));
        }
        if cov.len() != d || cov.iter().any(|r| r.len() != d) {
            return Err(Error::shape(format!("{d}x{d} covariance"), "ragged or mis-sized matrix"));
        }
        if mu.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gaussian spec"));
        }
        for i in 0..d {
            for j in 0..i {
                let scale = cov[i][j].abs().max(cov[j][i].abs()).max(1.0);
                if (cov[i][j] - cov[j][i]).abs() > PSD_TOL * scale {
                    return Err(Error::invalid(
                        "cov",
                        format!("[{i}][{j}]"),
                        "covariance must be symmetric",
                    ));
                }
            }
        }
        let factor = psd_cholesky(&cov)?;
        Ok(Self { mu, cov, factor })
    }

    /// Zero-mean, unit-variance bivariate Gaussian with correlation `rho`.
    pub fn bivariate(rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::invalid("rho", rho, "correlation must lie in [-1, 1]"));
        }
        Self::new(vec![0.0, 0.0], vec![vec![1.0, rho], vec![rho, 1.0]])
    }

    pub fn dims(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn cov(&self) -> &[Vec<f64>] {
        &self.cov
    }

    /// Writes one draw into `out` using `z` as scratch.
    fn draw_into(&self, rng: &mut impl Rng, z: &mut [f64], out: &mut [f64]) {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for (i, row) in self.factor.iter().enumerate() {
            let mut acc = 0.0;
            for (l, zk) in row[..=i].iter().zip(z.iter()) {
                acc += l * zk;
            }
            out[i] = self.mu[i] + acc;
        }
    }

    /// `n` draws, row-major `n x D`.
    pub fn sample_with(&self, rng: &mut impl Rng, n: usize) -> Vec<f64> {
        let d = self.dims();
        let mut z = vec![0.0; d];
        let mut out = vec![0.0; n * d];
        for row in out.chunks_exact_mut(d) {
            self.draw_into(rng, &mut z, row);
        }
        out
    }
}

/// Lower-triangular `L` with `L L^T = cov`, allowing zero pivots.
///
/// A zero pivot yields a zero column, so perfectly correlated coordinates
/// come out as exact linear copies of earlier ones.
fn psd_cholesky(cov: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = cov.len();
    let scale = (0..d).map(|i| cov[i][i].abs()).fold(1.0, f64::max);
    let tol = PSD_TOL * scale;
    let mut l = vec![vec![0.0; d]; d];
    for j in 0..d {
        let pivot = cov[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if pivot < -tol {
            return Err(Error::NotPositiveSemidefinite { row: j, pivot });
        }
        if pivot <= tol {
            for i in j + 1..d {
                let rest = cov[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                if rest.abs() > tol.sqrt() {
                    return Err(Error::NotPositiveSemidefinite { row: i, pivot: rest });
                }
            }
            continue;
        }
        let diag = pivot.sqrt();
        l[j][j] = diag;
        for i in j + 1..d {
            let rest = cov[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = rest / diag;
        }
    }
    Ok(l)
}

/// `n` draws from `spec`, deterministic in `seed`.
pub fn sample_gaussian(spec: &GaussianSpec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    spec.sample_with(&mut rng, n)
        .chunks_exact(spec.dims())
        .map(<[f64]>::to_vec)
        .collect()
}

/// `(score - reference) / reference`.
pub fn relative_change(score_mean: f64, reference_mean: f64) -> Result<f64> {
    if !score_mean.is_finite() {
        return Err(Error::NonFinite("score_mean"));
    }
    if !(reference_mean > 0.0 && reference_mean.is_finite()) {
        return Err(Error::invalid(
            "reference_mean",
            reference_mean,
            "reference score must be positive",
        ));
    }
    Ok((score_mean - reference_mean) / reference_mean)
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn std_dev(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }

    fn std_err(&self) -> f64 {
        self.std_dev() / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(Error::invalid("scale", other, "expected desk or paper")),
        }
    }
}

impl Scale {
    /// `(n_windows, window_size)` of the sensitivity study.
    pub fn sensitivity_size(self) -> (usize, usize) {
        match self {
            Scale::Desk => (1 << 12, 1 << 7),
            Scale::Paper => (1 << 14, 1 << 9),
        }
    }
}

/// Mean scores of one `(rho, varrho)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub crps_sum_mean: f64,
    pub es_mean: f64,
    pub stderr_crps_sum: f64,
    pub stderr_es: f64,
}

/// Runs `n_windows` experiments: one observation from the `rho` process and a
/// `window_size` ensemble from the `varrho` process, scored by CRPS-Sum
/// (quantile estimator) and the Energy Score with `beta = 1`.
pub fn run_sensitivity_cell(
    rho: f64,
    varrho: f64,
    n_windows: usize,
    window_size: usize,
    seed: u64,
) -> Result<CellEstimate> {
    sensitivity_cell(rho, varrho, n_windows, window_size, seed, QuantileConfig::default())
}

fn sensitivity_cell(
    rho: f64,
    varrho: f64,
    n_windows: usize,
    window_size: usize,
    seed: u64,
    quantiles: QuantileConfig,
) -> Result<CellEstimate> {
    if n_windows == 0 {
        return Err(Error::invalid("n_windows", 0, "must be at least 1"));
    }
    if window_size < 2 {
        return Err(Error::invalid("window_size", window_size, "must be at least 2"));
    }
    let data = GaussianSpec::bivariate(rho)?;
    let model = GaussianSpec::bivariate(varrho)?;
    let estimator = CrpsEstimator::Quantile {
        n_quantiles: quantiles,
    };
    let mut rng = rng_from_seed(seed);
    let mut z = [0.0; 2];
    let mut obs = [0.0; 2];
    let mut ensemble = vec![0.0; window_size * 2];
    let mut summed = vec![0.0; window_size];
    let mut crps_sum = Welford::default();
    let mut es = Welford::default();
    for _ in 0..n_windows {
        data.draw_into(&mut rng, &mut z, &mut obs);
        for row in ensemble.chunks_exact_mut(2) {
            model.draw_into(&mut rng, &mut z, row);
        }
        for (s, row) in summed.iter_mut().zip(ensemble.chunks_exact(2)) {
            *s = row[0] + row[1];
        }
        crps_sum.push(estimator.score_in_place(&mut summed, obs[0] + obs[1]));
        es.push(energy_score_unchecked(&ensemble, 2, &obs, 1.0));
    }
    Ok(CellEstimate {
        crps_sum_mean: crps_sum.mean,
        es_mean: es.mean,
        stderr_crps_sum: crps_sum.std_err(),
        stderr_es: es.std_err(),
    })
}

/// Evenly spaced grid `[-1, 1]` with `2 * half_steps + 1` points.
pub fn correlation_grid(half_steps: usize) -> Vec<f64> {
    let n = half_steps as i64;
    (-n..=n).map(|k| k as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    pub rho_list: Vec<f64>,
    pub varrho_list: Vec<f64>,
    pub n_windows: usize,
    pub window_size: usize,
    pub seed: u64,
    pub scale: Scale,
    pub n_quantiles: QuantileConfig,
}

impl SensitivityConfig {
    /// Full grids (`rho` step 0.2, `varrho` step 0.1) at the given scale.
    pub fn for_scale(scale: Scale, seed: u64) -> Self {
        let (n_windows, window_size) = scale.sensitivity_size();
        Self {
            rho_list: correlation_grid(5),
            varrho_list: correlation_grid(10),
            n_windows,
            window_size,
            seed,
            scale,
            n_quantiles: QuantileConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &c in self.rho_list.iter().chain(&self.varrho_list) {
            if !(-1.0..=1.0).contains(&c) {
                return Err(Error::invalid("correlation", c, "must lie in [-1, 1]"));
            }
        }
        if self.rho_list.is_empty() || self.varrho_list.is_empty() {
            return Err(Error::invalid("grid", "empty", "rho and varrho lists must be nonempty"));
        }
        if self.n_windows == 0 {
            return Err(Error::invalid("n_windows", 0, "must be at least 1"));
        }
        if self.window_size < 2 {
            return Err(Error::invalid("window_size", self.window_size, "must be at least 2"));
        }
        for &rho in &self.rho_list {
            if reference_index(&self.varrho_list, rho).is_none() {
                return Err(Error::invalid(
                    "varrho_list",
                    rho,
                    "must contain every rho as the reference cell",
                ));
            }
        }
        Ok(())
    }
}

fn reference_index(varrho_list: &[f64], rho: f64) -> Option<usize> {
    varrho_list.iter().position(|&v| (v - rho).abs() < 1e-9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCell {
    pub rho: f64,
    pub varrho: f64,
    pub crps_sum_mean: f64,
    pub es_mean: f64,
    /// `None` when the reference mean is zero, as for CRPS-Sum at `rho = -1`.
    pub delta_rel_crps_sum: Option<f64>,
    pub delta_rel_es: Option<f64>,
    pub stderr_crps_sum: f64,
    pub stderr_es: f64,
    /// Delta-method standard errors of the relative changes.
    pub stderr_delta_rel_crps_sum: Option<f64>,
    pub stderr_delta_rel_es: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityGridReport {
    pub config: SensitivityConfig,
    /// Row-major over `rho_list` then `varrho_list`.
    pub cells: Vec<SensitivityCell>,
}

impl SensitivityGridReport {
    pub fn cell(&self, rho: f64, varrho: f64) -> Option<&SensitivityCell> {
        self.cells
            .iter()
            .find(|c| (c.rho - rho).abs() < 1e-9 && (c.varrho - varrho).abs() < 1e-9)
    }

    pub fn row(&self, rho: f64) -> impl Iterator<Item = &SensitivityCell> {
        self.cells.iter().filter(move |c| (c.rho - rho).abs() < 1e-9)
    }
}

/// Relative change and its standard error; `None` for a zero reference.
fn delta_with_error(
    mean: f64,
    se: f64,
    reference: f64,
    reference_se: f64,
    is_reference: bool,
) -> (Option<f64>, Option<f64>) {
    if is_reference {
        return if reference > 0.0 {
            (Some(0.0), Some(0.0))
        } else {
            (None, None)
        };
    }
    match relative_change(mean, reference) {
        Ok(delta) => {
            let a = se / reference;
            let b = mean * reference_se / (reference * reference);
            (Some(delta), Some((a * a + b * b).sqrt()))
        }
        Err(_) => (None, None),
    }
}

pub fn run_sensitivity_grid(cfg: &SensitivityConfig) -> Result<SensitivityGridReport> {
    cfg.validate()?;
    let nv = cfg.varrho_list.len();
    let jobs: Vec<(usize, usize)> = (0..cfg.rho_list.len())
        .flat_map(|r| (0..nv).map(move |v| (r, v)))
        .collect();
    let estimates = jobs
        .par_iter()
        .map(|&(r, v)| {
            let seed = derive_seed(cfg.seed, r, v);
            sensitivity_cell(
                cfg.rho_list[r],
                cfg.varrho_list[v],
                cfg.n_windows,
                cfg.window_size,
                seed,
                cfg.n_quantiles,
            )
            .map(|est| (seed, est))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(jobs.len());
    for (r, &rho) in cfg.rho_list.iter().enumerate() {
        let ref_idx = reference_index(&cfg.varrho_list, rho).expect("validated");
        let (_, reference) = estimates[r * nv + ref_idx];
        for (v, &varrho) in cfg.varrho_list.iter().enumerate() {
            let (seed, est) = estimates[r * nv + v];
            let is_ref = v == ref_idx;
            let (d_cs, se_cs) = delta_with_error(
                est.crps_sum_mean,
                est.stderr_crps_sum,
                reference.crps_sum_mean,
                reference.stderr_crps_sum,
                is_ref,
            );
            let (d_es, se_es) = delta_with_error(
                est.es_mean,
                est.stderr_es,
                reference.es_mean,
                reference.stderr_es,
                is_ref,
            );
            cells.push(SensitivityCell {
                rho,
                varrho,
                crps_sum_mean: est.crps_sum_mean,
                es_mean: est.es_mean,
                delta_rel_crps_sum: d_cs,
                delta_rel_es: d_es,
                stderr_crps_sum: est.stderr_crps_sum,
                stderr_es: est.stderr_es,
                stderr_delta_rel_crps_sum: se_cs,
                stderr_delta_rel_es: se_es,
                seed,
            });
        }
    }
    Ok(SensitivityGridReport {
        config: cfg.clone(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub estimators: Vec<CrpsEstimator>,
    pub sample_sizes: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
}

impl ConvergenceConfig {
    /// Sizes over `[200, 5000]` and 50 repeats. The kernel estimator pairs
    /// neighbouring draws as independent copies; its all-pairs form equals
    /// the empirical-CDF integral and would duplicate that row.
    pub fn standard(seed: u64) -> Self {
        let q = |n| CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::new(n).expect("positive"),
        };
        Self {
            estimators: vec![
                CrpsEstimator::EmpiricalCdf,
                CrpsEstimator::SampleEstimate {
                    pairing: SamplePairing::IndependentCopies,
                },
                q(5),
                q(10),
                q(20),
                q(50),
                q(100),
            ],
            sample_sizes: vec![200, 500, 1000, 2000, 3000, 4000, 5000],
            repeats: 50,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.estimators.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::invalid("convergence", "empty", "need estimators and sizes"));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::invalid("sample_size", n, "must be at least 2"));
        }
        if self.repeats < 2 {
            return Err(Error::invalid("repeats", self.repeats, "must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub estimator: String,
    pub sample_size: usize,
    pub n_quantiles: Option<usize>,
    pub mean: f64,
    pub std_dev: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub config: ConvergenceConfig,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn find(&self, estimator: &str, sample_size: usize, n_quantiles: Option<usize>) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| {
            r.estimator == estimator && r.sample_size == sample_size && r.n_quantiles == n_quantiles
        })
    }
}

/// Scores `N(0, 1)` ensembles against `x = 0`. Within one (size, repeat)
/// every estimator sees the same draw.
pub fn run_convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let reference = crps_gaussian_analytic(GaussianSpec1D::standard(), 0.0)?;
    let per_size: Vec<Vec<Welford>> = cfg
        .sample_sizes
        .par_iter()
        .enumerate()
        .map(|(si, &size)| {
            let mut stats = vec![Welford::default(); cfg.estimators.len()];
            let mut buf = vec![0.0; size];
            for rep in 0..cfg.repeats {
                let mut rng = rng_from_seed(derive_seed(cfg.seed, si, rep));
                let draw: Vec<f64> = (0..size).map(|_| rng.sample(StandardNormal)).collect();
                for (est, stat) in cfg.estimators.iter().zip(stats.iter_mut()) {
                    buf.copy_from_slice(&draw);
                    stat.push(est.score_in_place(&mut buf, 0.0));
                }
            }
            stats
        })
        .collect();

    let mut rows = Vec::new();
    for (est_idx, est) in cfg.estimators.iter().enumerate() {
        for (si, &size) in cfg.sample_sizes.iter().enumerate() {
            let stat = per_size[si][est_idx];
            rows.push(ConvergenceRow {
                estimator: est.label().to_string(),
                sample_size: size,
                n_quantiles: est.n_quantiles(),
                mean: stat.mean,
                std_dev: stat.std_dev(),
                reference,
                abs_error: (stat.mean - reference).abs(),
            });
        }
    }
    Ok(ConvergenceTable {
        config: cfg.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_change_examples() {
        assert_eq!(relative_change(0.5, 0.5).unwrap(), 0.0);
        assert!((relative_change(0.6, 0.5).unwrap() - 0.2).abs() < 1e-15);
        assert!((relative_change(0.45, 0.5).unwrap() + 0.1).abs() < 1e-15);
        assert!(relative_change(0.5, 0.0).is_err());
        assert!(relative_change(0.5, -1.0).is_err());
    }

    #[test]
    fn uncorrelated_sample_correlation() {
        let spec = GaussianSpec::bivariate(0.0).unwrap();
        let draws = sample_gaussian(&spec, 100_000, 7);
        let n = draws.len() as f64;
        let mean = |k: usize| draws.iter().map(|r| r[k]).sum::<f64>() / n;
        let (m0, m1) = (mean(0), mean(1));
        let cov = draws.iter().map(|r| (r[0] - m0) * (r[1] - m1)).sum::<f64>() / n;
        let var = |k: usize, m: f64| draws.iter().map(|r| (r[k] - m).powi(2)).sum::<f64>() / n;
        let corr = cov / (var(0, m0) * var(1, m1)).sqrt();
        assert!(corr.abs() < 0.01, "corr = {corr}");
        assert!(m0.abs() < 0.02 && m1.abs() < 0.02);
    }

    #[test]
    fn degenerate_correlations_are_exact() {
        let plus = sample_gaussian(&GaussianSpec::bivariate(1.0).unwrap(), 1000, 3);
        assert!(plus.iter().all(|r| r[0] == r[1]));
        let minus = sample_gaussian(&GaussianSpec::bivariate(-1.0).unwrap(), 1000, 3);
        assert!(minus.iter().all(|r| r[0] + r[1] == 0.0));
    }

    #[test]
    fn covariance_validation() {
        assert!(GaussianSpec::bivariate(1.2).is_err());
        let not_psd = GaussianSpec::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(not_psd, Err(Error::NotPositiveSemidefinite { .. })));
        let asym = GaussianSpec::new(vec![0.0, 0.0], vec![vec![1.0, 0.5], vec![0.2, 1.0]]);
        assert!(asym.is_err());
        let neg = GaussianSpec::new(vec![0.0], vec![vec![-1.0]]);
        assert!(neg.is_err());
        // singular but PSD in three dimensions
        let singular = GaussianSpec::new(
            vec![1.0, 2.0, 3.0],
            vec![
                vec![1.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0],
                vec![0.0, 0.0, 4.0],
            ],
        )
        .unwrap();
        let draws = sample_gaussian(&singular, 50, 1);
        assert!(draws.iter().all(|r| (r[1] - r[0] - 1.0).abs() < 1e-12));
    }

    #[test]
    fn factor_reproduces_covariance() {
        let cov = vec![
            vec![2.0, 0.6, -0.4],
            vec![0.6, 1.0, 0.3],
            vec![-0.4, 0.3, 1.5],
        ];
        let l = psd_cholesky(&cov).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - cov[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = GaussianSpec::bivariate(0.3).unwrap();
        assert_eq!(sample_gaussian(&spec, 10, 99), sample_gaussian(&spec, 10, 99));
        assert_ne!(sample_gaussian(&spec, 10, 99), sample_gaussian(&spec, 10, 100));
    }

    #[test]
    fn single_cell_grid() {
        let cfg = SensitivityConfig {
            rho_list: vec![0.0],
            varrho_list: vec![0.0],
            n_windows: 64,
            window_size: 16,
            seed: 5,
            scale: Scale::Desk,
            n_quantiles: QuantileConfig::default(),
        };
        let report = run_sensitivity_grid(&cfg).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.cells[0].delta_rel_crps_sum, Some(0.0));
        assert_eq!(report.cells[0].delta_rel_es, Some(0.0));
    }

    #[test]
    fn grid_requires_reference_cells() {
        let mut cfg = SensitivityConfig::for_scale(Scale::Desk, 1);
        cfg.varrho_list = vec![0.0, 0.5];
        assert!(run_sensitivity_grid(&cfg).is_err());
        let mut cfg = SensitivityConfig::for_scale(Scale::Desk, 1);
        cfg.window_size = 1;
        assert!(cfg.validate().is_err());
        cfg.window_size = 2;
        cfg.rho_list = vec![1.5];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn anticorrelated_reference_has_no_crps_sum_delta() {
        let cfg = SensitivityConfig {
            rho_list: vec![-1.0],
            varrho_list: vec![-1.0, 0.0],
            n_windows: 32,
            window_size: 8,
            seed: 11,
            scale: Scale::Desk,
            n_quantiles: QuantileConfig::default(),
        };
        let report = run_sensitivity_grid(&cfg).unwrap();
        assert_eq!(report.cells.len(), 2);
        let reference = report.cell(-1.0, -1.0).unwrap();
        assert_eq!(reference.crps_sum_mean, 0.0);
        assert!(reference.delta_rel_crps_sum.is_none());
        assert_eq!(reference.delta_rel_es, Some(0.0));
        let other = report.cell(-1.0, 0.0).unwrap();
        assert!(other.delta_rel_crps_sum.is_none());
        assert!(other.delta_rel_es.unwrap() > 0.0);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(correlation_grid(5).len(), 11);
        let v = correlation_grid(10);
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], -1.0);
        assert_eq!(v[20], 1.0);
        assert_eq!(v[10], 0.0);
        assert_eq!(v[13], 0.3);
        assert_eq!(Scale::Desk.sensitivity_size(), (4096, 128));
        assert_eq!(Scale::Paper.sensitivity_size(), (16384, 512));
    }

    #[test]
    fn convergence_study_small() {
        let cfg = ConvergenceConfig {
            estimators: vec![CrpsEstimator::EmpiricalCdf, CrpsEstimator::sample()],
            sample_sizes: vec![50, 100],
            repeats: 4,
            seed: 3,
        };
        let table = run_convergence_study(&cfg).unwrap();
        assert_eq!(table.rows.len(), 4);
        // identical draws: the all-pairs kernel form equals the ECDF integral
        for size in [50, 100] {
            let a = table.find("ecdf", size, None).unwrap();
            let b = table.find("sample", size, None).unwrap();
            assert!((a.mean - b.mean).abs() < 1e-12);
        }
        let bad = ConvergenceConfig { repeats: 1, ..cfg };
        assert!(run_convergence_study(&bad).is_err());
    }
}
