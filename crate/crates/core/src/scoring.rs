//! Univariate CRPS estimators.
//!
//! Three sample-based estimators of the continuous ranked probability score
//! are provided, all negatively oriented (lower is better):
//!
//! * [`crps_empirical_cdf`] integrates the squared distance between the
//!   empirical CDF of the ensemble and the observation's step function. The
//!   integral is evaluated exactly over the step intervals.
//! * [`crps_quantile`] averages twice the pinball loss over equally spaced
//!   quantile levels `(k - 0.5) / N`.
//! * [`crps_sample_estimate`] uses the kernel form `E|X - x| - E|X - X'| / 2`.
//!
//! [`crps_gaussian_analytic`] is the closed form for a Gaussian predictive
//! distribution and serves as the reference value in the convergence study.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Minimum ensemble size accepted by every estimator.
pub const MIN_SAMPLES: usize = 2;

/// Default number of quantile levels for the quantile estimator.
pub const DEFAULT_N_QUANTILES: usize = 20;

/// A validated set of forecast samples for one scalar quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector(Vec<f64>);

impl SampleVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_samples(&values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for SampleVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for SampleVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_samples(values: &[f64]) -> Result<()> {
    if values.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_SAMPLES,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("samples"));
    }
    Ok(())
}

fn check_observation(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("observation"))
    }
}

/// Number of equally spaced quantile levels used by [`crps_quantile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct QuantileConfig {
    n_quantiles: usize,
}

impl QuantileConfig {
    pub fn new(n_quantiles: usize) -> Result<Self> {
        if n_quantiles == 0 {
            return Err(Error::invalid("n_quantiles", 0, "must be at least 1"));
        }
        Ok(Self { n_quantiles })
    }

    pub fn n_quantiles(&self) -> usize {
        self.n_quantiles
    }

    /// Midpoint levels `(k - 0.5) / N`, `k = 1..=N`.
    pub fn levels(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_quantiles as f64;
        (1..=self.n_quantiles).map(move |k| (k as f64 - 0.5) / n)
    }
}

impl Default for QuantileConfig {
    fn default() -> Self {
        Self {
            n_quantiles: DEFAULT_N_QUANTILES,
        }
    }
}

impl TryFrom<usize> for QuantileConfig {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<QuantileConfig> for usize {
    fn from(cfg: QuantileConfig) -> usize {
        cfg.n_quantiles
    }
}

/// A univariate Gaussian `N(mu, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec1D {
    mu: f64,
    sigma: f64,
}

impl GaussianSpec1D {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFinite("mu"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", sigma, "must be positive and finite"));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Pinball loss `(alpha - 1{x < q}) * (x - q)` of quantile `q` at level `alpha`.
pub fn pinball_loss(alpha: f64, q: f64, x: f64) -> Result<f64> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", alpha, "must lie in [0, 1]"));
    }
    if !q.is_finite() {
        return Err(Error::NonFinite("quantile"));
    }
    check_observation(x)?;
    Ok(pinball(alpha, q, x))
}

#[inline]
fn pinball(alpha: f64, q: f64, x: f64) -> f64 {
    let indicator = if x < q { 1.0 } else { 0.0 };
    (alpha - indicator) * (x - q)
}

/// Exact integral of `(F(y) - 1{x <= y})^2` for the empirical CDF `F` of the samples.
pub fn crps_empirical_cdf(samples: &SampleVector, x: f64) -> Result<f64> {
    check_observation(x)?;
    let mut sorted = samples.0.clone();
    sort(&mut sorted);
    Ok(ecdf_sorted(&sorted, x))
}

/// Quantile-based CRPS: `(1/N) * sum_k 2 * pinball(alpha_k, Q(alpha_k), x)`.
pub fn crps_quantile(samples: &SampleVector, x: f64, cfg: QuantileConfig) -> Result<f64> {
    check_observation(x)?;
    let mut sorted = samples.0.clone();
    sort(&mut sorted);
    Ok(quantile_sorted(&sorted, x, cfg))
}

/// How the `E|X - X'|` term of the kernel estimator is formed from one ensemble.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplePairing {
    /// All `S^2` ordered pairs including `i = j` (V-statistic). Equal to the
    /// CRPS of the empirical distribution.
    #[default]
    AllPairs,
    /// The `S(S-1)` distinct pairs (U-statistic). Can be slightly negative.
    Unbiased,
    /// Each sample paired with its successor in ensemble order, cyclically,
    /// treating neighbours as independent copies `X, X'`. Depends on order
    /// and, like `Unbiased`, is not bounded below by 0.
    IndependentCopies,
}

/// Kernel estimator `mean|s_i - x| - sum_ij |s_i - s_j| / (2 S^2)`.
pub fn crps_sample_estimate(samples: &SampleVector, x: f64) -> Result<f64> {
    crps_sample_estimate_with(samples, x, SamplePairing::AllPairs)
}

pub fn crps_sample_estimate_with(
    samples: &SampleVector,
    x: f64,
    pairing: SamplePairing,
) -> Result<f64> {
    check_observation(x)?;
    let mut values = samples.0.clone();
    Ok(sample_estimate_in_place(&mut values, x, pairing))
}

/// Closed-form CRPS of `N(mu, sigma^2)` at observation `x`.
pub fn crps_gaussian_analytic(spec: GaussianSpec1D, x: f64) -> Result<f64> {
    check_observation(x)?;
    let z = (x - spec.mu) / spec.sigma;
    let cdf = 0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    Ok(spec.sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / PI.sqrt()))
}

/// Choice of univariate CRPS estimator, shared by the multivariate scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CrpsEstimator {
    EmpiricalCdf,
    Quantile { n_quantiles: QuantileConfig },
    SampleEstimate { pairing: SamplePairing },
}

impl Default for CrpsEstimator {
    fn default() -> Self {
        CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::default(),
        }
    }
}

impl CrpsEstimator {
    pub fn quantile(n_quantiles: usize) -> Result<Self> {
        Ok(CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::new(n_quantiles)?,
        })
    }

    pub fn sample() -> Self {
        CrpsEstimator::SampleEstimate {
            pairing: SamplePairing::AllPairs,
        }
    }

    /// Short name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            CrpsEstimator::EmpiricalCdf => "ecdf",
            CrpsEstimator::Quantile { .. } => "quantile",
            CrpsEstimator::SampleEstimate { pairing } => match pairing {
                SamplePairing::AllPairs => "sample",
                SamplePairing::Unbiased => "sample-unbiased",
                SamplePairing::IndependentCopies => "sample-independent",
            },
        }
    }

    pub fn n_quantiles(&self) -> Option<usize> {
        match self {
            CrpsEstimator::Quantile { n_quantiles } => Some(n_quantiles.n_quantiles()),
            _ => None,
        }
    }

    pub fn score(&self, samples: &SampleVector, x: f64) -> Result<f64> {
        check_observation(x)?;
        let mut values = samples.0.clone();
        Ok(self.score_in_place(&mut values, x))
    }

    /// Scores a validated buffer, reordering it as needed.
    pub(crate) fn score_in_place(&self, values: &mut [f64], x: f64) -> f64 {
        match *self {
            CrpsEstimator::EmpiricalCdf => {
                sort(values);
                ecdf_sorted(values, x)
            }
            CrpsEstimator::Quantile { n_quantiles } => {
                sort(values);
                quantile_sorted(values, x, n_quantiles)
            }
            CrpsEstimator::SampleEstimate { pairing } => {
                sample_estimate_in_place(values, x, pairing)
            }
        }
    }
}

fn sort(values: &mut [f64]) {
    values.sort_unstable_by(f64::total_cmp);
}

fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    let n = sorted.len() as f64;
    let first = sorted[0];
    let last = sorted[sorted.len() - 1];
    // outside the sample range the integrand is 0 or 1
    let mut total = 0.0;
    if x < first {
        total += first - x;
    }
    if x > last {
        total += x - last;
    }
    for (i, pair) in sorted.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let below = (i + 1) as f64 / n;
        let above = 1.0 - below;
        if b <= x {
            total += below * below * (b - a);
        } else if a >= x {
            total += above * above * (b - a);
        } else {
            total += below * below * (x - a) + above * above * (b - x);
        }
    }
    total
}

/// Empirical quantile with linear interpolation between order statistics.
pub(crate) fn empirical_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * alpha;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

fn quantile_sorted(sorted: &[f64], x: f64, cfg: QuantileConfig) -> f64 {
    // interpolate offsets from x so the result depends only on s_i - x
    let offsets: Vec<f64> = sorted.iter().map(|s| s - x).collect();
    let total: f64 = cfg
        .levels()
        .map(|alpha| 2.0 * pinball(alpha, empirical_quantile(&offsets, alpha), 0.0))
        .sum();
    total / cfg.n_quantiles() as f64
}

fn sample_estimate_in_place(values: &mut [f64], x: f64, pairing: SamplePairing) -> f64 {
    let s = values.len();
    let n = s as f64;
    let to_obs = values.iter().map(|v| (v - x).abs()).sum::<f64>() / n;
    let spread = match pairing {
        SamplePairing::AllPairs | SamplePairing::Unbiased => {
            sort(values);
            // sum_{i<j} |s_i - s_j| via gaps: gap k is crossed by k * (S - k) pairs
            let half_sum: f64 = values
                .windows(2)
                .enumerate()
                .map(|(k, w)| (w[1] - w[0]) * ((k + 1) * (s - k - 1)) as f64)
                .sum();
            let denom = if pairing == SamplePairing::AllPairs {
                n * n
            } else {
                n * (n - 1.0)
            };
            2.0 * half_sum / denom
        }
        SamplePairing::IndependentCopies => {
            let cyclic: f64 = (0..s)
                .map(|i| (values[i] - values[(i + 1) % s]).abs())
                .sum();
            cyclic / n
        }
    };
    to_obs - 0.5 * spread
}
