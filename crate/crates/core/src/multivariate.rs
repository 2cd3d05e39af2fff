//! Energy Score, CRPS-Sum and per-dimension CRPS over multivariate ensembles.
//!
//! CRPS-Sum collapses the dimensions by summation before scoring, so any
//! error that cancels across dimensions is invisible to it. The per-dimension
//! CRPS is computed alongside it in [`ScoreReport`] for that reason.
//!
//! Scores can be reported raw (means over points) or target-normalized, where
//! summed scores are divided by the summed absolute observations:
//!
//! * CRPS: `sum_{t,i} CRPS_{t,i} / sum_{t,i} |y_{t,i}|`
//! * CRPS-Sum: `sum_t CRPS(sum_i X_t^i, sum_i y_t^i) / sum_t |sum_i y_t^i|`
//! * ES: `sum_t ES_t / sum_{t,i} |y_{t,i}|`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{ForecastEnsemble, ObservationWindow};
use crate::error::{Error, Result};
use crate::scoring::CrpsEstimator;

pub const DEFAULT_BETA: f64 = 1.0;

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(Error::invalid("beta", beta, "must lie in the open interval (0, 2)"))
    }
}

/// Energy score of `S` sample vectors (row-major `S x dims`) against `obs`.
pub fn energy_score(samples: &[f64], dims: usize, obs: &[f64], beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if dims == 0 || obs.len() != dims {
        return Err(Error::shape(format!("observation of {dims} dims"), obs.len()));
    }
    if samples.len() % dims != 0 {
        return Err(Error::shape(
            format!("a multiple of {dims} sample values"),
            samples.len(),
        ));
    }
    let n_samples = samples.len() / dims;
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            min: 2,
            got: n_samples,
        });
    }
    if samples.iter().chain(obs).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("energy score input"));
    }
    Ok(energy_score_unchecked(samples, dims, obs, beta))
}

#[inline]
fn norm_pow(sq: f64, beta: f64) -> f64 {
    if beta == 1.0 {
        sq.sqrt()
    } else {
        sq.powf(0.5 * beta)
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn energy_score_unchecked(samples: &[f64], dims: usize, obs: &[f64], beta: f64) -> f64 {
    let rows: Vec<&[f64]> = samples.chunks_exact(dims).collect();
    let n = rows.len() as f64;
    let to_obs: f64 = rows.iter().map(|r| norm_pow(sq_dist(r, obs), beta)).sum();
    let mut pairs = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            pairs += norm_pow(sq_dist(a, b), beta);
        }
    }
    // off-diagonal pairs counted once, diagonal is zero
    to_obs / n - pairs / (n * n)
}

/// Mean over the horizon of the CRPS of the dimension-summed series.
pub fn crps_sum(
    ensemble: &ForecastEnsemble,
    obs: &ObservationWindow,
    estimator: CrpsEstimator,
) -> Result<f64> {
    ensemble.check_against(obs)?;
    let per_step = crps_sum_steps(ensemble, obs, estimator);
    Ok(per_step.iter().sum::<f64>() / per_step.len() as f64)
}

fn crps_sum_steps(
    ensemble: &ForecastEnsemble,
    obs: &ObservationWindow,
    estimator: CrpsEstimator,
) -> Vec<f64> {
    (0..ensemble.horizon())
        .map(|t| {
            let mut summed = ensemble.summed(t);
            let target: f64 = obs.row(t).iter().sum();
            estimator.score_in_place(&mut summed, target)
        })
        .collect()
}

/// Per-point CRPS laid out `[step][dim]`.
fn crps_points(
    ensemble: &ForecastEnsemble,
    obs: &ObservationWindow,
    estimator: CrpsEstimator,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(ensemble.horizon() * ensemble.dims());
    for t in 0..ensemble.horizon() {
        for d in 0..ensemble.dims() {
            let mut marginal = ensemble.marginal(t, d);
            out.push(estimator.score_in_place(&mut marginal, obs.get(t, d)));
        }
    }
    out
}

/// Raw vs target-normalized reporting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    #[default]
    Raw,
    #[serde(alias = "target-normalized")]
    Target,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Raw => "raw",
            Normalization::Target => "target",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "target" | "target-normalized" => Ok(Normalization::Target),
            other => Err(Error::invalid("normalization", other, "expected raw or target")),
        }
    }
}

/// How the Energy Score treats a multi-step window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsMode {
    /// Mean of independent per-step scores.
    #[default]
    PerStep,
    /// One score over `H * D` dimensional path vectors.
    Flattened,
}

impl FromStr for EsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-step" => Ok(EsMode::PerStep),
            "flattened" => Ok(EsMode::Flattened),
            other => Err(Error::invalid("es_mode", other, "expected per-step or flattened")),
        }
    }
}

/// Per-dimension CRPS with its aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerDimensionCrps {
    pub per_dim: Vec<f64>,
    pub aggregate: f64,
}

pub fn crps_per_dimension(
    ensemble: &ForecastEnsemble,
    obs: &ObservationWindow,
    estimator: CrpsEstimator,
    normalization: Normalization,
) -> Result<PerDimensionCrps> {
    let cfg = ScoringConfig {
        estimator,
        normalization,
        ..ScoringConfig::default()
    };
    let mut totals = ScoreTotals::new(ensemble.dims());
    totals.add_crps(ensemble, obs, &cfg)?;
    let set = totals.score_set(normalization, false)?;
    Ok(PerDimensionCrps {
        per_dim: set.crps_per_dim,
        aggregate: set.crps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringConfig {
    pub estimator: CrpsEstimator,
    pub beta: f64,
    pub normalization: Normalization,
    pub es_mode: EsMode,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            estimator: CrpsEstimator::default(),
            beta: DEFAULT_BETA,
            normalization: Normalization::Raw,
            es_mode: EsMode::PerStep,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)
    }
}

/// Running sums from which raw and target-normalized scores are both derived.
///
/// Accumulating several evaluation windows and then reporting yields pooled
/// scores over all of them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreTotals {
    crps_by_dim: Vec<f64>,
    abs_obs_by_dim: Vec<f64>,
    crps_steps: usize,
    crps_sum_total: f64,
    abs_summed_obs: f64,
    crps_sum_steps: usize,
    es_total: f64,
    es_abs_obs: f64,
    es_terms: usize,
}

impl ScoreTotals {
    pub fn new(dims: usize) -> Self {
        Self {
            crps_by_dim: vec![0.0; dims],
            abs_obs_by_dim: vec![0.0; dims],
            ..Self::default()
        }
    }

    pub fn dims(&self) -> usize {
        self.crps_by_dim.len()
    }

    fn check_dims(&self, ensemble: &ForecastEnsemble, obs: &ObservationWindow) -> Result<()> {
        ensemble.check_against(obs)?;
        if ensemble.dims() != self.dims() {
            return Err(Error::shape(
                format!("{} dims", self.dims()),
                ensemble.dims(),
            ));
        }
        Ok(())
    }

    fn add_crps(
        &mut self,
        ensemble: &ForecastEnsemble,
        obs: &ObservationWindow,
        cfg: &ScoringConfig,
    ) -> Result<()> {
        self.check_dims(ensemble, obs)?;
        let dims = ensemble.dims();
        for (k, v) in crps_points(ensemble, obs, cfg.estimator).into_iter().enumerate() {
            self.crps_by_dim[k % dims] += v;
        }
        for row in obs.values().chunks_exact(dims) {
            for (acc, v) in self.abs_obs_by_dim.iter_mut().zip(row) {
                *acc += v.abs();
            }
        }
        self.crps_steps += ensemble.horizon();
        Ok(())
    }

    /// Adds one ensemble/observation pair.
    pub fn add(
        &mut self,
        ensemble: &ForecastEnsemble,
        obs: &ObservationWindow,
        cfg: &ScoringConfig,
    ) -> Result<()> {
        cfg.validate()?;
        self.add_crps(ensemble, obs, cfg)?;

        let steps = crps_sum_steps(ensemble, obs, cfg.estimator);
        self.crps_sum_total += steps.iter().sum::<f64>();
        self.abs_summed_obs += (0..obs.horizon())
            .map(|t| obs.row(t).iter().sum::<f64>().abs())
            .sum::<f64>();
        self.crps_sum_steps += steps.len();

        self.es_abs_obs += obs.values().iter().map(|v| v.abs()).sum::<f64>();
        match cfg.es_mode {
            EsMode::PerStep => {
                for t in 0..ensemble.horizon() {
                    let step = ensemble.step(t);
                    self.es_total +=
                        energy_score_unchecked(&step, ensemble.dims(), obs.row(t), cfg.beta);
                }
                self.es_terms += ensemble.horizon();
            }
            EsMode::Flattened => {
                let width = ensemble.horizon() * ensemble.dims();
                self.es_total += energy_score_unchecked(
                    ensemble.flattened_paths(),
                    width,
                    obs.values(),
                    cfg.beta,
                );
                self.es_terms += 1;
            }
        }
        Ok(())
    }

    fn score_set(&self, mode: Normalization, with_multivariate: bool) -> Result<ScoreSet> {
        if self.crps_steps == 0 {
            return Err(Error::invalid("score totals", "empty", "nothing accumulated"));
        }
        let set = match mode {
            Normalization::Raw => {
                let steps = self.crps_steps as f64;
                let per_dim: Vec<f64> = self.crps_by_dim.iter().map(|v| v / steps).collect();
                let crps = per_dim.iter().sum::<f64>() / per_dim.len() as f64;
                ScoreSet {
                    crps_per_dim: per_dim,
                    crps,
                    crps_sum: ratio(self.crps_sum_total, self.crps_sum_steps as f64),
                    es: ratio(self.es_total, self.es_terms as f64),
                }
            }
            Normalization::Target => {
                let zero = self.abs_obs_by_dim.contains(&0.0)
                    || (with_multivariate && self.abs_summed_obs == 0.0);
                if zero {
                    return Err(Error::invalid(
                        "normalization",
                        "target",
                        "undefined when observations sum to zero",
                    ));
                }
                let per_dim = self
                    .crps_by_dim
                    .iter()
                    .zip(&self.abs_obs_by_dim)
                    .map(|(c, a)| c / a)
                    .collect();
                ScoreSet {
                    crps_per_dim: per_dim,
                    crps: self.crps_by_dim.iter().sum::<f64>()
                        / self.abs_obs_by_dim.iter().sum::<f64>(),
                    crps_sum: ratio(self.crps_sum_total, self.abs_summed_obs),
                    es: ratio(self.es_total, self.es_abs_obs),
                }
            }
        };
        Ok(set)
    }

    pub fn report(&self, cfg: &ScoringConfig) -> Result<ScoreReport> {
        let raw = self.score_set(Normalization::Raw, true)?;
        let target = self.score_set(Normalization::Target, true).ok();
        let selected = match cfg.normalization {
            Normalization::Raw => raw.clone(),
            Normalization::Target => self.score_set(Normalization::Target, true)?,
        };
        Ok(ScoreReport {
            normalization_mode: cfg.normalization,
            estimator: cfg.estimator.label().to_string(),
            n_quantiles: cfg.estimator.n_quantiles(),
            beta: cfg.beta,
            es_mode: cfg.es_mode,
            seed: None,
            scores: selected,
            raw,
            target,
        })
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// The three headline scores plus per-dimension CRPS under one normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub crps_per_dim: Vec<f64>,
    pub crps: f64,
    pub crps_sum: f64,
    pub es: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub normalization_mode: Normalization,
    pub estimator: String,
    pub n_quantiles: Option<usize>,
    pub beta: f64,
    pub es_mode: EsMode,
    pub seed: Option<u64>,
    /// Scores under `normalization_mode`.
    #[serde(flatten)]
    pub scores: ScoreSet,
    pub raw: ScoreSet,
    /// Absent when some observation total is zero.
    pub target: Option<ScoreSet>,
}

impl ScoreReport {
    pub fn crps_per_dim(&self) -> &[f64] {
        &self.scores.crps_per_dim
    }

    pub fn crps_aggregate(&self) -> f64 {
        self.scores.crps
    }

    pub fn crps_sum(&self) -> f64 {
        self.scores.crps_sum
    }

    pub fn energy_score(&self) -> f64 {
        self.scores.es
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Scores one ensemble against its observation window.
pub fn score_report(
    ensemble: &ForecastEnsemble,
    obs: &ObservationWindow,
    cfg: &ScoringConfig,
) -> Result<ScoreReport> {
    let mut totals = ScoreTotals::new(ensemble.dims());
    totals.add(ensemble, obs, cfg)?;
    totals.report(cfg)
}
