//! Noise-only baseline forecasters.
//!
//! The univariate dummy forecasts every dimension from `N(mu_last, sigma^2)`
//! where `mu_last` is the cross-dimension mean of the last input row. The
//! multivariate dummy is a persistence forecast with independent Gaussian
//! noise: dimension `i` is drawn from `N(x_T^i, sigma^2)`.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::EvaluationSplit;
use crate::ensemble::{ForecastEnsemble, ObservationWindow};
use crate::error::{Error, Result};
use crate::multivariate::{ScoreReport, ScoreTotals, ScoringConfig};
use crate::simulation::{derive_seed, rng_from_seed};

pub const DEFAULT_SIGMA: f64 = 1e-4;
pub const DEFAULT_N_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DummyKind {
    #[serde(alias = "uni")]
    Univariate,
    #[default]
    #[serde(alias = "multi")]
    Multivariate,
}

impl FromStr for DummyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uni" | "univariate" => Ok(DummyKind::Univariate),
            "multi" | "multivariate" => Ok(DummyKind::Multivariate),
            other => Err(Error::invalid("kind", other, "expected uni or multi")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DummyConfig {
    pub kind: DummyKind,
    pub sigma: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for DummyConfig {
    fn default() -> Self {
        Self {
            kind: DummyKind::default(),
            sigma: DEFAULT_SIGMA,
            n_samples: DEFAULT_N_SAMPLES,
            seed: 0,
        }
    }
}

impl DummyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", self.sigma, "must be positive and finite"));
        }
        if self.n_samples < 2 {
            return Err(Error::invalid("n_samples", self.n_samples, "must be at least 2"));
        }
        Ok(())
    }
}

/// `S x H x D` draws of `centers[d] + sigma * z`.
fn gaussian_paths(centers: &[f64], horizon: usize, cfg: &DummyConfig) -> Result<ForecastEnsemble> {
    cfg.validate()?;
    if horizon == 0 {
        return Err(Error::invalid("horizon", 0, "must be at least 1"));
    }
    let dims = centers.len();
    let mut rng = rng_from_seed(cfg.seed);
    let mut values = Vec::with_capacity(cfg.n_samples * horizon * dims);
    for _ in 0..cfg.n_samples * horizon {
        for &c in centers {
            let z: f64 = rng.sample(StandardNormal);
            values.push(c + cfg.sigma * z);
        }
    }
    ForecastEnsemble::new(cfg.n_samples, horizon, dims, values)
}

fn last_row(input: &ObservationWindow) -> &[f64] {
    input.row(input.horizon() - 1)
}

pub fn dummy_univariate_forecast(
    input: &ObservationWindow,
    horizon: usize,
    cfg: &DummyConfig,
) -> Result<ForecastEnsemble> {
    let last = last_row(input);
    let mu_last = last.iter().sum::<f64>() / last.len() as f64;
    gaussian_paths(&vec![mu_last; last.len()], horizon, cfg)
}

pub fn dummy_multivariate_forecast(
    input: &ObservationWindow,
    horizon: usize,
    cfg: &DummyConfig,
) -> Result<ForecastEnsemble> {
    gaussian_paths(last_row(input), horizon, cfg)
}

pub fn dummy_forecast(
    input: &ObservationWindow,
    horizon: usize,
    cfg: &DummyConfig,
) -> Result<ForecastEnsemble> {
    match cfg.kind {
        DummyKind::Univariate => dummy_univariate_forecast(input, horizon, cfg),
        DummyKind::Multivariate => dummy_multivariate_forecast(input, horizon, cfg),
    }
}

/// Seed used for split `index` under base seed `seed`.
pub fn split_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, 0xd0, index)
}

/// Forecasts every split and pools the scores over all of them.
pub fn evaluate_dummy(
    splits: &[EvaluationSplit],
    cfg: &DummyConfig,
    scoring: &ScoringConfig,
) -> Result<ScoreReport> {
    let first = splits
        .first()
        .ok_or_else(|| Error::invalid("splits", 0, "need at least one split"))?;
    let mut totals = ScoreTotals::new(first.target_window.dims());
    for split in splits {
        let split_cfg = DummyConfig {
            seed: split_seed(cfg.seed, split.split_index),
            ..*cfg
        };
        let ensemble = dummy_forecast(
            &split.input_window,
            split.target_window.horizon(),
            &split_cfg,
        )?;
        totals.add(&ensemble, &split.target_window, scoring)?;
    }
    Ok(totals.report(scoring)?.with_seed(cfg.seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSweepRow {
    pub kind: DummyKind,
    pub sigma: f64,
    pub crps_sum: f64,
    pub crps: f64,
    pub es: f64,
}

/// Paper-style sigma grid `1e-1, 1e-2, ..., 1e-20`.
pub fn default_sigmas() -> Vec<f64> {
    (1..=20).map(|k| format!("1e-{k}").parse().expect("literal")).collect()
}

/// Scores the dummy forecaster at each sigma with the same seed, so all
/// rows share the underlying standard-normal draws.
pub fn sigma_sweep(
    kind: DummyKind,
    sigmas: &[f64],
    splits: &[EvaluationSplit],
    base: &DummyConfig,
    scoring: &ScoringConfig,
) -> Result<Vec<SigmaSweepRow>> {
    if sigmas.is_empty() {
        return Err(Error::invalid("sigma_list", "[]", "must be nonempty"));
    }
    sigmas
        .iter()
        .map(|&sigma| {
            let cfg = DummyConfig { kind, sigma, ..*base };
            let report = evaluate_dummy(splits, &cfg, scoring)?;
            Ok(SigmaSweepRow {
                kind,
                sigma,
                crps_sum: report.crps_sum(),
                crps: report.crps_aggregate(),
                es: report.energy_score(),
            })
        })
        .collect()
}
