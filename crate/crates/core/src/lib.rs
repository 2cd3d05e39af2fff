//! Probabilistic forecast scoring: CRPS estimators, the Energy Score and
//! CRPS-Sum, plus the Monte Carlo studies and noise baselines used to probe
//! how well CRPS-Sum discriminates between forecasters.

pub mod data;
pub mod ensemble;
pub mod error;
pub mod forecasters;
pub mod multivariate;
pub mod report;
pub mod scoring;
pub mod simulation;

pub use ensemble::{ForecastEnsemble, ObservationWindow};
pub use error::{Error, Result};
pub use multivariate::{
    crps_per_dimension, crps_sum, energy_score, score_report, EsMode, Normalization,
    PerDimensionCrps, ScoreReport, ScoreSet, ScoreTotals, ScoringConfig,
};
pub use scoring::{
    crps_empirical_cdf, crps_gaussian_analytic, crps_quantile, crps_sample_estimate,
    crps_sample_estimate_with, pinball_loss, CrpsEstimator, GaussianSpec1D, QuantileConfig,
    SamplePairing, SampleVector,
};
