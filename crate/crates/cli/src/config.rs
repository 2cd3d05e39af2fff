use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use crpsum::forecasters::{DummyKind, DEFAULT_N_SAMPLES, DEFAULT_SIGMA};
use crpsum::simulation::Scale;
use crpsum::{CrpsEstimator, EsMode, Normalization, QuantileConfig, SamplePairing, ScoringConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Convergence,
    Sensitivity,
    ExchangeEval,
    SigmaSweep,
    Score,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convergence => "convergence",
            Command::Sensitivity => "sensitivity",
            Command::ExchangeEval => "exchange-eval",
            Command::SigmaSweep => "sigma-sweep",
            Command::Score => "score",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorName {
    Ecdf,
    Quantile,
    Sample,
}

/// Settings that may come from a TOML config file. Every field is optional
/// there; missing fields take the defaults documented on [`RunConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub scale: Option<Scale>,
    pub estimator: Option<EstimatorName>,
    pub n_quantiles: Option<usize>,
    pub normalize: Option<Normalization>,
    pub beta: Option<f64>,
    pub es_mode: Option<EsMode>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub kind: Option<DummyKind>,
    pub sigma: Option<f64>,
    pub samples: Option<usize>,
    pub sigmas: Option<Vec<f64>>,
    pub batches: Option<usize>,
    pub horizon: Option<usize>,
    pub input_length: Option<usize>,
    pub repeats: Option<usize>,
    pub sample_sizes: Option<Vec<usize>>,
    pub ensemble: Option<PathBuf>,
    pub obs: Option<PathBuf>,
    pub dump_samples: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn layer(self, over: ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigOverrides { $($f: over.$f.or(self.$f)),* }
            };
        }
        pick!(
            seed, scale, estimator, n_quantiles, normalize, beta, es_mode, data, out, kind,
            sigma, samples, sigmas, batches, horizon, input_length, repeats, sample_sizes,
            ensemble, obs, dump_samples
        )
    }
}

/// Fully resolved configuration of one run. Echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// Default 42.
    pub seed: u64,
    /// Default `desk`.
    pub scale: Scale,
    /// Default `quantile`.
    pub estimator: EstimatorName,
    /// Default 20.
    pub n_quantiles: usize,
    /// Default `target` for exchange-eval and sigma-sweep, `raw` otherwise.
    pub normalize: Normalization,
    /// Default 1.
    pub beta: f64,
    /// Default `per-step`.
    pub es_mode: EsMode,
    /// Required by exchange-eval and sigma-sweep.
    pub data: Option<PathBuf>,
    /// Default `out`.
    pub out: PathBuf,
    /// Default `multivariate`.
    pub kind: DummyKind,
    /// Default 1e-4.
    pub sigma: f64,
    /// Default 400.
    pub samples: usize,
    /// Default `1e-1, 1e-2, ..., 1e-20`.
    pub sigmas: Vec<f64>,
    /// Default 5.
    pub batches: usize,
    /// Default 30.
    pub horizon: usize,
    /// Default 30.
    pub input_length: usize,
    /// Default 50.
    pub repeats: usize,
    /// Default depends on scale.
    pub sample_sizes: Vec<usize>,
    /// Required by score.
    pub ensemble: Option<PathBuf>,
    /// Required by score.
    pub obs: Option<PathBuf>,
    /// Default false.
    pub dump_samples: bool,
}

pub const DEFAULT_SEED: u64 = 42;

pub fn default_sample_sizes(scale: Scale) -> Vec<usize> {
    match scale {
        Scale::Desk => vec![200, 500, 1000, 2000, 3000, 4000, 5000],
        Scale::Paper => (1..=25).map(|k| k * 200).collect(),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, o: ConfigOverrides) -> anyhow::Result<Self> {
        let scale = o.scale.unwrap_or_default();
        let default_norm = match command {
            Command::ExchangeEval | Command::SigmaSweep => Normalization::Target,
            _ => Normalization::Raw,
        };
        let cfg = RunConfig {
            command,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            scale,
            estimator: o.estimator.unwrap_or(EstimatorName::Quantile),
            n_quantiles: o.n_quantiles.unwrap_or(crpsum::scoring::DEFAULT_N_QUANTILES),
            normalize: o.normalize.unwrap_or(default_norm),
            beta: o.beta.unwrap_or(crpsum::multivariate::DEFAULT_BETA),
            es_mode: o.es_mode.unwrap_or_default(),
            data: o.data,
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            kind: o.kind.unwrap_or_default(),
            sigma: o.sigma.unwrap_or(DEFAULT_SIGMA),
            samples: o.samples.unwrap_or(DEFAULT_N_SAMPLES),
            sigmas: o.sigmas.unwrap_or_else(crpsum::forecasters::default_sigmas),
            batches: o.batches.unwrap_or(crpsum::data::DEFAULT_BATCHES),
            horizon: o.horizon.unwrap_or(crpsum::data::DEFAULT_HORIZON),
            input_length: o.input_length.unwrap_or(crpsum::data::DEFAULT_INPUT_LENGTH),
            repeats: o.repeats.unwrap_or(50),
            sample_sizes: o.sample_sizes.unwrap_or_else(|| default_sample_sizes(scale)),
            ensemble: o.ensemble,
            obs: o.obs,
            dump_samples: o.dump_samples.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        QuantileConfig::new(self.n_quantiles).context("--n-quantiles")?;
        self.scoring().validate().context("--beta")?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            bail!("--sigma must be positive, got {}", self.sigma);
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            bail!("every sweep sigma must be positive, got {s}");
        }
        if self.sigmas.is_empty() {
            bail!("sigma list is empty");
        }
        if self.samples < 2 {
            bail!("--samples must be at least 2, got {}", self.samples);
        }
        match self.command {
            Command::ExchangeEval | Command::SigmaSweep if self.data.is_none() => {
                bail!(
                    "{} needs the exchange-rate file: pass --data <path> \
                     (headerless CSV, 8 columns per row)",
                    self.command.name()
                )
            }
            Command::Score if self.ensemble.is_none() || self.obs.is_none() => {
                bail!("score needs --ensemble <sample dump csv> and --obs <observation csv>")
            }
            _ => Ok(()),
        }
    }

    pub fn estimator(&self) -> CrpsEstimator {
        match self.estimator {
            EstimatorName::Ecdf => CrpsEstimator::EmpiricalCdf,
            EstimatorName::Quantile => CrpsEstimator::Quantile {
                n_quantiles: QuantileConfig::new(self.n_quantiles).expect("validated"),
            },
            EstimatorName::Sample => CrpsEstimator::SampleEstimate {
                pairing: SamplePairing::AllPairs,
            },
        }
    }

    pub fn scoring(&self) -> ScoringConfig {
        ScoringConfig {
            estimator: self.estimator(),
            beta: self.beta,
            normalization: self.normalize,
            es_mode: self.es_mode,
        }
    }
}
