use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use crpsum::forecasters::DummyKind;
use crpsum::simulation::Scale;
use crpsum::{EsMode, Normalization};
use crpsum_cli::{run, Command, ConfigOverrides, EstimatorName, RunConfig};

/// Probabilistic forecast scoring studies: CRPS estimator convergence,
/// CRPS-Sum / Energy Score sensitivity, and noise-baseline audits.
#[derive(Parser, Debug)]
#[command(name = "crpsum", version = crpsum_cli::VERSION)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    /// desk or paper
    #[arg(long)]
    scale: Option<Scale>,
    #[arg(long, value_enum)]
    estimator: Option<EstimatorName>,
    #[arg(long)]
    n_quantiles: Option<usize>,
    /// raw or target
    #[arg(long)]
    normalize: Option<Normalization>,
    #[arg(long)]
    beta: Option<f64>,
    /// per-step or flattened
    #[arg(long)]
    es_mode: Option<EsMode>,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    input_length: Option<usize>,
    /// Exchange-rate CSV (headerless, 8 columns)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated sigma list for sigma-sweep
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// uni or multi
    #[arg(long)]
    kind: Option<DummyKind>,
    /// Forecast samples per step
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Comma-separated ensemble sizes for convergence
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Option<Vec<usize>>,
    /// Sample dump (sample_id,t,dim,value) for score
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Headerless observation CSV for score
    #[arg(long)]
    obs: Option<PathBuf>,
    /// Also write per-split forecast samples (exchange-eval)
    #[arg(long)]
    dump_samples: bool,
}

impl Flags {
    fn into_overrides(self) -> ConfigOverrides {
        ConfigOverrides {
            seed: self.seed,
            scale: self.scale,
            estimator: self.estimator,
            n_quantiles: self.n_quantiles,
            normalize: self.normalize,
            beta: self.beta,
            es_mode: self.es_mode,
            data: self.data,
            out: self.out,
            kind: self.kind,
            sigma: self.sigma,
            samples: self.samples,
            sigmas: self.sigmas,
            batches: self.batches,
            horizon: self.horizon,
            input_length: self.input_length,
            repeats: self.repeats,
            sample_sizes: self.sample_sizes,
            ensemble: self.ensemble,
            obs: self.obs,
            dump_samples: self.dump_samples.then_some(true),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let file = match &cli.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        let cfg = RunConfig::resolve(cli.command, file.layer(cli.flags.into_overrides()))?;
        let outcome = run(&cfg)?;
        println!("wrote {}", outcome.csv.display());
        println!("wrote {}", outcome.json.display());
        for p in &outcome.extra {
            println!("wrote {}", p.display());
        }
        println!("wrote {}", outcome.manifest.display());
        anyhow::Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
