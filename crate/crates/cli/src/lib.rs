//! Harness behind the `crpsum` binary: resolves a [`RunConfig`], runs one
//! study and writes its CSV + JSON reports and a run manifest.

pub mod config;
pub mod reference;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use crpsum::data::{load_exchange_rate, make_rolling_splits, EvaluationSplit};
use crpsum::forecasters::{dummy_forecast, evaluate_dummy, sigma_sweep, split_seed, DummyConfig};
use crpsum::report;
use crpsum::simulation::{run_convergence_study, run_sensitivity_grid, ConvergenceConfig, SensitivityConfig};
use crpsum::{score_report, ObservationWindow};
use serde::Serialize;

pub use config::{Command, ConfigOverrides, EstimatorName, RunConfig};

pub const VERSION: &str = env!("CRPSUM_VERSION");

/// Files written by one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub manifest: PathBuf,
    pub extra: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    result: T,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    started_unix_secs: u64,
    wall_time_secs: f64,
    outputs: Vec<String>,
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path)
        .with_context(|| format!("cannot write {} (is the --out directory writable?)", path.display()))?;
    Ok(BufWriter::new(file))
}

/// CSV with two `#` comment lines naming the version and effective config.
fn write_csv_with_header(
    path: &Path,
    cfg: &RunConfig,
    body: impl FnOnce(&mut Vec<u8>) -> crpsum::Result<()>,
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# crpsum {VERSION}")?;
    writeln!(buf, "# config: {}", serde_json::to_string(cfg)?)?;
    body(&mut buf)?;
    let mut out = create(path)?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn write_json_envelope<T: Serialize>(path: &Path, cfg: &RunConfig, result: T) -> anyhow::Result<()> {
    let mut out = create(path)?;
    report::write_json(
        &Envelope {
            version: VERSION,
            config: cfg,
            result,
        },
        &mut out,
    )?;
    out.flush()?;
    Ok(())
}

fn load_splits(cfg: &RunConfig) -> anyhow::Result<Vec<EvaluationSplit>> {
    let path = cfg.data.as_deref().expect("validated");
    if !path.exists() {
        anyhow::bail!(
            "dataset file {} not found; pass --data with the exchange-rate CSV",
            path.display()
        );
    }
    let series = load_exchange_rate(path)?;
    Ok(make_rolling_splits(&series, cfg.batches, cfg.horizon, cfg.input_length)?)
}

fn dummy_config(cfg: &RunConfig) -> DummyConfig {
    DummyConfig {
        kind: cfg.kind,
        sigma: cfg.sigma,
        n_samples: cfg.samples,
        seed: cfg.seed,
    }
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let started_unix_secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
    let stem = cfg.command.name();
    let csv = cfg.out.join(format!("{stem}.csv"));
    let json = cfg.out.join(format!("{stem}.json"));
    let mut extra = Vec::new();

    match cfg.command {
        Command::Convergence => {
            let mut study = ConvergenceConfig::standard(cfg.seed);
            study.sample_sizes = cfg.sample_sizes.clone();
            study.repeats = cfg.repeats;
            let table = run_convergence_study(&study)?;
            write_csv_with_header(&csv, cfg, |b| report::write_convergence_csv(&table, b))?;
            write_json_envelope(&json, cfg, &table)?;
        }
        Command::Sensitivity => {
            let study = SensitivityConfig::for_scale(cfg.scale, cfg.seed);
            let grid = run_sensitivity_grid(&study)?;
            write_csv_with_header(&csv, cfg, |b| report::write_grid_csv(&grid, b))?;
            write_json_envelope(&json, cfg, &grid)?;
        }
        Command::ExchangeEval => {
            let splits = load_splits(cfg)?;
            let dummy = dummy_config(cfg);
            let scores = evaluate_dummy(&splits, &dummy, &cfg.scoring())?;
            let comparison = reference::compare(cfg.kind, &scores);
            write_csv_with_header(&csv, cfg, |b| report::write_score_csv(&scores, b))?;
            write_json_envelope(&json, cfg, &comparison)?;
            if cfg.dump_samples {
                for split in &splits {
                    let split_cfg = DummyConfig {
                        seed: split_seed(cfg.seed, split.split_index),
                        ..dummy
                    };
                    let ensemble =
                        dummy_forecast(&split.input_window, split.target_window.horizon(), &split_cfg)?;
                    let path = cfg.out.join(format!("samples_split{}.csv", split.split_index));
                    let mut out = create(&path)?;
                    report::write_sample_dump(&ensemble, &mut out)?;
                    out.flush()?;
                    extra.push(path);
                }
            }
        }
        Command::SigmaSweep => {
            let splits = load_splits(cfg)?;
            let rows = sigma_sweep(cfg.kind, &cfg.sigmas, &splits, &dummy_config(cfg), &cfg.scoring())?;
            write_csv_with_header(&csv, cfg, |b| report::write_sigma_sweep_csv(&rows, b))?;
            write_json_envelope(&json, cfg, &rows)?;
        }
        Command::Score => {
            let ens_path = cfg.ensemble.as_deref().expect("validated");
            let obs_path = cfg.obs.as_deref().expect("validated");
            let file = File::open(ens_path)
                .with_context(|| format!("cannot open ensemble file {}", ens_path.display()))?;
            let ensemble = report::read_sample_dump(std::io::BufReader::new(file))
                .with_context(|| format!("reading {}", ens_path.display()))?;
            let series = crpsum::data::load_series(obs_path, ensemble.dims())?;
            let obs = ObservationWindow::new(series.len(), series.dims(), series.values().to_vec())?;
            let scores = score_report(&ensemble, &obs, &cfg.scoring())?.with_seed(cfg.seed);
            write_csv_with_header(&csv, cfg, |b| report::write_score_csv(&scores, b))?;
            write_json_envelope(&json, cfg, &scores)?;
        }
    }

    let manifest = cfg.out.join("manifest.json");
    let mut outputs = vec![csv.display().to_string(), json.display().to_string()];
    outputs.extend(extra.iter().map(|p| p.display().to_string()));
    let mut out = create(&manifest)?;
    report::write_json(
        &Manifest {
            version: VERSION,
            command: stem,
            seed: cfg.seed,
            config: cfg,
            started_unix_secs,
            wall_time_secs: started.elapsed().as_secs_f64(),
            outputs,
        },
        &mut out,
    )?;
    out.flush()?;
    Ok(RunOutcome {
        csv,
        json,
        manifest,
        extra,
    })
}
