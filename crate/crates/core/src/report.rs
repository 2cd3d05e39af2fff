//! CSV and JSON encodings of the study outputs.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ensemble::ForecastEnsemble;
use crate::error::{Error, Result};
use crate::forecasters::SigmaSweepRow;
use crate::multivariate::{Normalization, ScoreReport};
use crate::simulation::{ConvergenceTable, SensitivityGridReport};

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(csv::Error::from)?;
    Ok(())
}

fn write_rows<T: Serialize, W: Write>(rows: impl IntoIterator<Item = T>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScoreRow<'a> {
    crps_sum: f64,
    crps: f64,
    es: f64,
    normalization_mode: Normalization,
    estimator: &'a str,
    n_quantiles: Option<usize>,
    seed: Option<u64>,
}

/// One-row CSV with columns
/// `crps_sum,crps,es,normalization_mode,estimator,n_quantiles,seed`.
pub fn write_score_csv<W: Write>(report: &ScoreReport, out: W) -> Result<()> {
    write_rows(
        [ScoreRow {
            crps_sum: report.crps_sum(),
            crps: report.crps_aggregate(),
            es: report.energy_score(),
            normalization_mode: report.normalization_mode,
            estimator: &report.estimator,
            n_quantiles: report.n_quantiles,
            seed: report.seed,
        }],
        out,
    )
}

#[derive(Debug, Serialize)]
struct GridRow {
    rho: f64,
    varrho: f64,
    crps_sum_mean: f64,
    es_mean: f64,
    delta_rel_crps_sum: Option<f64>,
    delta_rel_es: Option<f64>,
    stderr_crps_sum: f64,
    stderr_es: f64,
    n_windows: usize,
    window_size: usize,
    seed: u64,
    stderr_delta_rel_crps_sum: Option<f64>,
    stderr_delta_rel_es: Option<f64>,
}

/// One row per `(rho, varrho)` cell. An empty relative change means the
/// reference mean was zero.
pub fn write_grid_csv<W: Write>(report: &SensitivityGridReport, out: W) -> Result<()> {
    let cfg = &report.config;
    write_rows(
        report.cells.iter().map(|c| GridRow {
            rho: c.rho,
            varrho: c.varrho,
            crps_sum_mean: c.crps_sum_mean,
            es_mean: c.es_mean,
            delta_rel_crps_sum: c.delta_rel_crps_sum,
            delta_rel_es: c.delta_rel_es,
            stderr_crps_sum: c.stderr_crps_sum,
            stderr_es: c.stderr_es,
            n_windows: cfg.n_windows,
            window_size: cfg.window_size,
            seed: c.seed,
            stderr_delta_rel_crps_sum: c.stderr_delta_rel_crps_sum,
            stderr_delta_rel_es: c.stderr_delta_rel_es,
        }),
        out,
    )
}

#[derive(Debug, Serialize)]
struct ConvergenceCsvRow<'a> {
    estimator: &'a str,
    sample_size: usize,
    n_quantiles: Option<usize>,
    mean: f64,
    std_dev: f64,
    reference: f64,
    abs_error: f64,
    repeats: usize,
    seed: u64,
}

pub fn write_convergence_csv<W: Write>(table: &ConvergenceTable, out: W) -> Result<()> {
    write_rows(
        table.rows.iter().map(|r| ConvergenceCsvRow {
            estimator: &r.estimator,
            sample_size: r.sample_size,
            n_quantiles: r.n_quantiles,
            mean: r.mean,
            std_dev: r.std_dev,
            reference: r.reference,
            abs_error: r.abs_error,
            repeats: table.config.repeats,
            seed: table.config.seed,
        }),
        out,
    )
}

pub fn write_sigma_sweep_csv<W: Write>(rows: &[SigmaSweepRow], out: W) -> Result<()> {
    write_rows(rows, out)
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpRow {
    sample_id: usize,
    t: usize,
    dim: usize,
    value: f64,
}

/// Long-format sample dump with columns `sample_id,t,dim,value`.
pub fn write_sample_dump<W: Write>(ensemble: &ForecastEnsemble, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for s in 0..ensemble.n_samples() {
        for t in 0..ensemble.horizon() {
            for d in 0..ensemble.dims() {
                wtr.serialize(DumpRow {
                    sample_id: s,
                    t,
                    dim: d,
                    value: ensemble.get(s, t, d),
                })?;
            }
        }
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a sample dump back; every `(sample_id, t, dim)` cell must appear once.
pub fn read_sample_dump<R: Read>(input: R) -> Result<ForecastEnsemble> {
    let mut rdr = csv::Reader::from_reader(input);
    let rows: Vec<DumpRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
    let (mut n_samples, mut horizon, mut dims) = (0, 0, 0);
    for r in &rows {
        n_samples = n_samples.max(r.sample_id + 1);
        horizon = horizon.max(r.t + 1);
        dims = dims.max(r.dim + 1);
    }
    let total = n_samples * horizon * dims;
    if rows.len() != total {
        return Err(Error::shape(
            format!("{total} rows for a {n_samples}x{horizon}x{dims} ensemble"),
            rows.len(),
        ));
    }
    let mut values = vec![f64::NAN; total];
    let mut seen = vec![false; total];
    for r in rows {
        let idx = (r.sample_id * horizon + r.t) * dims + r.dim;
        if seen[idx] {
            return Err(Error::invalid(
                "sample dump",
                format!("({}, {}, {})", r.sample_id, r.t, r.dim),
                "duplicate cell",
            ));
        }
        seen[idx] = true;
        values[idx] = r.value;
    }
    ForecastEnsemble::new(n_samples, horizon, dims, values)
}
