//! Python bindings for the `crpsum` scoring toolkit.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use crpsum::forecasters::{DummyConfig, DummyKind};
use crpsum::simulation::{self, GaussianSpec};
use crpsum::{
    CrpsEstimator, ForecastEnsemble, GaussianSpec1D, Normalization, ObservationWindow,
    QuantileConfig, SamplePairing, SampleVector, ScoringConfig,
};

fn to_py(err: crpsum::Error) -> PyErr {
    match err {
        crpsum::Error::Io { .. } => PyOSError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn samples(values: Vec<f64>) -> PyResult<SampleVector> {
    SampleVector::new(values).map_err(to_py)
}

fn estimator(name: &str, n_quantiles: usize) -> PyResult<CrpsEstimator> {
    match name {
        "ecdf" => Ok(CrpsEstimator::EmpiricalCdf),
        "quantile" => CrpsEstimator::quantile(n_quantiles).map_err(to_py),
        "sample" => Ok(CrpsEstimator::sample()),
        other => Err(PyValueError::new_err(format!(
            "unknown estimator {other:?}; expected ecdf, quantile or sample"
        ))),
    }
}

fn pairing(name: &str) -> PyResult<SamplePairing> {
    match name {
        "all-pairs" => Ok(SamplePairing::AllPairs),
        "unbiased" => Ok(SamplePairing::Unbiased),
        "independent" => Ok(SamplePairing::IndependentCopies),
        other => Err(PyValueError::new_err(format!(
            "unknown pairing {other:?}; expected all-pairs, unbiased or independent"
        ))),
    }
}

#[pyfunction]
fn pinball_loss(alpha: f64, q: f64, x: f64) -> PyResult<f64> {
    crpsum::pinball_loss(alpha, q, x).map_err(to_py)
}

#[pyfunction]
fn crps_empirical_cdf(values: Vec<f64>, x: f64) -> PyResult<f64> {
    crpsum::crps_empirical_cdf(&samples(values)?, x).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (values, x, n_quantiles = 20))]
fn crps_quantile(values: Vec<f64>, x: f64, n_quantiles: usize) -> PyResult<f64> {
    let cfg = QuantileConfig::new(n_quantiles).map_err(to_py)?;
    crpsum::crps_quantile(&samples(values)?, x, cfg).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (values, x, pairing = "all-pairs"))]
fn crps_sample_estimate(values: Vec<f64>, x: f64, pairing: &str) -> PyResult<f64> {
    crpsum::crps_sample_estimate_with(&samples(values)?, x, self::pairing(pairing)?).map_err(to_py)
}

#[pyfunction]
fn crps_gaussian_analytic(mu: f64, sigma: f64, x: f64) -> PyResult<f64> {
    let spec = GaussianSpec1D::new(mu, sigma).map_err(to_py)?;
    crpsum::crps_gaussian_analytic(spec, x).map_err(to_py)
}

/// Energy score of sample vectors (list of rows) against one observation.
#[pyfunction]
#[pyo3(signature = (samples, obs, beta = 1.0))]
fn energy_score(samples: Vec<Vec<f64>>, obs: Vec<f64>, beta: f64) -> PyResult<f64> {
    let dims = obs.len();
    if let Some(row) = samples.iter().find(|r| r.len() != dims) {
        return Err(PyValueError::new_err(format!(
            "sample of length {} does not match observation of length {dims}",
            row.len()
        )));
    }
    crpsum::energy_score(&samples.concat(), dims, &obs, beta).map_err(to_py)
}

#[pyfunction]
fn relative_change(score_mean: f64, reference_mean: f64) -> PyResult<f64> {
    simulation::relative_change(score_mean, reference_mean).map_err(to_py)
}

#[pyfunction]
fn sample_gaussian(mu: Vec<f64>, cov: Vec<Vec<f64>>, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let spec = GaussianSpec::new(mu, cov).map_err(to_py)?;
    Ok(simulation::sample_gaussian(&spec, n, seed))
}

/// Returns `(crps_sum_mean, es_mean, stderr_crps_sum, stderr_es)`.
#[pyfunction]
fn run_sensitivity_cell(
    rho: f64,
    varrho: f64,
    n_windows: usize,
    window_size: usize,
    seed: u64,
) -> PyResult<(f64, f64, f64, f64)> {
    let c = simulation::run_sensitivity_cell(rho, varrho, n_windows, window_size, seed)
        .map_err(to_py)?;
    Ok((c.crps_sum_mean, c.es_mean, c.stderr_crps_sum, c.stderr_es))
}

/// Forecast sample paths indexed `[sample][step][dim]`.
#[pyclass(name = "ForecastEnsemble", frozen)]
struct PyEnsemble {
    inner: ForecastEnsemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(paths: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        Ok(Self {
            inner: ForecastEnsemble::from_nested(&paths).map_err(to_py)?,
        })
    }

    /// `(n_samples, horizon, dims)`
    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        (self.inner.n_samples(), self.inner.horizon(), self.inner.dims())
    }

    fn to_list(&self) -> Vec<Vec<Vec<f64>>> {
        let e = &self.inner;
        (0..e.n_samples())
            .map(|s| {
                (0..e.horizon())
                    .map(|t| (0..e.dims()).map(|d| e.get(s, t, d)).collect())
                    .collect()
            })
            .collect()
    }
}

#[pyclass(name = "ObservationWindow", frozen)]
struct PyObservation {
    inner: ObservationWindow,
}

#[pymethods]
impl PyObservation {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: ObservationWindow::from_rows(&rows).map_err(to_py)?,
        })
    }

    /// `(horizon, dims)`
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.horizon(), self.inner.dims())
    }
}

#[pyclass(name = "ScoreReport", frozen)]
struct PyScoreReport {
    inner: crpsum::ScoreReport,
}

#[pymethods]
impl PyScoreReport {
    #[getter]
    fn crps_per_dim(&self) -> Vec<f64> {
        self.inner.crps_per_dim().to_vec()
    }

    #[getter]
    fn crps(&self) -> f64 {
        self.inner.crps_aggregate()
    }

    #[getter]
    fn crps_sum(&self) -> f64 {
        self.inner.crps_sum()
    }

    #[getter]
    fn es(&self) -> f64 {
        self.inner.energy_score()
    }

    #[getter]
    fn normalization_mode(&self) -> String {
        self.inner.normalization_mode.to_string()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "ScoreReport(crps_sum={}, crps={}, es={}, normalization_mode={})",
            self.inner.crps_sum(),
            self.inner.crps_aggregate(),
            self.inner.energy_score(),
            self.inner.normalization_mode
        )
    }
}

#[pyfunction]
#[pyo3(signature = (ensemble, obs, estimator = "quantile", n_quantiles = 20))]
fn crps_sum(
    ensemble: &PyEnsemble,
    obs: &PyObservation,
    estimator: &str,
    n_quantiles: usize,
) -> PyResult<f64> {
    crpsum::crps_sum(&ensemble.inner, &obs.inner, self::estimator(estimator, n_quantiles)?)
        .map_err(to_py)
}

/// Returns `(per_dim, aggregate)`.
#[pyfunction]
#[pyo3(signature = (ensemble, obs, estimator = "quantile", n_quantiles = 20, normalize = "raw"))]
fn crps_per_dimension(
    ensemble: &PyEnsemble,
    obs: &PyObservation,
    estimator: &str,
    n_quantiles: usize,
    normalize: &str,
) -> PyResult<(Vec<f64>, f64)> {
    let norm: Normalization = normalize.parse().map_err(to_py)?;
    let r = crpsum::crps_per_dimension(
        &ensemble.inner,
        &obs.inner,
        self::estimator(estimator, n_quantiles)?,
        norm,
    )
    .map_err(to_py)?;
    Ok((r.per_dim, r.aggregate))
}

#[pyfunction]
#[pyo3(signature = (ensemble, obs, estimator = "quantile", n_quantiles = 20, normalize = "raw", beta = 1.0))]
fn score_report(
    ensemble: &PyEnsemble,
    obs: &PyObservation,
    estimator: &str,
    n_quantiles: usize,
    normalize: &str,
    beta: f64,
) -> PyResult<PyScoreReport> {
    let cfg = ScoringConfig {
        estimator: self::estimator(estimator, n_quantiles)?,
        beta,
        normalization: normalize.parse().map_err(to_py)?,
        ..ScoringConfig::default()
    };
    let inner = crpsum::score_report(&ensemble.inner, &obs.inner, &cfg).map_err(to_py)?;
    Ok(PyScoreReport { inner })
}

#[pyfunction]
#[pyo3(signature = (input_rows, horizon, kind = "multi", sigma = 1e-4, n_samples = 400, seed = 0))]
fn dummy_forecast(
    input_rows: Vec<Vec<f64>>,
    horizon: usize,
    kind: &str,
    sigma: f64,
    n_samples: usize,
    seed: u64,
) -> PyResult<PyEnsemble> {
    let input = ObservationWindow::from_rows(&input_rows).map_err(to_py)?;
    let cfg = DummyConfig {
        kind: kind.parse::<DummyKind>().map_err(to_py)?,
        sigma,
        n_samples,
        seed,
    };
    let inner = crpsum::forecasters::dummy_forecast(&input, horizon, &cfg).map_err(to_py)?;
    Ok(PyEnsemble { inner })
}

/// Loads the exchange-rate CSV as a list of rows.
#[pyfunction]
fn load_exchange_rate(path: PathBuf) -> PyResult<Vec<Vec<f64>>> {
    let series = crpsum::data::load_exchange_rate(&path).map_err(to_py)?;
    Ok((0..series.len()).map(|t| series.row(t).to_vec()).collect())
}

/// Convergence study table as a list of dicts.
#[pyfunction]
#[pyo3(signature = (sample_sizes, repeats = 50, seed = 42))]
fn run_convergence_study<'py>(
    py: Python<'py>,
    sample_sizes: Vec<usize>,
    repeats: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = simulation::ConvergenceConfig::standard(seed);
    cfg.sample_sizes = sample_sizes;
    cfg.repeats = repeats;
    let table = simulation::run_convergence_study(&cfg).map_err(to_py)?;
    table
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("estimator", &r.estimator)?;
            d.set_item("sample_size", r.sample_size)?;
            d.set_item("n_quantiles", r.n_quantiles)?;
            d.set_item("mean", r.mean)?;
            d.set_item("std_dev", r.std_dev)?;
            d.set_item("reference", r.reference)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "crpsum")]
fn crpsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(pinball_loss, m)?)?;
    m.add_function(wrap_pyfunction!(crps_empirical_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(crps_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(crps_sample_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(crps_gaussian_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(energy_score, m)?)?;
    m.add_function(wrap_pyfunction!(relative_change, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(run_sensitivity_cell, m)?)?;
    m.add_function(wrap_pyfunction!(run_convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(crps_sum, m)?)?;
    m.add_function(wrap_pyfunction!(crps_per_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(score_report, m)?)?;
    m.add_function(wrap_pyfunction!(dummy_forecast, m)?)?;
    m.add_function(wrap_pyfunction!(load_exchange_rate, m)?)?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyObservation>()?;
    m.add_class::<PyScoreReport>()?;
    Ok(())
}
