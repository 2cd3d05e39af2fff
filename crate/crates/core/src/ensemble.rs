use crate::error::{Error, Result};

/// Forecast sample paths stored row-major as `[sample][step][dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastEnsemble {
    n_samples: usize,
    horizon: usize,
    dims: usize,
    values: Vec<f64>,
}

impl ForecastEnsemble {
    pub fn new(n_samples: usize, horizon: usize, dims: usize, values: Vec<f64>) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::TooFewSamples {
                min: 2,
                got: n_samples,
            });
        }
        if horizon == 0 || dims == 0 {
            return Err(Error::invalid(
                "shape",
                format!("{n_samples}x{horizon}x{dims}"),
                "horizon and dims must be positive",
            ));
        }
        let expected = n_samples * horizon * dims;
        if values.len() != expected {
            return Err(Error::shape(
                format!("{expected} values ({n_samples}x{horizon}x{dims})"),
                values.len(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ensemble"));
        }
        Ok(Self {
            n_samples,
            horizon,
            dims,
            values,
        })
    }

    /// Builds an ensemble from nested `[sample][step][dim]` vectors.
    pub fn from_nested(paths: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n_samples = paths.len();
        let horizon = paths.first().map_or(0, Vec::len);
        let dims = paths
            .first()
            .and_then(|p| p.first())
            .map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n_samples * horizon * dims);
        for (s, path) in paths.iter().enumerate() {
            if path.len() != horizon {
                return Err(Error::shape(
                    format!("{horizon} steps"),
                    format!("{} steps in sample {s}", path.len()),
                ));
            }
            for (t, row) in path.iter().enumerate() {
                if row.len() != dims {
                    return Err(Error::shape(
                        format!("{dims} dims"),
                        format!("{} dims at sample {s} step {t}", row.len()),
                    ));
                }
                values.extend_from_slice(row);
            }
        }
        Self::new(n_samples, horizon, dims, values)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, sample: usize, step: usize, dim: usize) -> f64 {
        self.values[(sample * self.horizon + step) * self.dims + dim]
    }

    /// Sample vectors at one step, flattened `S x D`.
    pub fn step(&self, step: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_samples * self.dims);
        for s in 0..self.n_samples {
            let start = (s * self.horizon + step) * self.dims;
            out.extend_from_slice(&self.values[start..start + self.dims]);
        }
        out
    }

    /// Values of one dimension at one step across samples.
    pub fn marginal(&self, step: usize, dim: usize) -> Vec<f64> {
        (0..self.n_samples).map(|s| self.get(s, step, dim)).collect()
    }

    /// Per-sample sums across dimensions at one step.
    pub fn summed(&self, step: usize) -> Vec<f64> {
        (0..self.n_samples)
            .map(|s| {
                let start = (s * self.horizon + step) * self.dims;
                self.values[start..start + self.dims].iter().sum()
            })
            .collect()
    }

    /// Whole sample paths flattened to `S x (H * D)`.
    pub fn flattened_paths(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn check_against(&self, obs: &ObservationWindow) -> Result<()> {
        if obs.horizon != self.horizon || obs.dims != self.dims {
            return Err(Error::shape(
                format!("observation {}x{}", self.horizon, self.dims),
                format!("{}x{}", obs.horizon, obs.dims),
            ));
        }
        Ok(())
    }
}

/// Observed values over the forecast horizon, row-major `[step][dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationWindow {
    horizon: usize,
    dims: usize,
    values: Vec<f64>,
}

impl ObservationWindow {
    pub fn new(horizon: usize, dims: usize, values: Vec<f64>) -> Result<Self> {
        if horizon == 0 || dims == 0 {
            return Err(Error::invalid(
                "shape",
                format!("{horizon}x{dims}"),
                "horizon and dims must be positive",
            ));
        }
        if values.len() != horizon * dims {
            return Err(Error::shape(
                format!("{} values ({horizon}x{dims})", horizon * dims),
                values.len(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation"));
        }
        Ok(Self {
            horizon,
            dims,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if let Some((t, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dims) {
            return Err(Error::shape(
                format!("{dims} dims"),
                format!("{} dims at step {t}", row.len()),
            ));
        }
        Self::new(rows.len(), dims, rows.concat())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, step: usize) -> &[f64] {
        &self.values[step * self.dims..(step + 1) * self.dims]
    }

    pub fn get(&self, step: usize, dim: usize) -> f64 {
        self.values[step * self.dims + dim]
    }
}
