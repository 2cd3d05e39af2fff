//! Loading multivariate daily series and cutting tail evaluation splits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::ensemble::ObservationWindow;
use crate::error::{Error, Result};

pub const EXCHANGE_RATE_DIMS: usize = 8;
pub const EXCHANGE_RATE_NAMES: [&str; EXCHANGE_RATE_DIMS] = [
    "Australia",
    "British",
    "Canada",
    "Switzerland",
    "China",
    "Japan",
    "New Zealand",
    "Singapore",
];

pub const DEFAULT_BATCHES: usize = 5;
pub const DEFAULT_HORIZON: usize = 30;
pub const DEFAULT_INPUT_LENGTH: usize = 30;

/// A `T x D` series, row-major by time.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateSeries {
    values: Vec<f64>,
    dims: usize,
    pub dim_names: Vec<String>,
    pub frequency: String,
}

impl MultivariateSeries {
    pub fn new(values: Vec<f64>, dims: usize, dim_names: Vec<String>) -> Result<Self> {
        if dims == 0 || values.len() % dims != 0 {
            return Err(Error::shape(format!("a multiple of {dims} values"), values.len()));
        }
        if dim_names.len() != dims {
            return Err(Error::shape(format!("{dims} names"), dim_names.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("series"));
        }
        Ok(Self {
            values,
            dims,
            dim_names,
            frequency: "daily".to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.dims..(t + 1) * self.dims]
    }

    /// Rows `[start, end)` as a window.
    pub fn window(&self, start: usize, end: usize) -> Result<ObservationWindow> {
        ObservationWindow::new(
            end - start,
            self.dims,
            self.values[start * self.dims..end * self.dims].to_vec(),
        )
    }

    /// Writes headerless comma-separated rows. Floats use the shortest
    /// representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.values.chunks_exact(self.dims) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Parses headerless CSV rows of exactly `expected_cols` numbers.
pub fn parse_series<R: Read>(reader: R, expected_cols: usize, path: &Path) -> Result<MultivariateSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let load_err = |row: usize, message: String| Error::Load {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| load_err(row, e.to_string()))?;
        if record.len() == 1 && record[0].is_empty() {
            return Err(load_err(row, "blank line".into()));
        }
        if record.len() != expected_cols {
            return Err(load_err(
                row,
                format!("expected {expected_cols} columns, found {}", record.len()),
            ));
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| load_err(row, format!("column {}: not a number: {cell:?}", col + 1)))?;
            if !v.is_finite() {
                return Err(load_err(row, format!("column {}: non-finite value", col + 1)));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(load_err(0, "file is empty".into()));
    }
    let names = if expected_cols == EXCHANGE_RATE_DIMS {
        EXCHANGE_RATE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..expected_cols).map(|i| format!("dim{i}")).collect()
    };
    MultivariateSeries::new(values, expected_cols, names)
}

pub fn load_series(path: &Path, expected_cols: usize) -> Result<MultivariateSeries> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_series(std::io::BufReader::new(file), expected_cols, path)
}

/// Loads the eight-country daily exchange-rate file.
pub fn load_exchange_rate(path: &Path) -> Result<MultivariateSeries> {
    load_series(path, EXCHANGE_RATE_DIMS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSplit {
    pub split_index: usize,
    /// Row index of the first target step in the source series.
    pub target_start: usize,
    pub input_window: ObservationWindow,
    pub target_window: ObservationWindow,
}

/// Consecutive non-overlapping target windows covering the series tail,
/// each preceded by `input_length` rows of context.
pub fn make_rolling_splits(
    series: &MultivariateSeries,
    n_batches: usize,
    horizon: usize,
    input_length: usize,
) -> Result<Vec<EvaluationSplit>> {
    if n_batches == 0 || horizon == 0 || input_length == 0 {
        return Err(Error::invalid(
            "splits",
            format!("{n_batches}x{horizon}+{input_length}"),
            "batches, horizon and input length must be positive",
        ));
    }
    let needed = n_batches * horizon + input_length;
    if series.len() < needed {
        return Err(Error::invalid(
            "series length",
            series.len(),
            "too short for the requested splits",
        ));
    }
    let first_target = series.len() - n_batches * horizon;
    (0..n_batches)
        .map(|k| {
            let start = first_target + k * horizon;
            Ok(EvaluationSplit {
                split_index: k,
                target_start: start,
                input_window: series.window(start - input_length, start)?,
                target_window: series.window(start, start + horizon)?,
            })
        })
        .collect()
}
