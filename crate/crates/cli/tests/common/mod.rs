#![allow(dead_code)]

use std::path::{Path, PathBuf};

use crpsum::data::{MultivariateSeries, EXCHANGE_RATE_DIMS, EXCHANGE_RATE_NAMES};
use crpsum::simulation::rng_from_seed;
use rand::Rng;
use rand_distr::StandardNormal;

/// Where the exchange-rate file is looked up: `$CRPSUM_EXCHANGE_RATE`, then
/// `data/exchange_rate.txt` at the workspace root.
pub fn exchange_rate_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("CRPSUM_EXCHANGE_RATE") {
        return Some(PathBuf::from(p));
    }
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/exchange_rate.txt");
    p.exists().then_some(p)
}

/// Eight geometric random walks at currency-like price levels.
pub fn surrogate_series(len: usize, seed: u64) -> MultivariateSeries {
    const LEVELS: [f64; EXCHANGE_RATE_DIMS] = [0.76, 1.53, 0.86, 0.0089, 0.74, 0.18, 0.86, 0.63];
    let mut rng = rng_from_seed(seed);
    let mut level = LEVELS;
    let mut values = Vec::with_capacity(len * EXCHANGE_RATE_DIMS);
    for _ in 0..len {
        for l in level.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *l *= (0.005 * z).exp();
            values.push(*l);
        }
    }
    let names = EXCHANGE_RATE_NAMES.iter().map(|s| s.to_string()).collect();
    MultivariateSeries::new(values, EXCHANGE_RATE_DIMS, names).expect("valid series")
}

