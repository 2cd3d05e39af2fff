use std::io::Write;

use crpsum::data::{load_exchange_rate, load_series, make_rolling_splits, MultivariateSeries};
use crpsum::Error;
use proptest::prelude::*;

fn series_from(values: Vec<f64>, dims: usize) -> MultivariateSeries {
    let names = (0..dims).map(|d| format!("c{d}")).collect();
    MultivariateSeries::new(values, dims, names).unwrap()
}

proptest! {
    #[test]
    fn write_then_load_is_bit_exact(
        dims in 1usize..9,
        rows in 1usize..40,
        seed in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..400),
    ) {
        let values: Vec<f64> = seed.iter().cycle().take(dims * rows).copied().collect();
        let series = series_from(values.clone(), dims);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        series.write_csv(&mut file).unwrap();
        file.flush().unwrap();
        let back = load_series(file.path(), dims).unwrap();
        prop_assert_eq!(back.len(), rows);
        let same = back.values().iter().zip(&values).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
    }
}

#[test]
fn row_count_matches_independent_line_count() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for t in 0..517 {
        let row: Vec<String> = (0..8).map(|d| format!("{:.6}", 0.5 + t as f64 * 1e-3 + d as f64)).collect();
        writeln!(file, "{}", row.join(",")).unwrap();
    }
    file.flush().unwrap();
    let text = std::fs::read_to_string(file.path()).unwrap();
    let lines = text.lines().filter(|l| !l.trim().is_empty()).count();
    let series = load_exchange_rate(file.path()).unwrap();
    assert_eq!(series.dims(), 8);
    assert_eq!(series.len(), lines);
}

#[test]
fn short_row_is_named_in_the_error() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1,2,3,4,5,6,7,8").unwrap();
    writeln!(file, "1,2,3,4,5,6,7,8").unwrap();
    writeln!(file, "1,2,3,4,5,6,7").unwrap();
    file.flush().unwrap();
    match load_exchange_rate(file.path()) {
        Err(Error::Load { row, message, .. }) => {
            assert_eq!(row, 3);
            assert!(message.contains("7"), "{message}");
        }
        other => panic!("expected a load error, got {other:?}"),
    }
}

#[test]
fn tail_splits_are_disjoint_and_cover_the_last_150_points() {
    let len = 600;
    let values: Vec<f64> = (0..len * 8).map(|i| i as f64).collect();
    let series = series_from(values, 8);
    let splits = make_rolling_splits(&series, 5, 30, 30).unwrap();
    assert_eq!(splits.len(), 5);
    let mut covered: Vec<usize> = Vec::new();
    for s in &splits {
        covered.extend(s.target_start..s.target_start + s.target_window.horizon());
        // input window ends right before the target
        assert_eq!(s.input_window.row(29), series.row(s.target_start - 1));
        assert_eq!(s.target_window.row(0), series.row(s.target_start));
    }
    let expected: Vec<usize> = (len - 150..len).collect();
    assert_eq!(covered, expected);
}
