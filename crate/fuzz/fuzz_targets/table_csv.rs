#![no_main]

use concord::distributions::{check_transform_pair, StepQuantile, TransformPair};
use concord::io::parse_table_csv;
use libfuzzer_sys::fuzz_target;

// Table parsing and everything fed from tables (step quantiles, the
// transform-pair checker) must reject bad input with errors, never panics.
fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = parse_table_csv(data) {
        let (probs, values): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
        let _ = StepQuantile::new(probs, values);
        if let Ok(pair) = TransformPair::from_tables(&rows, &rows) {
            let _ = check_transform_pair(&pair);
        }
    }
});
