#![no_main]

use concord::concordance::{beta_p, MeasureSpec};
use concord::copulas::Copula;
use concord::io::{parse_measure_spec, MeasureSource};
use libfuzzer_sys::fuzz_target;

// The measure spec mini-grammar must never panic; parameters accepted by the
// parser must be accepted by the measures themselves.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(source) = parse_measure_spec(text) {
        match source {
            MeasureSource::BetaP(p) => {
                let spec = MeasureSpec::beta_p(p).expect("parser-validated parameter");
                let _ = spec;
                let value = beta_p(&Copula::Independence, p).expect("valid p");
                assert!(value.abs() < 1e-12);
            }
            MeasureSource::GTransformed(_) => {
                // Table paths are resolved by the caller; nothing to run here.
            }
            _ => {}
        }
    }
});
