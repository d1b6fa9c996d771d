#![no_main]

use concord::io::parse_copula_spec;
use libfuzzer_sys::fuzz_target;

// The copula spec mini-grammar must never panic, and every accepted copula
// must evaluate inside the Frechet-Hoeffding bounds.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(copula) = parse_copula_spec(text) {
        for (u, v) in [(0.0, 0.7), (0.3, 0.7), (0.5, 0.5), (0.9, 0.2), (1.0, 1.0)] {
            let value = copula.eval(u, v).expect("arguments are in range");
            let lower = (u + v - 1.0_f64).max(0.0);
            let upper = u.min(v);
            assert!(value >= lower - 1e-9 && value <= upper + 1e-9);
        }
    }
});
