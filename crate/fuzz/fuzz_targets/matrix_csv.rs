#![no_main]

use concord::io::{format_machine, parse_matrix_csv};
use libfuzzer_sys::fuzz_target;

// Matrix CSV parsing must never panic, and accepted matrices must survive a
// full-precision format/parse round trip bit for bit.
fuzz_target!(|data: &[u8]| {
    if let Ok(matrix) = parse_matrix_csv(data) {
        let d = matrix.dim();
        let mut text = String::new();
        for i in 0..d {
            let row: Vec<String> = (0..d).map(|j| format_machine(matrix.get(i, j))).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let back = parse_matrix_csv(text.as_bytes()).expect("round trip must reparse");
        assert_eq!(back.dim(), d);
        for (a, b) in back.entries().iter().zip(matrix.entries()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
});
