#![no_main]

use concord::io::parse_data_csv;
use libfuzzer_sys::fuzz_target;

// Data CSV parsing must never panic; accepted tables expose rectangular
// columns addressable by every header.
fuzz_target!(|data: &[u8]| {
    if let Ok(table) = parse_data_csv(data) {
        let rows = table.rows();
        assert!(rows > 0);
        let headers = table.headers.clone();
        for name in &headers {
            let col = table.column(name).expect("own header must resolve");
            assert_eq!(col.len(), rows);
            assert!(col.iter().all(|v| v.is_finite()));
        }
    }
});
