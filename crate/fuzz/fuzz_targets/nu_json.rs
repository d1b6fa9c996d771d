#![no_main]

use concord::concordance::NuMeasure;
use concord::io::{parse_nu_json, NuSource};
use libfuzzer_sys::fuzz_target;

// Nu-measure JSON must parse or fail cleanly; inline atom lists then go
// through measure validation, which must also never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(NuSource::Atoms(atoms)) = parse_nu_json(text) {
        let _ = NuMeasure::atoms(atoms);
    }
});
