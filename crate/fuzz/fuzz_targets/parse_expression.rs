#![no_main]

use deficiency::classical::{build_classical, Classical, ExpansionFamily};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = s.parse::<Classical>() {
        if let Ok(e) = build_classical(&c) {
            let _ = e.interior_samples(4);
        }
    }
    let _ = s.parse::<ExpansionFamily>();
});
