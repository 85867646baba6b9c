#![no_main]

use deficiency::expr::parse_test_function;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_test_function(s) {
        let _ = f.jet(0.5, 2);
    }
});
