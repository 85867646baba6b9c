#![no_main]

use deficiency::index::{power_indices, DefectPair};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<DefectPair>() {
        assert_eq!(p.to_string().parse::<DefectPair>().unwrap(), p);
        let _ = power_indices(p, 3);
    }
});
