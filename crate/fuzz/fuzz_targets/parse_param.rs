#![no_main]

use deficiency::params::{parse_call, Param};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<Param>() {
        if p.exact.is_some() {
            let again: Param = p.to_string().parse().expect("display of an exact parameter parses");
            assert_eq!(again.exact, p.exact);
        }
    }
    let _ = parse_call(s);
});
