#![no_main]

use deficiency::poly::{find_roots, RealPolynomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<RealPolynomial>() {
        if p.degree() <= 24 && p.coefficients().iter().all(|c| c.is_finite() && c.abs() < 1e12) {
            let _ = find_roots(&p, 1e-10);
        }
    }
});
