#![no_main]

use gengeo::symbolic::coeff::{fmt_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Some(r) = parse_rational(src) {
        assert_eq!(parse_rational(&fmt_rational(&r)), Some(r));
    }
});
