#![no_main]

use gengeo::symbolic::parse_poly;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_poly(src) {
        // printing is canonical and re-parses to the same polynomial
        let printed = p.to_string();
        assert_eq!(parse_poly(&printed).expect("printed form parses"), p, "{printed}");
    }
});
