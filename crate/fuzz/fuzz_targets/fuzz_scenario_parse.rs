#![no_main]

use gengeo::scenario::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    match Scenario::parse(src) {
        Ok(s) => {
            let _ = s.hash();
        }
        Err(e) => assert!(!e.issues().is_empty()),
    }
});
