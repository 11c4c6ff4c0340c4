#![no_main]

use libfuzzer_sys::fuzz_target;
use rat_core::pipeline::Manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = Manifest::from_json(text) {
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(Manifest::from_json(&json).unwrap(), m);
        }
    }
});
