#![no_main]

use std::collections::HashSet;

use libfuzzer_sys::fuzz_target;
use rat_core::TmIndex;

fuzz_target!(|data: &[u8]| {
    if let Ok(index) = TmIndex::from_bytes(data) {
        assert_eq!(index.to_bytes(), data);
        let term = index.terms().next().unwrap_or("x").to_string();
        let _ = index.query_top_n(&term, 5, &HashSet::new());
    }
});
