#![no_main]

use libfuzzer_sys::fuzz_target;
use rat_core::corpus::analyze_for_index;

fuzz_target!(|text: &str| {
    let terms = analyze_for_index(text);
    assert_eq!(analyze_for_index(&terms.join(" ")), terms);
});
