#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use rat_core::augment::{read_augmented_jsonl, write_augmented_jsonl};

fuzz_target!(|data: &[u8]| {
    let Ok(examples) = read_augmented_jsonl(data, Path::new("fuzz.jsonl")) else {
        return;
    };
    let mut out = Vec::new();
    write_augmented_jsonl(&mut out, &examples).unwrap();
    let again = read_augmented_jsonl(&out[..], Path::new("fuzz.jsonl")).unwrap();
    assert_eq!(again.len(), examples.len());
});
