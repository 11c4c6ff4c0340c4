#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use rat_core::corpus::{read_corpus, write_corpus, CorpusFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(tm) = read_corpus(data, CorpusFormat::Jsonl, Path::new("fuzz.jsonl")) else {
        return;
    };
    let mut out = Vec::new();
    write_corpus(&mut out, tm.pairs(), CorpusFormat::Jsonl).unwrap();
    let again = read_corpus(&out[..], CorpusFormat::Jsonl, Path::new("fuzz.jsonl")).unwrap();
    assert_eq!(again.pairs(), tm.pairs());
});
