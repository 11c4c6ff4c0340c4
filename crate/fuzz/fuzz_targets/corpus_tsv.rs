#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use rat_core::corpus::{read_corpus, write_corpus, CorpusFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(tm) = read_corpus(data, CorpusFormat::Tsv, Path::new("fuzz.tsv")) else {
        return;
    };
    let mut out = Vec::new();
    if write_corpus(&mut out, tm.pairs(), CorpusFormat::Tsv).is_ok() {
        let again = read_corpus(&out[..], CorpusFormat::Tsv, Path::new("fuzz.tsv")).unwrap();
        assert_eq!(again.pairs(), tm.pairs());
    }
});
