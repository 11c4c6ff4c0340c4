#![no_main]

use libfuzzer_sys::fuzz_target;
use rat_core::corpus::tokenize_13a;
use rat_core::eval::bleu_corpus;

fuzz_target!(|text: &str| {
    let tokens = tokenize_13a(text);
    assert!(tokens.iter().all(|t| !t.is_empty() && !t.contains(' ')));
    if let Ok(score) = bleu_corpus(&[text], &[text]) {
        assert!((0.0..=100.0).contains(&score.score));
    }
});
