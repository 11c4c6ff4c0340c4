mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use common::random_tm;
use rat_core::augment::{augment_corpus, write_augmented};
use rat_core::corpus::TranslationMemory;
use rat_core::{AugmentationConfig, AugmentedExample, Bm25Params, SamplingMode, TmIndex};

fn setup(n: usize, seed: u64) -> (TranslationMemory, TmIndex) {
    // small vocabulary so every query has plenty of candidates
    let tm = random_tm(n, 40, seed);
    let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();
    (tm, idx)
}

fn shuffle(k: usize, pool: usize, seed: u64) -> AugmentationConfig {
    AugmentationConfig {
        k,
        pool_size: pool,
        mode: SamplingMode::Shuffle,
        seed,
        ..Default::default()
    }
}

#[test]
fn shuffle_picks_from_top_pool() {
    let (tm, idx) = setup(300, 1);
    let cfg = shuffle(3, 10, 4);
    let out = augment_corpus(&tm, &idx, &cfg).unwrap();
    for (ex, pair) in out.iter().zip(tm.pairs()) {
        let excl: HashSet<String> = tm
            .pairs()
            .iter()
            .filter(|p| p.id == pair.id || p.source == pair.source)
            .map(|p| p.id.clone())
            .collect();
        let pool: HashSet<String> = idx
            .query_top_n(&pair.source, 10, &excl)
            .into_iter()
            .map(|m| m.pair_id)
            .collect();
        assert!(ex.suggestions.len() == 3.min(pool.len()));
        assert!(ex.suggestions.iter().all(|s| pool.contains(&s.pair_id)));
        assert!(ex.suggestions.windows(2).all(|w| w[0].rank < w[1].rank));
    }
}

#[test]
fn topk_equals_shuffle_with_pool_k() {
    let (tm, idx) = setup(200, 2);
    let topk = AugmentationConfig {
        k: 4,
        pool_size: 4,
        ..Default::default()
    };
    let a = augment_corpus(&tm, &idx, &topk).unwrap();
    let b = augment_corpus(&tm, &idx, &shuffle(4, 4, 99)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let xs: BTreeSet<&str> = x.suggestions.iter().map(|s| s.pair_id.as_str()).collect();
        let ys: BTreeSet<&str> = y.suggestions.iter().map(|s| s.pair_id.as_str()).collect();
        assert_eq!(xs, ys);
    }
}

#[test]
fn self_augmentation_never_leaks_reference() {
    let (tm, idx) = setup(300, 3);
    for cfg in [AugmentationConfig::default(), shuffle(3, 10, 1)] {
        for ex in augment_corpus(&tm, &idx, &cfg).unwrap() {
            for s in &ex.suggestions {
                assert_ne!(s.pair_id, ex.pair_id);
                assert_ne!(s.source, ex.source);
            }
            let ids: HashSet<&str> = ex.suggestions.iter().map(|s| s.pair_id.as_str()).collect();
            assert_eq!(ids.len(), ex.suggestions.len());
        }
    }
}

#[test]
fn independent_of_corpus_order() {
    let (tm, idx) = setup(150, 4);
    let cfg = shuffle(3, 10, 17);
    let forward = augment_corpus(&tm, &idx, &cfg).unwrap();
    let mut reversed_pairs = tm.pairs().to_vec();
    reversed_pairs.reverse();
    let reversed = TranslationMemory::new("rev", reversed_pairs).unwrap();
    let backward = augment_corpus(&reversed, &idx, &cfg).unwrap();
    let by_id: HashMap<&str, &AugmentedExample> =
        backward.iter().map(|e| (e.pair_id.as_str(), e)).collect();
    for ex in &forward {
        assert_eq!(by_id[ex.pair_id.as_str()], ex);
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let (tm, idx) = setup(100, 5);
    let dir = tempfile::tempdir().unwrap();
    let cfg = shuffle(3, 10, 123);
    let a = write_augmented(&dir.path().join("a"), &augment_corpus(&tm, &idx, &cfg).unwrap()).unwrap();
    let b = write_augmented(&dir.path().join("b"), &augment_corpus(&tm, &idx, &cfg).unwrap()).unwrap();
    for (x, y) in [(a.jsonl, b.jsonl), (a.flat, b.flat), (a.reference, b.reference)] {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn different_seeds_differ() {
    let (tm, idx) = setup(100, 6);
    let candidates = tm
        .pairs()
        .iter()
        .filter(|p| idx.query_top_n(&p.source, 11, &HashSet::new()).len() >= 11)
        .count();
    assert!(candidates >= 90, "only {candidates} queries with 10+ candidates");
    let a = augment_corpus(&tm, &idx, &shuffle(3, 10, 1)).unwrap();
    let b = augment_corpus(&tm, &idx, &shuffle(3, 10, 2)).unwrap();
    assert!(a.iter().zip(&b).any(|(x, y)| x.suggestions != y.suggestions));
}

#[test]
fn flat_input_invariant() {
    let (tm, idx) = setup(50, 7);
    let cfg = AugmentationConfig {
        separator: "<sep>".into(),
        ..shuffle(2, 5, 3)
    };
    for ex in augment_corpus(&tm, &idx, &cfg).unwrap() {
        let mut parts = vec![ex.source.clone()];
        for s in &ex.suggestions {
            parts.push("<sep>".into());
            parts.push(s.target.clone());
        }
        assert_eq!(ex.flat_input, parts.join(" "));
        assert_eq!(ex.reference, tm.pairs().iter().find(|p| p.id == ex.pair_id).unwrap().target);
    }
}
