mod common;

use std::collections::{HashMap, HashSet};

use common::{random_queries, random_tm, rel_close, BruteForce};
use proptest::prelude::*;
use rat_core::corpus::{analyze_for_index, SentencePair, TranslationMemory};
use rat_core::{Bm25Params, TmIndex};

#[test]
fn statistics_match_naive_recount() {
    let tm = random_tm(1000, 300, 11);
    let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();

    let mut tf: HashMap<(String, u32), u32> = HashMap::new();
    let mut total = 0usize;
    for (d, p) in tm.pairs().iter().enumerate() {
        let terms = analyze_for_index(&p.source);
        assert_eq!(idx.doc_length(d as u32), Some(terms.len() as u32));
        total += terms.len();
        for t in terms {
            *tf.entry((t, d as u32)).or_default() += 1;
        }
    }
    assert_eq!(idx.doc_count(), 1000);
    assert_eq!(idx.avg_doc_length(), total as f64 / 1000.0);

    let mut seen = 0;
    for term in idx.terms() {
        for p in idx.postings(term) {
            assert_eq!(tf[&(term.to_string(), p.doc)], p.tf);
            seen += 1;
        }
        assert!(idx.postings(term).windows(2).all(|w| w[0].doc < w[1].doc));
    }
    assert_eq!(seen, tf.len());
}

#[test]
fn top_n_matches_brute_force() {
    let tm = random_tm(1000, 300, 5);
    let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();
    let oracle = BruteForce::new(&tm, Bm25Params::default());
    let none = HashSet::new();
    for q in random_queries(100, 300, 6) {
        let got = idx.query_top_n(&q, 10, &none);
        let want = oracle.top_n(&q, 10, &none);
        let got_ids: Vec<&str> = got.iter().map(|m| m.pair_id.as_str()).collect();
        let want_ids: Vec<&str> = want.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(got_ids, want_ids, "query {q:?}");
        for (m, (_, s)) in got.iter().zip(&want) {
            assert!(rel_close(m.score, *s, 1e-9), "{} vs {s}", m.score);
        }
    }
}

#[test]
fn bm25_score_agrees_with_oracle_for_other_params() {
    let params = Bm25Params::new(0.5, 0.3).unwrap();
    let tm = random_tm(200, 60, 8);
    let idx = TmIndex::build(&tm, params).unwrap();
    let oracle = BruteForce::new(&tm, params);
    for q in random_queries(20, 60, 9) {
        let terms = analyze_for_index(&q);
        for d in (0..200).step_by(7) {
            let got = idx.bm25_score(&terms, d as u32).unwrap();
            let want = oracle.score(&terms, d);
            assert!(rel_close(got, want, 1e-12), "{got} vs {want}");
        }
    }
}

#[test]
fn persisted_index_answers_identically() {
    let tm = random_tm(1000, 300, 21);
    let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tm.idx");
    idx.save(&path).unwrap();
    let loaded = TmIndex::load(&path).unwrap();
    assert_eq!(loaded.to_bytes(), std::fs::read(&path).unwrap());
    let none = HashSet::new();
    for q in random_queries(100, 300, 22) {
        assert_eq!(idx.query_top_n(&q, 10, &none), loaded.query_top_n(&q, 10, &none));
    }
}

fn small_tm() -> impl Strategy<Value = TranslationMemory> {
    proptest::collection::vec(proptest::collection::vec(0u8..12, 1..8), 1..25).prop_map(|docs| {
        let pairs = docs
            .into_iter()
            .enumerate()
            .map(|(i, words)| {
                let src: Vec<String> = words.iter().map(|w| format!("t{w}")).collect();
                SentencePair::new(format!("d{i:02}"), "x", src.join(" "), format!("T{i}"))
            })
            .collect();
        TranslationMemory::new("p", pairs).unwrap()
    })
}

proptest! {
    #[test]
    fn exclusions_are_never_returned(
        tm in small_tm(),
        query in proptest::collection::vec(0u8..14, 1..6),
        excl_mask in proptest::collection::vec(any::<bool>(), 25),
        n in 1usize..12,
    ) {
        let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();
        let excl: HashSet<String> = tm
            .pairs()
            .iter()
            .zip(&excl_mask)
            .filter(|(_, &m)| m)
            .map(|(p, _)| p.id.clone())
            .collect();
        let q: Vec<String> = query.iter().map(|w| format!("t{w}")).collect();
        let text = q.join(" ");
        let hits = idx.query_top_n(&text, n, &excl);
        prop_assert!(hits.len() <= n);
        prop_assert!(hits.iter().all(|m| !excl.contains(&m.pair_id) && m.score > 0.0));
        for (i, m) in hits.iter().enumerate() {
            prop_assert_eq!(m.rank, i + 1);
        }
        prop_assert!(hits.windows(2).all(|w| w[0].score >= w[1].score));
        prop_assert_eq!(&hits, &idx.query_top_n(&text, n, &excl));

        let oracle = BruteForce::new(&tm, Bm25Params::default());
        let want: Vec<String> = oracle.top_n(&text, n, &excl).into_iter().map(|(id, _)| id).collect();
        let got: Vec<String> = hits.into_iter().map(|m| m.pair_id).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn extra_occurrence_never_lowers_single_term_score(
        tm in small_tm(),
        doc_pick in any::<prop::sample::Index>(),
        term in 0u8..12,
        k1 in 0.01f64..3.0,
        b in 0.0f64..=1.0,
    ) {
        let params = Bm25Params::new(k1, b).unwrap();
        let d = doc_pick.index(tm.len());
        let term = format!("t{term}");
        let before = TmIndex::build(&tm, params).unwrap().bm25_score(&[&term], d as u32).unwrap();

        let mut pairs = tm.pairs().to_vec();
        pairs[d].source.push(' ');
        pairs[d].source.push_str(&term);
        let grown = TranslationMemory::new("p", pairs).unwrap();
        let after = TmIndex::build(&grown, params).unwrap().bm25_score(&[&term], d as u32).unwrap();
        prop_assert!(after >= before - 1e-12, "{before} -> {after}");
    }
}
