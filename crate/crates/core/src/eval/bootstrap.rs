use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bleu::BleuStats;
use crate::seed::keyed_rng;
use crate::{Error, Result};

pub const DEFAULT_BOOTSTRAP: usize = 1000;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub p_value: f64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    /// BLEU(A) - BLEU(B) on the full test set.
    pub observed_delta: f64,
    pub n_samples: usize,
    pub threshold: f64,
    pub significant: bool,
    pub bleu_a: f64,
    pub bleu_b: f64,
}

/// Paired bootstrap resampling over sentences.
///
/// Each resample draws `|refs|` sentence indices with replacement and
/// rescores both systems. The p-value is the share of resamples whose delta
/// does not strictly agree in sign with the observed delta; ties count
/// against significance. A zero observed delta gives p = 1.
pub fn paired_bootstrap<A, B, R>(
    hyps_a: &[A],
    hyps_b: &[B],
    refs: &[R],
    n_samples: usize,
    threshold: f64,
    seed: u64,
) -> Result<SignificanceResult>
where
    A: AsRef<str> + Sync,
    B: AsRef<str> + Sync,
    R: AsRef<str> + Sync,
{
    if hyps_a.len() != refs.len() || hyps_b.len() != refs.len() {
        return Err(Error::Contract(format!(
            "system A has {} lines, system B {}, references {}",
            hyps_a.len(),
            hyps_b.len(),
            refs.len()
        )));
    }
    if refs.is_empty() {
        return Err(Error::Contract("bootstrap needs at least one sentence".into()));
    }
    if n_samples == 0 {
        return Err(Error::Contract("n_samples must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Contract(format!("threshold {threshold} outside [0, 1]")));
    }

    let stats = |hyps: &[&str]| -> Vec<BleuStats> {
        hyps.par_iter()
            .zip(refs.par_iter())
            .map(|(h, r)| BleuStats::sentence(h, r.as_ref()))
            .collect()
    };
    let a: Vec<&str> = hyps_a.iter().map(AsRef::as_ref).collect();
    let b: Vec<&str> = hyps_b.iter().map(AsRef::as_ref).collect();
    let (stats_a, stats_b) = (stats(&a), stats(&b));

    let total = |s: &[BleuStats]| {
        s.iter().fold(BleuStats::default(), |mut acc, x| {
            acc += x;
            acc
        })
    };
    let bleu_a = total(&stats_a).score().score;
    let bleu_b = total(&stats_b).score().score;
    let observed_delta = bleu_a - bleu_b;

    let m = refs.len();
    let deltas: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed_rng(seed, &(i as u64).to_le_bytes());
            let mut sa = BleuStats::default();
            let mut sb = BleuStats::default();
            for _ in 0..m {
                let j = rng.random_range(0..m);
                sa += &stats_a[j];
                sb += &stats_b[j];
            }
            sa.score().score - sb.score().score
        })
        .collect();

    let wins_a = deltas.iter().filter(|&&d| d > 0.0).count();
    let wins_b = deltas.iter().filter(|&&d| d < 0.0).count();
    let ties = n_samples - wins_a - wins_b;
    let against = if observed_delta > 0.0 {
        wins_b + ties
    } else if observed_delta < 0.0 {
        wins_a + ties
    } else {
        n_samples
    };
    let p_value = against as f64 / n_samples as f64;
    Ok(SignificanceResult {
        p_value,
        wins_a,
        wins_b,
        ties,
        observed_delta,
        n_samples,
        threshold,
        significant: observed_delta != 0.0 && p_value < threshold,
        bleu_a,
        bleu_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refs(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| format!("sentence number {i} has a few words in it"))
            .collect()
    }

    #[test]
    fn identical_systems() {
        let r = refs(50);
        let h: Vec<String> = r.iter().map(|s| s.replace("few", "some")).collect();
        let res = paired_bootstrap(&h, &h, &r, 200, 0.05, 1).unwrap();
        assert_eq!(res.ties, 200);
        assert_eq!(res.p_value, 1.0);
        assert!(!res.significant);
    }

    #[test]
    fn dominance() {
        let r = refs(200);
        let empty = vec![String::new(); 200];
        let res = paired_bootstrap(&r, &empty, &r, 1000, 0.05, 3).unwrap();
        assert_eq!(res.wins_a, 1000);
        assert_eq!(res.p_value, 0.0);
        assert!(res.significant);
    }

    #[test]
    fn deterministic_and_symmetric() {
        let r = refs(40);
        let a: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| if i % 3 == 0 { "nothing".into() } else { s.clone() })
            .collect();
        let b: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| if i % 2 == 0 { "nothing".into() } else { s.clone() })
            .collect();
        let ab = paired_bootstrap(&a, &b, &r, 300, 0.05, 9).unwrap();
        assert_eq!(ab, paired_bootstrap(&a, &b, &r, 300, 0.05, 9).unwrap());
        let ba = paired_bootstrap(&b, &a, &r, 300, 0.05, 9).unwrap();
        assert_eq!(ab.wins_a, ba.wins_b);
        assert_eq!(ab.wins_b, ba.wins_a);
        assert_eq!(ab.observed_delta, -ba.observed_delta);
        if ab.ties == 0 {
            assert_eq!(ab.p_value, ba.p_value);
        }
        assert_eq!(ab.wins_a + ab.wins_b + ab.ties, 300);
    }

    #[test]
    fn contract_errors() {
        let r = refs(3);
        assert!(paired_bootstrap(&r[..2], &r, &r, 10, 0.05, 0).is_err());
        assert!(paired_bootstrap(&r, &r, &r, 0, 0.05, 0).is_err());
    }
}
