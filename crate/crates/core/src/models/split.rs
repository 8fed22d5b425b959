use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::ingest::Corpus;

/// Delivery index ranges of a chronological split. Both sides hold whole matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

/// Holds out the latest matches so that about `holdout_fraction` of the
/// deliveries are in the test side. The boundary is the match boundary whose
/// train share is closest to `1 - holdout_fraction`; both sides keep at least
/// one match when the corpus has two or more.
pub fn split_chronological(corpus: &Corpus, holdout_fraction: f64) -> Result<Split, ModelError> {
    split_ranges(&corpus.match_ranges(), corpus.len(), holdout_fraction)
}

pub(crate) fn split_ranges(matches: &[Range<usize>], total: usize, holdout_fraction: f64) -> Result<Split, ModelError> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(ModelError::Config(format!("holdout fraction {holdout_fraction} not in (0, 1)")));
    }
    if matches.len() < 2 {
        return Err(ModelError::Config(format!("{} match(es) cannot be split", matches.len())));
    }
    let goal = (1.0 - holdout_fraction) * total as f64;
    let mut best = 1;
    let mut best_gap = f64::INFINITY;
    for k in 1..matches.len() {
        let gap = (matches[k].start as f64 - goal).abs();
        if gap < best_gap {
            best_gap = gap;
            best = k;
        }
    }
    let cut = matches[best].start;
    Ok(Split { train: 0..cut, test: cut..total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equal_matches(n: usize, len: usize) -> Vec<Range<usize>> {
        (0..n).map(|i| i * len..(i + 1) * len).collect()
    }

    #[test]
    fn ten_matches_hold_out_two() {
        let s = split_ranges(&equal_matches(10, 500), 5000, 0.2).unwrap();
        assert_eq!(s.test, 4000..5000);
        assert_eq!(s.train, 0..4000);
    }

    #[test]
    fn large_corpus_fraction() {
        let s = split_ranges(&equal_matches(860, 500), 430_000, 0.2).unwrap();
        assert_eq!(s.test.len(), 86_000);
    }

    #[test]
    fn invalid_fraction() {
        for f in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(split_ranges(&equal_matches(3, 10), 30, f), Err(ModelError::Config(_))));
        }
    }

    #[test]
    fn tiny_fraction_still_holds_out_a_match() {
        let s = split_ranges(&equal_matches(3, 10), 30, 0.001).unwrap();
        assert_eq!(s.test, 20..30);
    }
}
