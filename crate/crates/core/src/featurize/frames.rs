use std::collections::HashMap;

use super::aux::{aux_vector, AuxVector, GlobalStats};
use super::context::{innings_contexts, ContextVector};
use super::profile::{BattingProfile, BowlingProfile};
use super::store::ProfileStore;
use crate::domain::ZoneId;
use crate::ingest::{target_of, Corpus, Delivery};

/// Deliveries per input sequence, the current one included.
pub const LOOKBACK: usize = 6;

/// One model input.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    /// Oldest first; the current delivery is last.
    pub sequence: [ContextVector; LOOKBACK],
    /// `true` marks a zero-padded slot before the innings start.
    pub mask: [bool; LOOKBACK],
    pub aux: AuxVector,
    pub target: Option<ZoneId>,
}

/// Lookback window ending at delivery `i` of one innings.
pub fn sequence_window(innings: &[ContextVector], i: usize) -> ([ContextVector; LOOKBACK], [bool; LOOKBACK]) {
    assert!(i < innings.len(), "window index {i} outside an innings of {}", innings.len());
    let mut seq = [ContextVector::ZERO; LOOKBACK];
    let mut mask = [true; LOOKBACK];
    for slot in 0..LOOKBACK {
        let back = LOOKBACK - 1 - slot;
        if back <= i {
            seq[slot] = innings[i - back];
            mask[slot] = false;
        }
    }
    (seq, mask)
}

/// Per-delivery features for a whole corpus, aligned with its delivery order.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    contexts: Vec<ContextVector>,
    aux: Vec<AuxVector>,
    targets: Vec<Option<ZoneId>>,
    innings: Vec<std::ops::Range<usize>>,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context(&self, i: usize) -> &ContextVector {
        &self.contexts[i]
    }

    pub fn aux(&self, i: usize) -> &AuxVector {
        &self.aux[i]
    }

    pub fn target(&self, i: usize) -> Option<ZoneId> {
        self.targets[i]
    }

    pub fn frame(&self, i: usize) -> FeatureFrame {
        let r = self.innings[i].clone();
        let (sequence, mask) = sequence_window(&self.contexts[r.clone()], i - r.start);
        FeatureFrame {
            sequence,
            mask,
            aux: self.aux[i],
            target: self.targets[i],
        }
    }

    /// Frames with a target, for deliveries in `range`.
    pub fn labelled_frames(&self, range: std::ops::Range<usize>) -> Vec<FeatureFrame> {
        range
            .filter(|&i| self.targets[i].is_some())
            .map(|i| self.frame(i))
            .collect()
    }
}

/// Chase target of each second innings: first-innings total plus one.
fn chase_targets(corpus: &Corpus) -> HashMap<String, u32> {
    let d = corpus.deliveries();
    corpus
        .innings_ranges()
        .into_iter()
        .filter(|r| d[r.start].innings_index == 1)
        .map(|r| {
            let last = &d[r.end - 1];
            (last.match_id.clone(), last.team_runs_before + last.runs as u32 + 1)
        })
        .collect()
}

/// Folds the corpus in order, producing features that use only earlier
/// deliveries, and the profiles as of its end.
pub fn build_features(corpus: &Corpus, globals: &GlobalStats) -> (FeatureTable, ProfileStore) {
    let targets_by_match = chase_targets(corpus);
    let d = corpus.deliveries();
    let mut batting: HashMap<String, BattingProfile> = HashMap::new();
    let mut bowling: HashMap<String, BowlingProfile> = HashMap::new();
    let mut table = FeatureTable {
        contexts: Vec::with_capacity(d.len()),
        aux: Vec::with_capacity(d.len()),
        targets: Vec::with_capacity(d.len()),
        innings: Vec::with_capacity(d.len()),
    };
    for range in corpus.innings_ranges() {
        let innings: &[Delivery] = &d[range.clone()];
        let target = match innings[0].innings_index {
            2 => targets_by_match.get(&innings[0].match_id).copied(),
            _ => None,
        };
        table.contexts.extend(innings_contexts(innings, target));
        for ball in innings {
            let bat = batting
                .entry(ball.batsman_id.clone())
                .or_insert_with(|| BattingProfile::new(&ball.batsman_id));
            let bowl = bowling
                .entry(ball.bowler_id.clone())
                .or_insert_with(|| BowlingProfile::new(&ball.bowler_id));
            table.aux.push(aux_vector(bat, bowl, globals));
            table.targets.push(target_of(ball).ok());
            table.innings.push(range.clone());
            bat.update(ball).expect("batsman is the striker");
            bowl.update(ball).expect("bowler delivered the ball");
        }
    }
    let store = ProfileStore::new(
        corpus.players().clone(),
        batting.into_iter().collect(),
        bowling.into_iter().collect(),
    );
    (table, store)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: usize) -> ContextVector {
        let mut v = ContextVector::ZERO;
        v.0[0] = k as f64 + 1.0;
        v
    }

    #[test]
    fn window_at_innings_start_is_padded() {
        let innings: Vec<_> = (0..10).map(ctx).collect();
        let (seq, mask) = sequence_window(&innings, 0);
        assert_eq!(mask, [true, true, true, true, true, false]);
        assert_eq!(seq[5], ctx(0));
        assert!(seq[..5].iter().all(|c| *c == ContextVector::ZERO));
    }

    #[test]
    fn window_in_the_middle_is_full() {
        let innings: Vec<_> = (0..10).map(ctx).collect();
        let (seq, mask) = sequence_window(&innings, 7);
        assert_eq!(mask, [false; 6]);
        let expected: Vec<_> = (2..=7).map(ctx).collect();
        assert_eq!(seq.to_vec(), expected);
    }
}
