//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use shotzone_core::domain::{AggressionLabel, Bounce, CoarseLength, Sector};
use shotzone_core::featurize::{BattingRecord, BowlingRecord};

pub fn random_batting(rng: &mut ChaCha8Rng) -> BattingRecord {
    let aggression = [AggressionLabel::Defensive, AggressionLabel::Working, AggressionLabel::Attacking][rng.gen_range(0..3)];
    BattingRecord {
        length: CoarseLength::ALL[rng.gen_range(0..4)],
        aggression,
        sector: (aggression != AggressionLabel::Defensive).then(|| Sector::ALL[rng.gen_range(0..9)]),
        runs: [0, 0, 1, 1, 2, 3, 4, 6][rng.gen_range(0..8)],
        wicket: rng.gen_bool(0.05),
        vs_pace: rng.gen_bool(0.6),
    }
}

pub fn random_bowling(rng: &mut ChaCha8Rng) -> BowlingRecord {
    let full_toss = rng.gen_bool(0.03);
    let distance = if full_toss { 0.0 } else { rng.gen_range(0.0..20.0) };
    BowlingRecord {
        length: if full_toss { CoarseLength::Yorker } else { CoarseLength::of(Bounce::At(distance)).unwrap() },
        runs: [0, 0, 0, 1, 1, 2, 4, 6][rng.gen_range(0..8)],
        wicket: rng.gen_bool(0.04),
        line_offset_m: rng.gen_range(-1.6..1.6),
        bounce_distance_m: distance,
    }
}

pub fn share(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Each statistic recomputed by filtering the window, no shared running sums.
pub fn batting_oracle(w: &[BattingRecord]) -> Vec<Option<f64>> {
    let attacking = |r: &&&BattingRecord| r.aggression == AggressionLabel::Attacking;
    let mut out = Vec::new();
    for band in CoarseLength::ALL {
        let b: Vec<&BattingRecord> = w.iter().filter(|r| r.length == band).collect();
        out.push(share(b.iter().filter(attacking).count(), b.len()));
        out.push((!b.is_empty()).then(|| b.iter().map(|r| r.runs as f64).sum::<f64>() / b.len() as f64));
        out.push(share(b.iter().filter(|r| r.wicket).count(), b.len()));
    }
    let hits = w.iter().filter(|r| r.sector.is_some()).count();
    for s in Sector::ALL {
        out.push(share(w.iter().filter(|r| r.sector == Some(s)).count(), hits));
    }
    let all: Vec<&BattingRecord> = w.iter().collect();
    out.push((!all.is_empty()).then(|| 100.0 * all.iter().map(|r| r.runs as f64).sum::<f64>() / all.len() as f64));
    out.push(share(all.iter().filter(attacking).count(), all.len()));
    out.push(share(all.iter().filter(|r| r.aggression == AggressionLabel::Defensive).count(), all.len()));
    out.push(share(all.iter().filter(|r| r.runs == 4 || r.runs == 6).count(), all.len()));
    out.push(share(all.iter().filter(|r| r.runs == 0).count(), all.len()));
    for pace in [true, false] {
        let b: Vec<&BattingRecord> = w.iter().filter(|r| r.vs_pace == pace).collect();
        out.push(share(b.iter().filter(attacking).count(), b.len()));
    }
    out
}

pub fn population_sd(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    Some((xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt())
}

pub fn bowling_oracle(w: &[BowlingRecord]) -> Vec<Option<f64>> {
    let mut out = Vec::new();
    for band in CoarseLength::ALL {
        let b: Vec<&BowlingRecord> = w.iter().filter(|r| r.length == band).collect();
        out.push((!b.is_empty()).then(|| b.iter().map(|r| r.runs as f64).sum::<f64>() / b.len() as f64));
        out.push(share(b.iter().filter(|r| r.runs == 0).count(), b.len()));
        out.push(share(b.iter().filter(|r| r.runs == 4 || r.runs == 6).count(), b.len()));
    }
    let n = w.len();
    out.push((n > 0).then(|| 6.0 * w.iter().map(|r| r.runs as f64).sum::<f64>() / n as f64));
    out.push(share(w.iter().filter(|r| r.runs == 0).count(), n));
    out.push(share(w.iter().filter(|r| r.runs == 4 || r.runs == 6).count(), n));
    out.push(share(w.iter().filter(|r| r.wicket).count(), n));
    out.push(population_sd(&w.iter().map(|r| r.line_offset_m).collect::<Vec<_>>()));
    out.push(population_sd(&w.iter().map(|r| r.bounce_distance_m).collect::<Vec<_>>()));
    out
}

pub fn assert_close(got: &[Option<f64>], want: &[Option<f64>], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len());
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        match (g, w) {
            (None, None) => {}
            (Some(g), Some(w)) => assert!((g - w).abs() < tol, "{what}[{k}]: {g} vs {w}"),
            _ => panic!("{what}[{k}]: {g:?} vs {w:?}"),
        }
    }
}

