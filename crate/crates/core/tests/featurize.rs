use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shotzone_core::domain::{AggressionLabel, Bounce, BowlingAngle, CoarseLength, FieldAngle, Handedness, Sector, ShotLabel};
use shotzone_core::featurize::{
    aux_unit, aux_names, aux_vector, blend, build_features, export_feature_vectors, BattingProfile, BattingRecord,
    BowlingProfile, BowlingRecord, ContextVector, GlobalStats, ProfileRecord, AUX_LEN, CONTEXT_LEDGER, LOOKBACK, WINDOW,
};
use shotzone_core::ingest::{synthesize, ArchetypeSet, BowlerStyle, Corpus, Delivery, MatchFormat, Role, SignalStrength};

mod common;

use common::*;

#[test]
fn rolling_windows_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for h in 0..1_000 {
        let len = rng.gen_range(1..=2_000);
        let mut checkpoints: BTreeSet<usize> = (0..4).map(|_| rng.gen_range(1..=len)).collect();
        checkpoints.insert(len);
        if len > WINDOW {
            checkpoints.insert(WINDOW);
            checkpoints.insert(WINDOW + 1);
        }
        if h % 2 == 0 {
            let history: Vec<BattingRecord> = (0..len).map(|_| random_batting(&mut rng)).collect();
            let mut p = BattingProfile::new("p");
            for (i, r) in history.iter().enumerate() {
                p.push(*r);
                if checkpoints.contains(&(i + 1)) {
                    let window = &history[(i + 1).saturating_sub(WINDOW)..=i];
                    assert_eq!(p.window().len(), window.len());
                    assert_close(&p.stats(), &batting_oracle(window), 1e-10, "batting");
                }
            }
            assert_eq!(p.n_seen(), len as u64);
        } else {
            let history: Vec<BowlingRecord> = (0..len).map(|_| random_bowling(&mut rng)).collect();
            let mut p = BowlingProfile::new("p");
            for (i, r) in history.iter().enumerate() {
                p.push(*r);
                if checkpoints.contains(&(i + 1)) {
                    let window = &history[(i + 1).saturating_sub(WINDOW)..=i];
                    assert_close(&p.stats(), &bowling_oracle(window), 1e-10, "bowling");
                }
            }
        }
    }
}

#[test]
fn evicted_records_stop_counting() {
    let mut p = BattingProfile::new("p");
    let six = BattingRecord {
        length: CoarseLength::Short,
        aggression: AggressionLabel::Attacking,
        sector: Some(Sector::MidWicket),
        runs: 6,
        wicket: false,
        vs_pace: true,
    };
    let leave = BattingRecord { aggression: AggressionLabel::Defensive, sector: None, runs: 0, ..six };
    p.push(six);
    for _ in 0..WINDOW {
        p.push(leave);
    }
    let s = p.stats();
    let names = BattingRecord::names();
    let at = |n: &str| s[names.iter().position(|x| x == n).unwrap()];
    assert_eq!(at("bat_defensive_proportion"), Some(1.0));
    assert_eq!(at("bat_strike_rate"), Some(0.0));
    assert_eq!(at("bat_share_MidWicket"), None);
}

fn delivery(i: u32, bounce: Bounce, shot: &str, angle: Option<f64>, runs: u8, wicket: bool, line: f64) -> Delivery {
    Delivery {
        match_id: "M1".into(),
        date: NaiveDate::from_ymd_opt(2020, 2, 1).unwrap(),
        format: MatchFormat::ODI,
        innings_index: 1,
        over_number: i / 6,
        ball_in_over: (i % 6 + 1) as u8,
        batsman_id: "A".into(),
        non_striker_id: "B".into(),
        bowler_id: "Z".into(),
        batsman_hand: Handedness::Right,
        bowler_hand: Handedness::Right,
        bowler_style: if i < 6 { BowlerStyle::Fast } else { BowlerStyle::FingerSpin },
        bowling_angle: BowlingAngle::OverTheWicket,
        speed_kmh: 120.0,
        line_offset_m: line,
        bounce,
        swing_deg: 0.0,
        turn_deg: 0.0,
        bounce_height_m: 0.5,
        release_height_m: 2.0,
        shot_label: Some(ShotLabel::parse(shot).unwrap()),
        shot_angle: angle.map(FieldAngle::new),
        runs,
        wicket,
        team_runs_before: 0,
        team_wickets_before: 0,
    }
}

fn ten_balls() -> Vec<Delivery> {
    use Bounce::{At, FullToss};
    vec![
        delivery(0, At(1.0), "Forward Defensive", None, 0, false, 0.1),
        delivery(1, At(4.0), "Drive", Some(50.0), 4, false, 0.3),
        delivery(2, At(4.0), "Pushed", Some(10.0), 1, false, 0.2),
        delivery(3, At(7.0), "Leave", None, 0, false, 0.6),
        delivery(4, At(9.0), "Cut", Some(130.0), 0, true, 0.5),
        delivery(5, At(12.0), "Pull", Some(290.0), 6, false, -0.1),
        delivery(6, At(12.0), "Worked", Some(250.0), 2, false, 0.0),
        delivery(7, FullToss, "Flick", Some(300.0), 4, false, -0.2),
        delivery(8, At(7.5), "Steer", Some(170.0), 1, false, 0.4),
        delivery(9, At(7.0), "Backward Defensive", None, 0, false, 0.2),
    ]
}

#[test]
fn hand_built_profile_matches_manual_recompute() {
    let mut bat = BattingProfile::new("A");
    let mut bowl = BowlingProfile::new("Z");
    for d in ten_balls() {
        bat.update(&d).unwrap();
        bowl.update(&d).unwrap();
    }
    let s7 = 1.0 / 7.0;
    #[rustfmt::skip]
    let batting = [
        0.5, 2.0, 0.0,      // yorker and full toss: balls 1, 8
        0.5, 2.5, 0.0,      // full: 2, 3
        0.25, 0.25, 0.25,   // good and back of a length: 4, 5, 9, 10
        0.5, 4.0, 0.0,      // short: 6, 7
        s7, s7, 0.0, s7, s7, 0.0, s7, 2.0 * s7, 0.0,
        180.0, 0.4, 0.3, 0.3, 0.4,
        0.5, 0.25,
    ];
    #[rustfmt::skip]
    let bowling = [
        2.0, 0.5, 0.5,
        2.5, 0.0, 0.5,
        0.25, 0.75, 0.0,
        4.0, 0.0, 0.5,
        10.8, 0.4, 0.3, 0.1,
        0.06f64.sqrt(), 15.3025f64.sqrt(),
    ];
    let want_bat: Vec<Option<f64>> = batting.iter().map(|v| Some(*v)).collect();
    let want_bowl: Vec<Option<f64>> = bowling.iter().map(|v| Some(*v)).collect();
    assert_close(&bat.stats(), &want_bat, 1e-12, "batting");
    assert_close(&bowl.stats(), &want_bowl, 1e-12, "bowling");

    let globals = GlobalStats {
        batting: (0..28).map(|k| 0.1 + k as f64 * 0.01).collect(),
        bowling: (0..18).map(|k| 1.0 + k as f64 * 0.1).collect(),
    };
    let aux = aux_vector(&bat, &bowl, &globals);
    let w = 10.0 / 500.0;
    for k in 0..28 {
        let want = w * batting[k] + (1.0 - w) * globals.batting[k];
        assert!((aux.0[k] - want).abs() < 1e-12, "aux[{k}]");
    }
    for k in 0..18 {
        let want = w * bowling[k] + (1.0 - w) * globals.bowling[k];
        assert!((aux.0[28 + k] - want).abs() < 1e-12, "aux[{}]", 28 + k);
    }
}

#[test]
fn one_hundred_balls_blend_twenty_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bat = BattingProfile::new("A");
    let mut bowl = BowlingProfile::new("Z");
    for _ in 0..100 {
        bat.push(random_batting(&mut rng));
        bowl.push(random_bowling(&mut rng));
    }
    let globals = GlobalStats {
        batting: (0..28).map(|k| 0.3 + k as f64 * 0.02).collect(),
        bowling: (0..18).map(|k| 0.5 + k as f64 * 0.2).collect(),
    };
    let aux = aux_vector(&bat, &bowl, &globals);
    let personal = bat.stats();
    assert!(personal.iter().all(Option::is_some));
    for k in 0..28 {
        assert_eq!(aux.0[k], 0.2 * personal[k].unwrap() + 0.8 * globals.batting[k], "aux[{k}]");
    }
    assert_eq!(blend(3.0, 1.0, 0), 1.0);
    assert_eq!(blend(3.0, 1.0, 500), 3.0);
    assert_eq!(blend(3.0, 1.0, 800), 3.0);
}

fn corpus(n: usize, seed: u64) -> Corpus {
    synthesize(&ArchetypeSet::generate(8, 6, SignalStrength::High, seed), n, seed).unwrap()
}

#[test]
fn features_stay_in_documented_ranges() {
    let c = corpus(6_000, 21);
    let globals = GlobalStats::from_deliveries(c.deliveries());
    let (table, _) = build_features(&c, &globals);
    assert_eq!(table.len(), c.len());
    let names = aux_names();
    for i in 0..table.len() {
        for (k, (name, _, lo, hi)) in CONTEXT_LEDGER.iter().enumerate() {
            let v = table.context(i).0[k];
            assert!(v.is_finite() && *lo <= v && v <= *hi, "{name} = {v} at {i}");
        }
        for (k, name) in names.iter().enumerate() {
            let (_, lo, hi) = aux_unit(name);
            let v = table.aux(i).0[k];
            assert!(v.is_finite() && lo <= v && v <= hi, "{name} = {v} at {i}");
        }
    }
}

#[test]
fn frames_never_cross_innings() {
    let c = corpus(4_000, 22);
    let d = c.deliveries();
    let (table, _) = build_features(&c, &GlobalStats::from_deliveries(d));
    for i in 0..table.len() {
        let f = table.frame(i);
        assert!(!f.mask[LOOKBACK - 1]);
        assert_eq!(f.sequence[LOOKBACK - 1], *table.context(i));
        for slot in 0..LOOKBACK {
            let back = LOOKBACK - 1 - slot;
            if f.mask[slot] {
                assert_eq!(f.sequence[slot], ContextVector::ZERO);
                assert!(i < back || !d[i - back].same_innings(&d[i]));
            } else {
                assert!(d[i - back].same_innings(&d[i]));
                assert_eq!(f.sequence[slot], *table.context(i - back));
            }
        }
    }
}

#[test]
fn aux_uses_only_earlier_deliveries() {
    let c = corpus(3_000, 23);
    let d = c.deliveries();
    let globals = GlobalStats::from_deliveries(d);
    let (table, _) = build_features(&c, &globals);
    for i in (0..d.len()).step_by(137) {
        let mut bat = BattingProfile::new(d[i].batsman_id.clone());
        let mut bowl = BowlingProfile::new(d[i].bowler_id.clone());
        for e in &d[..i] {
            if e.batsman_id == d[i].batsman_id {
                bat.update(e).unwrap();
            }
            if e.bowler_id == d[i].bowler_id {
                bowl.update(e).unwrap();
            }
        }
        assert_eq!(*table.aux(i), aux_vector(&bat, &bowl, &globals), "delivery {i}");
    }
}

#[test]
fn mirrored_corpus_gives_identical_features() {
    let c = corpus(4_000, 24);
    let globals = GlobalStats::from_deliveries(c.deliveries());
    let mirrored = Corpus::new(c.deliveries().iter().map(Delivery::mirrored).collect()).unwrap();
    let (a, _) = build_features(&c, &globals);
    let (b, _) = build_features(&mirrored, &globals);
    assert_eq!(GlobalStats::from_deliveries(mirrored.deliveries()), globals);
    for i in 0..a.len() {
        assert_eq!(a.frame(i), b.frame(i));
    }
}

#[test]
fn export_lists_players_with_enough_matches() {
    let set = ArchetypeSet::generate(3, 4, SignalStrength::High, 31);
    let c = synthesize(&set, 12_000, 31).unwrap();
    let (_, store) = build_features(&c, &GlobalStats::from_deliveries(c.deliveries()));

    let mut seen: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for d in c.deliveries() {
        seen.entry(&d.batsman_id).or_default().insert(&d.match_id);
    }
    let qualifying: Vec<&str> = seen.iter().filter(|(_, m)| m.len() >= 10).map(|(id, _)| *id).collect();
    assert_eq!(qualifying.len(), 3);

    let table = export_feature_vectors(&store, Role::Batsman);
    assert_eq!(table.columns.len(), 28);
    let ids: Vec<&str> = table.rows.iter().map(|(id, _)| id.as_str()).collect();
    assert_eq!(ids, qualifying);
    for (id, values) in &table.rows {
        assert_eq!(values.len(), 28);
        assert_eq!(*values, store.batting(id).unwrap().stats());
    }

    let early = c.slice(0..c.match_ranges()[4].end);
    let (_, store) = build_features(&early, &GlobalStats::from_deliveries(early.deliveries()));
    assert!(export_feature_vectors(&store, Role::Batsman).rows.is_empty());
    assert_eq!(export_feature_vectors(&store, Role::Bowler).columns.len(), 18);

    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("player_id,bat_yorker_aggression_share"));
}

#[test]
fn aux_length_is_fixed() {
    assert_eq!(aux_names().len(), AUX_LEN);
}
