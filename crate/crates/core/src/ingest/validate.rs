use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Corpus, Delivery, IngestError, PlayerInfo, Role};
use crate::domain::{self, Bounce, Handedness};
use super::BowlerStyle;

/// Field-level range checks for one delivery.
pub fn check_delivery(d: &Delivery) -> Result<(), (&'static str, String)> {
    fn fail<T>(field: &'static str, msg: impl Into<String>) -> Result<T, (&'static str, String)> {
        Err((field, msg.into()))
    }
    if d.match_id.is_empty() {
        return fail("match_id", "empty");
    }
    if !(1..=2).contains(&d.innings_index) {
        return fail("innings_index", format!("{} not in {{1, 2}}", d.innings_index));
    }
    if !(1..=6).contains(&d.ball_in_over) {
        return fail("ball_in_over", format!("{} not in [1, 6]", d.ball_in_over));
    }
    if d.over_number >= d.format.overs() {
        return fail(
            "over_number",
            format!("{} beyond a {}-over innings", d.over_number, d.format.overs()),
        );
    }
    for (field, id) in [
        ("batsman_id", &d.batsman_id),
        ("non_striker_id", &d.non_striker_id),
        ("bowler_id", &d.bowler_id),
    ] {
        if id.is_empty() {
            return fail(field, "empty");
        }
    }
    if d.batsman_id == d.non_striker_id {
        return fail("non_striker_id", "equals batsman_id");
    }
    if !(40.0..=165.0).contains(&d.speed_kmh) {
        return fail("speed_kmh", format!("{} not in [40, 165]", d.speed_kmh));
    }
    if !(d.line_offset_m.abs() <= domain::MAX_LINE_OFFSET_M) {
        return fail("line_offset_m", format!("{} beyond ±1.6", d.line_offset_m));
    }
    if let Bounce::At(x) = d.bounce {
        if !(0.0..=domain::MAX_BOUNCE_M).contains(&x) {
            return fail("bounce_distance_m", format!("{x} not in [0, 20]"));
        }
    }
    for (field, v) in [("swing_deg", d.swing_deg), ("turn_deg", d.turn_deg)] {
        if !v.is_finite() || v.abs() > 45.0 {
            return fail(field, format!("{v} not a plausible deviation"));
        }
    }
    if !(d.bounce_height_m >= 0.0 && d.bounce_height_m <= 5.0) {
        return fail("bounce_height_m", format!("{} not in [0, 5]", d.bounce_height_m));
    }
    if !(1.0..=2.6).contains(&d.release_height_m) {
        return fail("release_height_m", format!("{} not in [1, 2.6]", d.release_height_m));
    }
    if d.runs > 6 {
        return fail("runs", format!("{} not in [0, 6]", d.runs));
    }
    if d.team_wickets_before > 9 {
        return fail(
            "team_wickets_before",
            format!("{} not in [0, 9]", d.team_wickets_before),
        );
    }
    if d.shot_label.is_none() && d.shot_angle.is_some() {
        return fail("shot_angle_deg", "angle given without a shot");
    }
    Ok(())
}

/// Players referenced by deliveries. Display hand is the batting hand when the
/// player ever batted, otherwise the bowling arm.
pub fn derive_players(deliveries: &[Delivery]) -> Result<BTreeMap<String, PlayerInfo>, IngestError> {
    let mut batting: HashMap<&str, Handedness> = HashMap::new();
    let mut bowling: HashMap<&str, Handedness> = HashMap::new();
    let mut styles: HashMap<&str, BowlerStyle> = HashMap::new();
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    for (i, d) in deliveries.iter().enumerate() {
        styles.insert(d.bowler_id.as_str(), d.bowler_style);
        for (seen, id, hand, field) in [
            (&mut batting, d.batsman_id.as_str(), d.batsman_hand, "batsman_hand"),
            (&mut bowling, d.bowler_id.as_str(), d.bowler_hand, "bowler_hand"),
        ] {
            if *seen.entry(id).or_insert(hand) != hand {
                return Err(IngestError::Value {
                    row: i + 1,
                    field,
                    msg: format!("player {id} recorded with both hands"),
                });
            }
        }
        ids.extend([d.batsman_id.as_str(), d.non_striker_id.as_str(), d.bowler_id.as_str()]);
    }
    Ok(ids
        .into_iter()
        .map(|id| {
            let mut roles = BTreeSet::new();
            if batting.contains_key(id) {
                roles.insert(Role::Batsman);
            }
            if bowling.contains_key(id) {
                roles.insert(Role::Bowler);
            }
            let hand = batting
                .get(id)
                .or_else(|| bowling.get(id))
                .copied()
                .unwrap_or(Handedness::Right);
            (
                id.to_string(),
                PlayerInfo {
                    name: id.to_string(),
                    hand,
                    roles,
                    bowling_hand: bowling.get(id).copied(),
                    bowler_style: styles.get(id).copied(),
                },
            )
        })
        .collect())
}

pub(crate) fn build_corpus(deliveries: Vec<Delivery>) -> Result<Corpus, IngestError> {
    for (i, d) in deliveries.iter().enumerate() {
        check_delivery(d).map_err(|(field, msg)| IngestError::Value {
            row: i + 1,
            field,
            msg,
        })?;
    }

    let mut indexed: Vec<(usize, Delivery)> = deliveries.into_iter().enumerate().collect();
    indexed.sort_by(|a, b| a.1.sort_key().cmp(&b.1.sort_key()));

    let mut match_meta: HashMap<&str, (chrono::NaiveDate, super::MatchFormat)> = HashMap::new();
    for (row, d) in &indexed {
        let meta = match_meta.entry(&d.match_id).or_insert((d.date, d.format));
        if *meta != (d.date, d.format) {
            return Err(IngestError::Value {
                row: row + 1,
                field: "date",
                msg: format!("match {} has inconsistent date or format", d.match_id),
            });
        }
    }

    for w in indexed.windows(2) {
        let (_, a) = &w[0];
        let (row, b) = &w[1];
        if a.sort_key() == b.sort_key() {
            return Err(IngestError::Order {
                row: row + 1,
                key: format!(
                    "{}/{}/{}.{}",
                    b.match_id, b.innings_index, b.over_number, b.ball_in_over
                ),
            });
        }
        if a.same_innings(b) {
            if b.team_wickets_before < a.team_wickets_before {
                return Err(IngestError::Value {
                    row: row + 1,
                    field: "team_wickets_before",
                    msg: "decreases within the innings".into(),
                });
            }
            if b.team_runs_before < a.team_runs_before {
                return Err(IngestError::Value {
                    row: row + 1,
                    field: "team_runs_before",
                    msg: "decreases within the innings".into(),
                });
            }
        }
    }
    let sorted: Vec<Delivery> = indexed.into_iter().map(|(_, d)| d).collect();
    let players = derive_players(&sorted)?;
    Ok(Corpus::from_parts(sorted, players))
}

/// Every match id seen per player, used for export thresholds.
pub fn matches_per_player(corpus: &Corpus) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for d in corpus.deliveries() {
        for id in [&d.batsman_id, &d.non_striker_id, &d.bowler_id] {
            out.entry(id.clone()).or_default().insert(d.match_id.clone());
        }
    }
    out
}
