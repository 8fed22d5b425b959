use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{BowlerStyle, Corpus, Delivery, IngestError, MatchFormat};
use crate::domain::{Bounce, BowlingAngle, FieldAngle, Handedness, ShotLabel};

/// Corpus file columns, in order.
pub const COLUMNS: [&str; 26] = [
    "match_id",
    "date",
    "format",
    "innings_index",
    "over_number",
    "ball_in_over",
    "batsman_id",
    "non_striker_id",
    "bowler_id",
    "batsman_hand",
    "bowler_hand",
    "bowler_style",
    "bowling_angle",
    "speed_kmh",
    "line_offset_m",
    "bounce_distance_m",
    "swing_deg",
    "turn_deg",
    "bounce_height_m",
    "release_height_m",
    "shot_label",
    "shot_angle_deg",
    "runs",
    "wicket",
    "team_runs_before",
    "team_wickets_before",
];

/// Reads a corpus file: header row with exactly [`COLUMNS`], one delivery per row.
pub fn parse_corpus<R: Read>(source: R) -> Result<Corpus, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != COLUMNS {
        let missing: Vec<_> = COLUMNS.iter().filter(|c| !got.contains(c)).collect();
        let extra: Vec<_> = got.iter().filter(|c| !COLUMNS.contains(c)).collect();
        return Err(IngestError::Schema(format!(
            "header mismatch (missing: {missing:?}, unexpected: {extra:?}); expected columns in order {COLUMNS:?}"
        )));
    }
    let mut deliveries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != COLUMNS.len() {
            return Err(IngestError::Schema(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                COLUMNS.len()
            )));
        }
        deliveries.push(parse_row(row, &record)?);
    }
    Corpus::new(deliveries)
}

fn parse_row(row: usize, r: &csv::StringRecord) -> Result<Delivery, IngestError> {
    let field = |i: usize| r.get(i).unwrap_or("").trim();
    let bad = |i: usize, what: &str| IngestError::Value {
        row,
        field: COLUMNS[i],
        msg: format!("`{}` is not {what}", field(i)),
    };
    let num = |i: usize| -> Result<f64, IngestError> {
        field(i)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(i, "a finite number"))
    };
    let int = |i: usize| -> Result<i64, IngestError> {
        field(i).parse::<i64>().map_err(|_| bad(i, "an integer"))
    };
    let ranged = |i: usize, lo: i64, hi: i64| -> Result<i64, IngestError> {
        let v = int(i)?;
        if (lo..=hi).contains(&v) {
            Ok(v)
        } else {
            Err(IngestError::Value {
                row,
                field: COLUMNS[i],
                msg: format!("{v} not in [{lo}, {hi}]"),
            })
        }
    };
    let hand = |i: usize| Handedness::parse(field(i)).ok_or_else(|| bad(i, "R or L"));

    let shot_label = match field(20) {
        "" => None,
        s => Some(ShotLabel::parse(s).map_err(|e| IngestError::Value {
            row,
            field: COLUMNS[20],
            msg: e.to_string(),
        })?),
    };
    let shot_angle = match field(21) {
        "" => None,
        _ => Some(FieldAngle::new(num(21)?)),
    };
    let wicket = match field(23) {
        "true" | "1" => true,
        "false" | "0" => false,
        _ => return Err(bad(23, "a boolean")),
    };

    Ok(Delivery {
        match_id: field(0).to_string(),
        date: NaiveDate::parse_from_str(field(1), "%Y-%m-%d").map_err(|_| bad(1, "a YYYY-MM-DD date"))?,
        format: MatchFormat::parse(field(2)).ok_or_else(|| bad(2, "ODI or T20"))?,
        innings_index: ranged(3, 1, 2)? as u8,
        over_number: ranged(4, 0, 49)? as u32,
        ball_in_over: ranged(5, 1, 6)? as u8,
        batsman_id: field(6).to_string(),
        non_striker_id: field(7).to_string(),
        bowler_id: field(8).to_string(),
        batsman_hand: hand(9)?,
        bowler_hand: hand(10)?,
        bowler_style: BowlerStyle::parse(field(11)).ok_or_else(|| bad(11, "a bowler style"))?,
        bowling_angle: BowlingAngle::parse(field(12)).ok_or_else(|| bad(12, "over or around"))?,
        speed_kmh: num(13)?,
        line_offset_m: num(14)?,
        bounce: Bounce::parse(field(15))
            .filter(|b| b.distance().map_or(true, f64::is_finite))
            .ok_or_else(|| bad(15, "a distance or FT"))?,
        swing_deg: num(16)?,
        turn_deg: num(17)?,
        bounce_height_m: num(18)?,
        release_height_m: num(19)?,
        shot_label,
        shot_angle,
        runs: ranged(22, 0, 6)? as u8,
        wicket,
        team_runs_before: ranged(24, 0, u32::MAX as i64)? as u32,
        team_wickets_before: ranged(25, 0, 9)? as u8,
    })
}

/// Writes a corpus in the canonical column layout. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_corpus<W: Write>(corpus: &Corpus, out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for d in corpus.deliveries() {
        w.write_record([
            d.match_id.clone(),
            d.date.format("%Y-%m-%d").to_string(),
            d.format.code().to_string(),
            d.innings_index.to_string(),
            d.over_number.to_string(),
            d.ball_in_over.to_string(),
            d.batsman_id.clone(),
            d.non_striker_id.clone(),
            d.bowler_id.clone(),
            d.batsman_hand.code().to_string(),
            d.bowler_hand.code().to_string(),
            d.bowler_style.code().to_string(),
            d.bowling_angle.code().to_string(),
            d.speed_kmh.to_string(),
            d.line_offset_m.to_string(),
            d.bounce.to_string(),
            d.swing_deg.to_string(),
            d.turn_deg.to_string(),
            d.bounce_height_m.to_string(),
            d.release_height_m.to_string(),
            d.shot_label.map(|s| s.name().to_string()).unwrap_or_default(),
            d.shot_angle.map(|a| a.degrees().to_string()).unwrap_or_default(),
            d.runs.to_string(),
            d.wicket.to_string(),
            d.team_runs_before.to_string(),
            d.team_wickets_before.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn corpus_to_string(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("corpus text is UTF-8")
}

/// Hex SHA-256 of the canonical serialization.
pub fn corpus_digest(corpus: &Corpus) -> String {
    use sha2::{Digest, Sha256};
    let hash = Sha256::digest(corpus_to_string(corpus).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}
