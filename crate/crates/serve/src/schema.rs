//! The published request and response document for the HTTP API.

use serde_json::{json, Value};

use shotzone_core::domain::{BowlingAngle, LengthBand, LineBand, ZoneId, MAX_LINE_OFFSET_M, TAXONOMY_VERSION};
use shotzone_core::ingest::{BowlerStyle, MatchFormat};

pub const API_VERSION: u32 = 1;

/// Largest grid accepted by `POST /api/simulate`.
pub const MAX_GRID_CELLS: usize = 4096;

fn names<T: std::fmt::Debug>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|t| format!("{t:?}")).collect()
}

fn scenario_fields() -> Value {
    json!({
        "batsman_id": {"type": "string", "required": true},
        "bowler_id": {"type": "string", "required": true},
        "batsman_hand": {"type": "enum", "values": ["Right", "Left"], "default": "from the player directory"},
        "bowler_hand": {"type": "enum", "values": ["Right", "Left"], "default": "from the player directory"},
        "bowler_style": {"type": "enum", "values": names(BowlerStyle::ALL), "default": "from the player directory"},
        "delivery": {
            "type": "object",
            "required": true,
            "fields": {
                "line": {"required": true, "oneOf": [
                    {"type": "enum", "values": names(LineBand::ALL)},
                    {"type": "number", "unit": "m off middle stump, striker's off side positive",
                     "range": [-MAX_LINE_OFFSET_M, MAX_LINE_OFFSET_M]}
                ]},
                "length": {"required": true, "oneOf": [
                    {"type": "enum", "values": names(LengthBand::ALL)},
                    {"type": "number", "unit": "m from the batting crease"}
                ]},
                "bowling_angle": {"type": "enum", "values": names(BowlingAngle::ALL), "default": "OverTheWicket"},
                "speed_kmh": {"type": "number", "range": [40, 165], "default": "typical for the bowling style"},
                "swing_deg": {"type": "number", "range": [-45, 45], "default": 0},
                "turn_deg": {"type": "number", "range": [-45, 45], "default": "0 for pace, 3 for spin"},
                "bounce_height_m": {"type": "number", "range": [0, 5]},
                "release_height_m": {"type": "number", "range": [1, 2.6]}
            }
        },
        "match": {
            "type": "object",
            "fields": {
                "format": {"type": "enum", "values": names([MatchFormat::ODI, MatchFormat::T20]), "default": "ODI"},
                "innings": {"type": "integer", "range": [1, 2], "default": 1},
                "over": {"type": "integer", "note": "0-based", "default": 10},
                "ball": {"type": "integer", "range": [1, 6], "default": 1},
                "score": {"type": "integer", "default": 50},
                "wickets": {"type": "integer", "range": [0, 9], "default": 1},
                "target": {"type": "integer", "note": "second innings only"}
            }
        },
        "batsman": {
            "type": "object",
            "fields": {
                "runs": {"type": "integer", "default": 0},
                "balls_faced": {"type": "integer", "default": 0},
                "batting_position": {"type": "integer", "range": [1, 11], "default": 3}
            }
        },
        "history": {"type": "array", "items": "context vector of 39 numbers", "maxItems": 5, "default": []}
    })
}

fn summary_fields() -> Value {
    json!({
        "p_defensive": "number", "p_rotate": "number", "p_attack": "number", "p_deflect": "number",
        "off_side_share": "number or null", "leg_side_share": "number or null",
        "top_zones": "array of {zone, probability}, at most 3"
    })
}

pub fn api_document() -> Value {
    let zones: Vec<String> = ZoneId::all().map(|z| z.name()).collect();
    json!({
        "api_version": API_VERSION,
        "taxonomy_version": TAXONOMY_VERSION,
        "zones": zones,
        "endpoints": {
            "GET /api/players": {
                "response": "array of {id, name, hand, roles, bowling_hand, bowler_style, batting, bowling}; \
                             each profile is {n_seen, matches, blend_weight}"
            },
            "GET /api/model": {"response": "bundle manifest"},
            "GET /api/taxonomy": {"response": "shot, zone and band tables"},
            "GET /api/schema": {"response": "this document"},
            "POST /api/predict": {
                "request": {"type": "object", "fields": scenario_fields(),
                            "optional": {"taxonomy_version": "integer; rejected when it differs"}},
                "response": {
                    "batsman_id": "string", "bowler_id": "string",
                    "batsman_hand": "Right or Left; zones are relative to this batsman",
                    "bowler_hand": "Right or Left", "bowler_style": "string",
                    "distribution": "object mapping each of the 17 zone names to a probability",
                    "summary": summary_fields(),
                    "model": {"kind": "string", "taxonomy_version": "integer", "seed": "integer", "corpus_digest": "string"}
                },
                "errors": {"400": "{error, fields: [{field, message}]}", "404": "unknown player", "503": "model reloading"}
            },
            "POST /api/simulate": {
                "request": {
                    "base": "scenario, as for /api/predict",
                    "bowlers": "array of bowler ids",
                    "angles": names(BowlingAngle::ALL),
                    "phases": ["0-9", ">60"],
                    "lines": "array of line values",
                    "lengths": "array of length values"
                },
                "rules": "absent axes keep the base value; left-arm pace bowlers contribute only the first angle; \
                          rows are ordered bowler, angle, phase, line, length",
                "limit": MAX_GRID_CELLS,
                "response": {
                    "n_rows": "integer",
                    "rows": "array of {bowler_id, bowler_hand, angle, phase, line, length, summary, distribution}",
                    "phase_deltas": "array of {bowler_id, bowler_hand, start_attack, set_attack, delta_points}",
                    "model": "as for /api/predict"
                },
                "errors": {"400": "as for /api/predict", "404": "unknown player", "413": "grid too large", "503": "model reloading"}
            },
            "POST /api/reload": {"response": "{reloaded: true, model}", "errors": {"500": "bundle could not be loaded"}}
        }
    })
}
