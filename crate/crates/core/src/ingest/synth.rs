//! Synthetic corpora with planted batsman tendencies.
//!
//! Each batsman archetype fixes a favored-direction profile and an aggression
//! model; each ball's zone is drawn from [`zone_probabilities`], a closed form
//! that tests can evaluate directly.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{BowlerStyle, Corpus, Delivery, IngestError, MatchFormat};
use crate::domain::{
    mirror_angle, AggressionClass, AggressionLabel, Bounce, BowlingAngle, CoarseLength, FieldAngle,
    Handedness, LengthBand, Sector, ShotLabel, ZoneId, MAX_LINE_OFFSET_M,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalStrength {
    Low,
    High,
}

/// Per-batsman synthesis parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatsmanArchetype {
    pub id: String,
    pub hand: Handedness,
    /// Relative preference for each of the 9 sectors, in [`Sector::ALL`] order.
    pub sector_weights: [f64; 9],
    pub base_aggression: f64,
    /// Added aggression once settled (scaled by min(balls faced, 60) / 60).
    pub aggression_ramp: f64,
    /// Additive aggression shift per coarse length (yorker, full, good, short).
    pub length_sensitivity: [f64; 4],
    /// Additive aggression per 40 km/h above 120 km/h.
    pub speed_sensitivity: f64,
    /// Additive aggression per bowler style (Fast, FastMedium, FingerSpin, WristSpin).
    pub style_sensitivity: [f64; 4],
    pub defensive_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowlerArchetype {
    pub id: String,
    pub hand: Handedness,
    pub style: BowlerStyle,
    pub speed_kmh: f64,
    /// Weights over the six length bands (FullToss first).
    pub length_weights: [f64; 6],
    pub line_mean_m: f64,
    pub line_sd_m: f64,
    pub around_share: f64,
    /// Additive shift to the batsman's aggression; negative bowlers are harder to attack.
    pub menace: f64,
}

fn default_noise() -> f64 {
    0.05
}
fn default_t20_share() -> f64 {
    0.3
}
fn default_sequence_effect() -> f64 {
    0.15
}
fn default_length_tilt() -> f64 {
    8.0
}
fn default_line_tilt() -> f64 {
    5.0
}
fn default_extras_rate() -> f64 {
    0.02
}
fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date")
}

/// A player set plus global synthesis settings; the archetype file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSet {
    pub batsmen: Vec<BatsmanArchetype>,
    pub bowlers: Vec<BowlerArchetype>,
    /// Share of each ball's zone drawn uniformly over the 17 zones.
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_signal")]
    pub signal: SignalStrength,
    #[serde(default = "default_t20_share")]
    pub t20_share: f64,
    /// Extra aggression when the previous ball of the innings was short.
    #[serde(default = "default_sequence_effect")]
    pub sequence_effect: f64,
    /// How strongly length bends shot direction toward its natural sectors.
    #[serde(default = "default_length_tilt")]
    pub length_tilt: f64,
    /// Log-odds shift per metre of line toward the matching side of the field.
    #[serde(default = "default_line_tilt")]
    pub line_tilt: f64,
    #[serde(default = "default_extras_rate")]
    pub extras_rate: f64,
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
}

fn default_signal() -> SignalStrength {
    SignalStrength::High
}

/// What the zone model sees about one ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallConditions {
    pub length: CoarseLength,
    /// Striker-relative; positive is outside off.
    pub line_offset_m: f64,
    pub speed_kmh: f64,
    pub style: BowlerStyle,
    pub balls_faced: u32,
    pub previous_short: bool,
    pub bowler_menace: f64,
}

/// Aggression propensity in [0, 1] for one ball.
pub fn aggression_propensity(
    bat: &BatsmanArchetype,
    ball: &BallConditions,
    sequence_effect: f64,
) -> f64 {
    let settled = ball.balls_faced.min(60) as f64 / 60.0;
    let a = bat.base_aggression
        + bat.aggression_ramp * settled
        + bat.length_sensitivity[ball.length.index()]
        + bat.speed_sensitivity * (ball.speed_kmh - 120.0) / 40.0
        + bat.style_sensitivity[ball.style.index()]
        + if ball.previous_short { sequence_effect } else { 0.0 }
        + ball.bowler_menace;
    a.clamp(0.0, 1.0)
}

/// Sectors a length naturally pushes the ball toward, the strongest first.
fn tilted_sectors(length: CoarseLength) -> &'static [Sector] {
    match length {
        CoarseLength::Yorker => &[Sector::FineLeg, Sector::MidOn, Sector::MidOff],
        CoarseLength::Full => &[Sector::ExtraCover, Sector::MidOff, Sector::Cover, Sector::MidOn],
        CoarseLength::Good => &[Sector::ThirdMan, Sector::Cover, Sector::Point, Sector::MidWicket],
        CoarseLength::Short => &[Sector::SquareLeg, Sector::Point, Sector::FineLeg, Sector::MidWicket],
    }
}

/// Direction shares over the 9 sectors for one ball.
pub fn sector_shares(bat: &BatsmanArchetype, ball: &BallConditions, set: &ArchetypeSet) -> [f64; 9] {
    let mut q = bat.sector_weights;
    for (k, s) in tilted_sectors(ball.length).iter().enumerate() {
        let boost = if k == 0 { 2.0 } else { 1.0 };
        q[s.index()] *= 1.0 + boost * set.length_tilt;
    }
    for s in Sector::ALL {
        let side = if s.is_off_side() { 1.0 } else { -1.0 };
        q[s.index()] *= f64::exp(side * set.line_tilt * ball.line_offset_m);
    }
    let total: f64 = q.iter().sum();
    for v in q.iter_mut() {
        *v /= total;
    }
    q
}

/// The generating distribution over the 17 zones:
///
/// * `p_def = floor + (1 - floor) (1 - a)^2` for aggression propensity `a`;
/// * a hit goes to sector `s` with the tilted share `q_s`, and is an attacking
///   shot with probability `a` (ThirdMan/FineLeg keep one combined zone);
/// * the result is mixed with the uniform distribution at weight `noise`.
pub fn zone_probabilities(
    bat: &BatsmanArchetype,
    ball: &BallConditions,
    set: &ArchetypeSet,
) -> [f64; ZoneId::COUNT] {
    let a = aggression_propensity(bat, ball, set.sequence_effect);
    let p_def = bat.defensive_floor + (1.0 - bat.defensive_floor) * (1.0 - a) * (1.0 - a);
    let q = sector_shares(bat, ball, set);
    let mut p = [0.0; ZoneId::COUNT];
    p[ZoneId::DEFENSIVE.index()] = p_def;
    for sector in Sector::ALL {
        let hit = (1.0 - p_def) * q[sector.index()];
        if sector.is_combined() {
            p[zone(sector, AggressionClass::Combined)] += hit;
        } else {
            p[zone(sector, AggressionClass::Rotate)] += hit * (1.0 - a);
            p[zone(sector, AggressionClass::Attack)] += hit * a;
        }
    }
    let u = 1.0 / ZoneId::COUNT as f64;
    for v in p.iter_mut() {
        *v = (1.0 - set.noise) * *v + set.noise * u;
    }
    p
}

fn zone(sector: Sector, class: AggressionClass) -> usize {
    ZoneId::from_parts(sector, class)
        .expect("tabulated zone")
        .index()
}

impl ArchetypeSet {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.batsmen.len() < 2 || self.bowlers.len() < 2 {
            return Err(IngestError::Config(
                "need at least 2 batsmen and 2 bowlers".into(),
            ));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for b in &self.batsmen {
            let total: f64 = b.sector_weights.iter().sum();
            if b.sector_weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || !(total > 0.0) {
                return Err(IngestError::Config(format!(
                    "batsman {}: sector weights must be non-negative with positive sum",
                    b.id
                )));
            }
            if !unit(b.base_aggression) || !unit(b.defensive_floor) {
                return Err(IngestError::Config(format!(
                    "batsman {}: propensities must lie in [0, 1]",
                    b.id
                )));
            }
        }
        for b in &self.bowlers {
            if !(40.0..=165.0).contains(&b.speed_kmh) {
                return Err(IngestError::Config(format!("bowler {}: speed out of range", b.id)));
            }
            if b.length_weights.iter().any(|w| *w < 0.0) || b.length_weights.iter().sum::<f64>() <= 0.0 {
                return Err(IngestError::Config(format!("bowler {}: bad length weights", b.id)));
            }
            if !unit(b.around_share) || !(b.line_sd_m >= 0.0) {
                return Err(IngestError::Config(format!("bowler {}: bad line/angle settings", b.id)));
            }
        }
        if !unit(self.noise) || !unit(self.t20_share) || !unit(self.extras_rate) {
            return Err(IngestError::Config("global rates must lie in [0, 1]".into()));
        }
        let mut ids: Vec<&str> = self
            .batsmen
            .iter()
            .map(|b| b.id.as_str())
            .chain(self.bowlers.iter().map(|b| b.id.as_str()))
            .collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(IngestError::Config("player ids must be unique".into()));
        }
        Ok(())
    }

    /// Batsmen with sector weights normalized and, for low signal, shrunk
    /// toward the population average.
    pub fn effective_batsmen(&self) -> Vec<BatsmanArchetype> {
        let normalized: Vec<BatsmanArchetype> = self
            .batsmen
            .iter()
            .map(|b| {
                let mut b = b.clone();
                let total: f64 = b.sector_weights.iter().sum();
                b.sector_weights.iter_mut().for_each(|w| *w /= total);
                b
            })
            .collect();
        if self.signal == SignalStrength::High {
            return normalized;
        }
        let n = normalized.len() as f64;
        let mut mean_w = [0.0; 9];
        let mut mean_a = 0.0;
        for b in &normalized {
            for (m, w) in mean_w.iter_mut().zip(b.sector_weights) {
                *m += w / n;
            }
            mean_a += b.base_aggression / n;
        }
        const KEEP: f64 = 0.3;
        normalized
            .into_iter()
            .map(|mut b| {
                for (w, m) in b.sector_weights.iter_mut().zip(mean_w) {
                    *w = KEEP * *w + (1.0 - KEEP) * m;
                }
                b.base_aggression = KEEP * b.base_aggression + (1.0 - KEEP) * mean_a;
                b
            })
            .collect()
    }

    /// A random but reproducible player set.
    pub fn generate(n_batsmen: usize, n_bowlers: usize, signal: SignalStrength, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a7c4);
        const POPULATION: [f64; 9] = [0.14, 0.10, 0.12, 0.10, 0.08, 0.08, 0.10, 0.16, 0.12];
        let jitter = Normal::new(0.0, 0.35).expect("valid normal");
        let batsmen = (0..n_batsmen)
            .map(|i| {
                let mut w = POPULATION.map(|p| p * f64::exp(jitter.sample(&mut rng)));
                // one strongly favored sector and a weaker secondary one
                let fav = rng.gen_range(0..9);
                let second = (fav + rng.gen_range(1..9)) % 9;
                w[fav] += 0.9;
                w[second] += 0.3;
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                BatsmanArchetype {
                    id: format!("B{:02}", i + 1),
                    hand: if rng.gen_bool(0.3) { Handedness::Left } else { Handedness::Right },
                    sector_weights: w,
                    base_aggression: rng.gen_range(0.2..0.75),
                    aggression_ramp: rng.gen_range(0.05..0.3),
                    length_sensitivity: [
                        -0.45 + rng.gen_range(-0.1..0.1),
                        0.45 + rng.gen_range(-0.1..0.1),
                        -0.25 + rng.gen_range(-0.1..0.1),
                        0.8 + rng.gen_range(-0.1..0.1),
                    ],
                    speed_sensitivity: rng.gen_range(-0.1..0.0),
                    style_sensitivity: [
                        rng.gen_range(-0.08..0.0),
                        rng.gen_range(-0.04..0.04),
                        rng.gen_range(0.0..0.08),
                        rng.gen_range(-0.04..0.08),
                    ],
                    defensive_floor: rng.gen_range(0.02..0.08),
                }
            })
            .collect();
        let bowlers = (0..n_bowlers)
            .map(|i| {
                let style = BowlerStyle::ALL[rng.gen_range(0..4)];
                let (speed, lengths, around) = if style.is_pace() {
                    let base = if style == BowlerStyle::Fast { 142.0 } else { 131.0 };
                    (base + rng.gen_range(-5.0..5.0), [0.03, 0.08, 0.25, 0.32, 0.2, 0.12], 0.15)
                } else {
                    (82.0 + rng.gen_range(-6.0..8.0), [0.04, 0.03, 0.35, 0.43, 0.11, 0.04], 0.3)
                };
                let lengths = lengths.map(|p: f64| p * f64::exp(jitter.sample(&mut rng)));
                BowlerArchetype {
                    id: format!("W{:02}", i + 1),
                    hand: if rng.gen_bool(0.25) { Handedness::Left } else { Handedness::Right },
                    style,
                    speed_kmh: speed,
                    length_weights: lengths,
                    line_mean_m: rng.gen_range(0.05..0.45),
                    line_sd_m: rng.gen_range(0.15..0.35),
                    around_share: around,
                    menace: rng.gen_range(-0.12..0.12),
                }
            })
            .collect();
        ArchetypeSet {
            batsmen,
            bowlers,
            noise: default_noise(),
            signal,
            t20_share: default_t20_share(),
            sequence_effect: default_sequence_effect(),
            length_tilt: default_length_tilt(),
            line_tilt: default_line_tilt(),
            extras_rate: default_extras_rate(),
            start_date: default_start_date(),
        }
    }
}

/// Generates `n_deliveries` balls of match play. Deterministic given the inputs.
pub fn synthesize(set: &ArchetypeSet, n_deliveries: usize, seed: u64) -> Result<Corpus, IngestError> {
    set.validate()?;
    if n_deliveries == 0 {
        return Err(IngestError::Config("n_deliveries must be at least 1".into()));
    }
    let batsmen = set.effective_batsmen();
    let mut sim = Simulator {
        set,
        batsmen: &batsmen,
        rng: ChaCha8Rng::seed_from_u64(seed),
        out: Vec::with_capacity(n_deliveries),
        limit: n_deliveries,
    };
    let mut match_no = 0;
    while sim.out.len() < n_deliveries {
        sim.play_match(match_no);
        match_no += 1;
    }
    Corpus::new(sim.out)
}

struct Simulator<'a> {
    set: &'a ArchetypeSet,
    batsmen: &'a [BatsmanArchetype],
    rng: ChaCha8Rng,
    out: Vec<Delivery>,
    limit: usize,
}

struct InningsPlan<'a> {
    match_id: String,
    date: NaiveDate,
    format: MatchFormat,
    innings: u8,
    lineup: Vec<&'a BatsmanArchetype>,
    attack: Vec<&'a BowlerArchetype>,
    target: Option<u32>,
}

impl<'a> Simulator<'a> {
    fn full(&self) -> bool {
        self.out.len() >= self.limit
    }

    fn play_match(&mut self, match_no: usize) {
        let format = if self.rng.gen_bool(self.set.t20_share) {
            MatchFormat::T20
        } else {
            MatchFormat::ODI
        };
        let date = self.set.start_date + Duration::days(match_no as i64 * 3);
        let match_id = format!("M{:05}", match_no + 1);

        let mut pool: Vec<&'a BatsmanArchetype> = self.batsmen.iter().collect();
        let (home, away) = if pool.len() >= 4 {
            pool.shuffle(&mut self.rng);
            let half = pool.len() / 2;
            let home: Vec<_> = pool[..half].iter().take(11).copied().collect();
            let away: Vec<_> = pool[half..].iter().take(11).copied().collect();
            (home, away)
        } else {
            let mut a = pool.clone();
            a.shuffle(&mut self.rng);
            pool.shuffle(&mut self.rng);
            (a, pool)
        };
        let mut attack_a: Vec<&'a BowlerArchetype> = self.set.bowlers.iter().collect();
        let mut attack_b = attack_a.clone();
        attack_a.shuffle(&mut self.rng);
        attack_b.shuffle(&mut self.rng);

        let first = self.play_innings(InningsPlan {
            match_id: match_id.clone(),
            date,
            format,
            innings: 1,
            lineup: home,
            attack: attack_a,
            target: None,
        });
        if !self.full() {
            self.play_innings(InningsPlan {
                match_id,
                date,
                format,
                innings: 2,
                lineup: away,
                attack: attack_b,
                target: Some(first + 1),
            });
        }
    }

    /// Plays one innings and returns the total.
    fn play_innings(&mut self, plan: InningsPlan<'a>) -> u32 {
        let overs = plan.format.overs();
        let quota = plan
            .format
            .bowler_quota()
            .max((overs as usize).div_ceil(plan.attack.len()) as u32);
        let mut overs_bowled = vec![0u32; plan.attack.len()];
        let mut last_bowler: Option<usize> = None;
        let (mut striker, mut non_striker, mut next_in) = (0usize, 1usize, 2usize);
        let mut faced = vec![0u32; plan.lineup.len()];
        let (mut runs, mut wickets) = (0u32, 0u8);
        let max_wickets = (plan.lineup.len() - 1).min(10) as u8;
        let mut previous_short = false;

        'overs: for over in 0..overs {
            let eligible: Vec<usize> = (0..plan.attack.len())
                .filter(|&b| overs_bowled[b] < quota && Some(b) != last_bowler)
                .collect();
            let bowler_idx = match eligible.choose(&mut self.rng) {
                Some(&b) => b,
                None => last_bowler.unwrap_or(0),
            };
            overs_bowled[bowler_idx] += 1;
            last_bowler = Some(bowler_idx);
            let bowler = plan.attack[bowler_idx];

            for ball in 1..=6u8 {
                if self.full() {
                    break 'overs;
                }
                let bat = plan.lineup[striker];
                let mut d = self.bowl(bowler, bat, &plan, over, ball);
                d.non_striker_id = plan.lineup[non_striker].id.clone();
                d.team_runs_before = runs;
                d.team_wickets_before = wickets;

                let length = CoarseLength::of(d.bounce).expect("generated bounce in range");
                if self.rng.gen_bool(self.set.extras_rate) {
                    d.runs = 1;
                } else {
                    let cond = BallConditions {
                        length,
                        line_offset_m: d.line_offset_m,
                        speed_kmh: d.speed_kmh,
                        style: bowler.style,
                        balls_faced: faced[striker],
                        previous_short,
                        bowler_menace: bowler.menace,
                    };
                    let a = aggression_propensity(bat, &cond, self.set.sequence_effect);
                    let probs = zone_probabilities(bat, &cond, self.set);
                    let z = sample_index(&mut self.rng, &probs);
                    self.fill_shot(&mut d, ZoneId::new(z).expect("index < 17"), a, bat.hand);
                    faced[striker] += 1;
                }
                previous_short = length == CoarseLength::Short;
                runs += d.runs as u32;
                let (out_now, odd) = (d.wicket, d.runs % 2 == 1);
                self.out.push(d);

                if out_now {
                    wickets += 1;
                    if wickets >= max_wickets || next_in >= plan.lineup.len() {
                        break 'overs;
                    }
                    striker = next_in;
                    next_in += 1;
                } else if odd {
                    std::mem::swap(&mut striker, &mut non_striker);
                }
                if plan.target.is_some_and(|t| runs >= t) {
                    break 'overs;
                }
            }
            std::mem::swap(&mut striker, &mut non_striker);
        }
        runs
    }

    fn bowl(
        &mut self,
        bowler: &BowlerArchetype,
        bat: &BatsmanArchetype,
        plan: &InningsPlan<'_>,
        over: u32,
        ball: u8,
    ) -> Delivery {
        let rng = &mut self.rng;
        let band = LengthBand::ALL[sample_index(rng, &bowler.length_weights)];
        let bounce = match band.range_m() {
            None => Bounce::FullToss,
            Some((lo, hi)) => Bounce::At(rng.gen_range(lo..hi.min(16.0))),
        };
        let normal = |rng: &mut ChaCha8Rng, mean: f64, sd: f64| {
            Normal::new(mean, sd).expect("finite sd").sample(rng)
        };
        let speed = normal(rng, bowler.speed_kmh, 3.0).clamp(40.0, 165.0);
        let line = normal(rng, bowler.line_mean_m, bowler.line_sd_m)
            .clamp(-MAX_LINE_OFFSET_M, MAX_LINE_OFFSET_M);
        let (swing, turn) = if bowler.style.is_pace() {
            (normal(rng, 0.0, 1.5), normal(rng, 0.0, 0.5))
        } else {
            (normal(rng, 0.0, 0.4), normal(rng, 3.0, 1.5))
        };
        let bounce_height = match bounce {
            Bounce::FullToss => 0.0,
            Bounce::At(x) => {
                (0.3 + 0.06 * x + 0.004 * (speed - 100.0) + normal(rng, 0.0, 0.05)).clamp(0.0, 3.0)
            }
        };
        let release = normal(
            rng,
            if bowler.style.is_pace() { 2.15 } else { 1.95 },
            0.06,
        )
        .clamp(1.0, 2.6);
        let angle = if rng.gen_bool(bowler.around_share) {
            BowlingAngle::AroundTheWicket
        } else {
            BowlingAngle::OverTheWicket
        };
        Delivery {
            match_id: plan.match_id.clone(),
            date: plan.date,
            format: plan.format,
            innings_index: plan.innings,
            over_number: over,
            ball_in_over: ball,
            batsman_id: bat.id.clone(),
            non_striker_id: String::new(),
            bowler_id: bowler.id.clone(),
            batsman_hand: bat.hand,
            bowler_hand: bowler.hand,
            bowler_style: bowler.style,
            bowling_angle: angle,
            speed_kmh: speed,
            line_offset_m: line,
            bounce,
            swing_deg: swing.clamp(-45.0, 45.0),
            turn_deg: turn.clamp(-45.0, 45.0),
            bounce_height_m: bounce_height,
            release_height_m: release,
            shot_label: None,
            shot_angle: None,
            runs: 0,
            wicket: false,
            team_runs_before: 0,
            team_wickets_before: 0,
        }
    }

    /// Picks a raw shot, angle and outcome consistent with the sampled zone.
    fn fill_shot(&mut self, d: &mut Delivery, z: ZoneId, a: f64, hand: Handedness) {
        let rng = &mut self.rng;
        let level = match z.class() {
            AggressionClass::Defensive => AggressionLabel::Defensive,
            AggressionClass::Rotate => AggressionLabel::Working,
            AggressionClass::Attack => AggressionLabel::Attacking,
            AggressionClass::Combined => {
                if rng.gen_bool(a) {
                    AggressionLabel::Attacking
                } else {
                    AggressionLabel::Working
                }
            }
        };
        let group = ShotLabel::group(level);
        d.shot_label = Some(*group.choose(rng).expect("non-empty group"));
        d.shot_angle = z.sector().map(|s| {
            let (lo, hi) = s.range_deg();
            let canonical = FieldAngle::new(rng.gen_range(lo..hi));
            match hand {
                Handedness::Right => canonical,
                Handedness::Left => mirror_angle(canonical),
            }
        });
        let (runs_dist, wicket_p): (&[f64; 7], f64) = match level {
            AggressionLabel::Defensive => (&[0.9, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0], 0.01),
            AggressionLabel::Working => (&[0.3, 0.5, 0.17, 0.03, 0.0, 0.0, 0.0], 0.015),
            AggressionLabel::Attacking => (&[0.25, 0.2, 0.1, 0.02, 0.28, 0.0, 0.15], 0.05),
        };
        d.wicket = rng.gen_bool(wicket_p);
        d.runs = if d.wicket { 0 } else { sample_index(rng, runs_dist) as u8 };
    }
}

fn sample_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{corpus_to_string, target_of};

    fn small_set() -> ArchetypeSet {
        ArchetypeSet::generate(4, 3, SignalStrength::High, 11)
    }

    #[test]
    fn deterministic_given_seed() {
        let set = small_set();
        let a = synthesize(&set, 2_000, 7).unwrap();
        let b = synthesize(&set, 2_000, 7).unwrap();
        assert_eq!(corpus_to_string(&a), corpus_to_string(&b));
        let c = synthesize(&set, 2_000, 8).unwrap();
        assert_ne!(corpus_to_string(&a), corpus_to_string(&c));
        assert_eq!(a.len(), 2_000);
    }

    #[test]
    fn rejects_thin_sets() {
        let mut set = small_set();
        set.bowlers.truncate(1);
        assert!(matches!(synthesize(&set, 10, 1), Err(IngestError::Config(_))));
        let mut set = small_set();
        set.batsmen.clear();
        assert!(matches!(synthesize(&set, 10, 1), Err(IngestError::Config(_))));
    }

    #[test]
    fn degenerate_sector_weights() {
        let mut set = small_set();
        set.noise = 0.0;
        for b in set.batsmen.iter_mut() {
            b.sector_weights = [0.0; 9];
            b.sector_weights[Sector::Cover.index()] = 1.0;
            b.base_aggression = 1.0;
        }
        let corpus = synthesize(&set, 3_000, 3).unwrap();
        let mut hits = 0;
        for d in corpus.deliveries().iter().filter(|d| !d.is_extra()) {
            let z = target_of(d).unwrap();
            if z != ZoneId::DEFENSIVE {
                assert_eq!(z.sector(), Some(Sector::Cover));
                hits += 1;
            }
        }
        assert!(hits > 1_000);
    }

    #[test]
    fn probabilities_form_a_simplex() {
        let set = small_set();
        for bat in &set.batsmen {
            for length in CoarseLength::ALL {
                let cond = BallConditions {
                    length,
                    line_offset_m: 0.3,
                    speed_kmh: 135.0,
                    style: BowlerStyle::Fast,
                    balls_faced: 12,
                    previous_short: true,
                    bowler_menace: 0.05,
                };
                let p = zone_probabilities(bat, &cond, &set);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|v| *v > 0.0));
            }
        }
    }

    #[test]
    fn innings_structure_is_consistent() {
        let corpus = synthesize(&small_set(), 5_000, 21).unwrap();
        for r in corpus.innings_ranges() {
            let inn = &corpus.deliveries()[r];
            for w in inn.windows(2) {
                let expected = w[0].team_runs_before + w[0].runs as u32;
                assert_eq!(w[1].team_runs_before, expected);
                assert!(w[1].team_wickets_before >= w[0].team_wickets_before);
            }
        }
    }
}
