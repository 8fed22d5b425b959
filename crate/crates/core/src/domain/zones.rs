use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AggressionLabel, DomainError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn flipped(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }

    pub fn is_left(self) -> bool {
        self == Handedness::Left
    }

    pub fn code(self) -> &'static str {
        match self {
            Handedness::Right => "R",
            Handedness::Left => "L",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "R" | "r" | "Right" | "right" => Some(Handedness::Right),
            "L" | "l" | "Left" | "left" => Some(Handedness::Left),
            _ => None,
        }
    }
}

/// A shot direction in degrees, normalized to [0, 360).
///
/// 0 points straight back down the pitch toward the bowler's stumps and the
/// angle grows counterclockwise through the right-hander's off side.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldAngle(f64);

impl FieldAngle {
    pub fn new(theta_deg: f64) -> Self {
        let mut t = theta_deg.rem_euclid(360.0);
        // rem_euclid can round up to exactly 360 for tiny negative inputs
        if t >= 360.0 {
            t = 0.0;
        }
        FieldAngle(t)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }
}

/// Reflects an angle across the pitch axis: theta -> (360 - theta) mod 360.
pub fn mirror_angle(theta: FieldAngle) -> FieldAngle {
    FieldAngle::new(360.0 - theta.0)
}

/// The nine named field sectors, in angular order from straight down the ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    MidOff,
    ExtraCover,
    Cover,
    Point,
    ThirdMan,
    FineLeg,
    SquareLeg,
    MidWicket,
    MidOn,
}

impl Sector {
    pub const ALL: [Sector; 9] = [
        Sector::MidOff,
        Sector::ExtraCover,
        Sector::Cover,
        Sector::Point,
        Sector::ThirdMan,
        Sector::FineLeg,
        Sector::SquareLeg,
        Sector::MidWicket,
        Sector::MidOn,
    ];

    pub const WIDTH_DEG: f64 = 40.0;

    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical (right-handed) angular range, left-closed/right-open.
    pub fn range_deg(self) -> (f64, f64) {
        let lo = self.index() as f64 * Self::WIDTH_DEG;
        (lo, lo + Self::WIDTH_DEG)
    }

    pub fn from_canonical_angle(theta: FieldAngle) -> Sector {
        let i = (theta.degrees() / Self::WIDTH_DEG).floor() as usize;
        Sector::ALL[i.min(8)]
    }

    /// ThirdMan and FineLeg merge both aggression levels into one zone.
    pub fn is_combined(self) -> bool {
        matches!(self, Sector::ThirdMan | Sector::FineLeg)
    }

    pub fn is_off_side(self) -> bool {
        self.index() <= Sector::ThirdMan.index()
    }

    pub fn name(self) -> &'static str {
        match self {
            Sector::MidOff => "MidOff",
            Sector::ExtraCover => "ExtraCover",
            Sector::Cover => "Cover",
            Sector::Point => "Point",
            Sector::ThirdMan => "ThirdMan",
            Sector::FineLeg => "FineLeg",
            Sector::SquareLeg => "SquareLeg",
            Sector::MidWicket => "MidWicket",
            Sector::MidOn => "MidOn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AggressionClass {
    Defensive,
    Rotate,
    Attack,
    Combined,
}

/// One of the 17 target zones.
///
/// Ids run in angular order: 0 is Defensive, then each sector contributes
/// Rotate/Attack ids except ThirdMan (9) and FineLeg (10), which have one each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZoneId(u8);

impl ZoneId {
    pub const COUNT: usize = 17;
    pub const DEFENSIVE: ZoneId = ZoneId(0);

    pub fn new(id: usize) -> Result<Self, DomainError> {
        if id < Self::COUNT {
            Ok(ZoneId(id as u8))
        } else {
            Err(DomainError::InvalidZone(id))
        }
    }

    pub fn all() -> impl Iterator<Item = ZoneId> {
        (0..Self::COUNT as u8).map(ZoneId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_parts(sector: Sector, class: AggressionClass) -> Result<Self, DomainError> {
        ZoneId::all()
            .find(|z| z.sector() == Some(sector) && z.class() == class)
            .ok_or(DomainError::NoSuchZone(sector, class))
    }

    pub fn sector(self) -> Option<Sector> {
        match self.0 {
            0 => None,
            1..=8 => Some(Sector::ALL[(self.0 as usize - 1) / 2]),
            9 => Some(Sector::ThirdMan),
            10 => Some(Sector::FineLeg),
            _ => Some(Sector::ALL[6 + (self.0 as usize - 11) / 2]),
        }
    }

    pub fn class(self) -> AggressionClass {
        match self.0 {
            0 => AggressionClass::Defensive,
            9 | 10 => AggressionClass::Combined,
            n if n % 2 == 1 => AggressionClass::Rotate,
            _ => AggressionClass::Attack,
        }
    }

    /// Wire name, e.g. "Defensive", "ThirdMan", "MidWicket-Attack".
    pub fn name(self) -> String {
        match (self.sector(), self.class()) {
            (None, _) => "Defensive".to_string(),
            (Some(s), AggressionClass::Combined) => s.name().to_string(),
            (Some(s), AggressionClass::Rotate) => format!("{}-Rotate", s.name()),
            (Some(s), _) => format!("{}-Attack", s.name()),
        }
    }

    pub fn parse(name: &str) -> Result<Self, DomainError> {
        ZoneId::all()
            .find(|z| z.name() == name)
            .ok_or_else(|| DomainError::UnknownZoneName(name.to_string()))
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for ZoneId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for ZoneId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ZoneId::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Maps an aggression level and a raw shot angle to its target zone.
///
/// Left-handed batsmen are mirrored into right-handed coordinates first.
pub fn zone_of(aggression: AggressionLabel, theta: FieldAngle, batsman: Handedness) -> ZoneId {
    if aggression == AggressionLabel::Defensive {
        return ZoneId::DEFENSIVE;
    }
    let canonical = match batsman {
        Handedness::Right => theta,
        Handedness::Left => mirror_angle(theta),
    };
    let sector = Sector::from_canonical_angle(canonical);
    let class = if sector.is_combined() {
        AggressionClass::Combined
    } else if aggression == AggressionLabel::Working {
        AggressionClass::Rotate
    } else {
        AggressionClass::Attack
    };
    ZoneId::from_parts(sector, class).expect("every sector/class pair is tabulated")
}

/// A probability simplex over the 17 zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneDistribution {
    probs: [f64; ZoneId::COUNT],
}

impl ZoneDistribution {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(probs: [f64; ZoneId::COUNT]) -> Result<Self, DomainError> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(DomainError::NotASimplex("entry outside [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Self::TOLERANCE {
            return Err(DomainError::NotASimplex(format!("sum is {total}")));
        }
        Ok(ZoneDistribution { probs })
    }

    pub fn uniform() -> Self {
        ZoneDistribution {
            probs: [1.0 / ZoneId::COUNT as f64; ZoneId::COUNT],
        }
    }

    pub fn one_hot(zone: ZoneId) -> Self {
        let mut probs = [0.0; ZoneId::COUNT];
        probs[zone.index()] = 1.0;
        ZoneDistribution { probs }
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64; ZoneId::COUNT]) -> Result<Self, DomainError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(DomainError::NotASimplex("weights must be non-negative with positive sum".into()));
        }
        let mut probs = [0.0; ZoneId::COUNT];
        for (p, w) in probs.iter_mut().zip(weights) {
            *p = w / total;
        }
        Ok(ZoneDistribution { probs })
    }

    /// Max-subtracted softmax over logits, evaluated in double precision.
    pub fn from_logits(logits: &[f64]) -> Self {
        assert_eq!(logits.len(), ZoneId::COUNT, "expected 17 logits");
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0; ZoneId::COUNT];
        let mut total = 0.0;
        for (p, l) in probs.iter_mut().zip(logits) {
            *p = (l - max).exp();
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        ZoneDistribution { probs }
    }

    pub fn probs(&self) -> &[f64; ZoneId::COUNT] {
        &self.probs
    }

    pub fn get(&self, zone: ZoneId) -> f64 {
        self.probs[zone.index()]
    }

    /// Most likely zone; ties go to the lowest id.
    pub fn argmax(&self) -> ZoneId {
        let mut best = 0;
        for i in 1..ZoneId::COUNT {
            if self.probs[i] > self.probs[best] {
                best = i;
            }
        }
        ZoneId(best as u8)
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror_angle(FieldAngle::new(0.0)).degrees(), 0.0);
        assert_eq!(mirror_angle(FieldAngle::new(90.0)).degrees(), 270.0);
        let t = FieldAngle::new(123.4);
        assert!((mirror_angle(mirror_angle(t)).degrees() - 123.4).abs() < 1e-12);
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(FieldAngle::new(360.0).degrees(), 0.0);
        assert_eq!(FieldAngle::new(-90.0).degrees(), 270.0);
        assert!(FieldAngle::new(-1e-18).degrees() < 360.0);
    }

    #[test]
    fn zone_examples() {
        use AggressionLabel::*;
        let r = Handedness::Right;
        assert_eq!(zone_of(Defensive, FieldAngle::new(123.0), r), ZoneId::DEFENSIVE);
        let tm1 = zone_of(Working, FieldAngle::new(180.0), r);
        let tm2 = zone_of(Attacking, FieldAngle::new(180.0), r);
        assert_eq!(tm1, tm2);
        assert_eq!(tm1.name(), "ThirdMan");
        let mw = zone_of(Attacking, FieldAngle::new(300.0), r);
        assert_eq!(mw.sector(), Some(Sector::MidWicket));
        assert_eq!(mw.class(), AggressionClass::Attack);
        assert_eq!(
            zone_of(Attacking, FieldAngle::new(60.0), Handedness::Left),
            mw
        );
    }

    #[test]
    fn ids_are_consistent() {
        let mut seen = std::collections::HashSet::new();
        for z in ZoneId::all() {
            assert_eq!(ZoneId::parse(&z.name()).unwrap(), z);
            if let Some(s) = z.sector() {
                assert_eq!(ZoneId::from_parts(s, z.class()).unwrap(), z);
            }
            seen.insert(z.name());
        }
        assert_eq!(seen.len(), 17);
        let combined: Vec<_> = ZoneId::all()
            .filter(|z| z.class() == AggressionClass::Combined)
            .collect();
        assert_eq!(combined.len(), 2);
    }

    #[test]
    fn sweep_hits_all_directional_zones() {
        let mut hit = std::collections::BTreeSet::new();
        for k in 0..720 {
            let theta = FieldAngle::new(k as f64 * 0.5);
            for a in [AggressionLabel::Working, AggressionLabel::Attacking] {
                hit.insert(zone_of(a, theta, Handedness::Right));
            }
        }
        assert_eq!(hit.len(), 16);
        assert!(!hit.contains(&ZoneId::DEFENSIVE));
    }

    #[test]
    fn sector_boundaries_left_closed() {
        assert_eq!(Sector::from_canonical_angle(FieldAngle::new(40.0)), Sector::ExtraCover);
        assert_eq!(Sector::from_canonical_angle(FieldAngle::new(39.999)), Sector::MidOff);
        assert_eq!(Sector::from_canonical_angle(FieldAngle::new(359.999)), Sector::MidOn);
    }

    #[test]
    fn softmax_is_stable() {
        let mut logits = [0.0; 17];
        logits[3] = 1000.0;
        let d = ZoneDistribution::from_logits(&logits);
        assert!((d.get(ZoneId::new(3).unwrap()) - 1.0).abs() < 1e-12);
        assert!(d.probs().iter().all(|p| p.is_finite()));
    }

    #[test]
    fn argmax_ties_to_lowest() {
        assert_eq!(ZoneDistribution::uniform().argmax(), ZoneId::DEFENSIVE);
    }

    proptest! {
        #[test]
        fn mirror_symmetry(theta in 0.0f64..360.0, attack in any::<bool>()) {
            let a = if attack { AggressionLabel::Attacking } else { AggressionLabel::Working };
            let t = FieldAngle::new(theta);
            prop_assert_eq!(
                zone_of(a, t, Handedness::Left),
                zone_of(a, mirror_angle(t), Handedness::Right)
            );
        }

        #[test]
        fn mirror_is_involutive(theta in -720.0f64..720.0) {
            let t = FieldAngle::new(theta);
            let back = mirror_angle(mirror_angle(t)).degrees();
            let diff = (back - t.degrees()).abs();
            prop_assert!(diff < 1e-9 || (360.0 - diff) < 1e-9);
        }
    }
}
