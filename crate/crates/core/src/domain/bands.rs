use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DomainError, Handedness};

/// Where the ball bounced, in meters from the striker's stumps, or no bounce at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bounce {
    At(f64),
    FullToss,
}

impl Bounce {
    /// Literal used in corpus files for a ball that did not bounce.
    pub const NO_BOUNCE_TOKEN: &'static str = "FT";

    pub fn distance(self) -> Option<f64> {
        match self {
            Bounce::At(d) => Some(d),
            Bounce::FullToss => None,
        }
    }

    pub fn is_full_toss(self) -> bool {
        matches!(self, Bounce::FullToss)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == Self::NO_BOUNCE_TOKEN {
            Some(Bounce::FullToss)
        } else {
            s.parse::<f64>().ok().map(Bounce::At)
        }
    }
}

impl fmt::Display for Bounce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bounce::At(d) => write!(f, "{d}"),
            Bounce::FullToss => f.write_str(Self::NO_BOUNCE_TOKEN),
        }
    }
}

impl Serialize for Bounce {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bounce::At(d) => s.serialize_f64(*d),
            Bounce::FullToss => s.serialize_str(Self::NO_BOUNCE_TOKEN),
        }
    }
}

impl<'de> Deserialize<'de> for Bounce {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tok(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Bounce::At(x)),
            Raw::Tok(t) => Bounce::parse(&t)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid bounce `{t}`"))),
        }
    }
}

pub const MAX_BOUNCE_M: f64 = 20.0;
pub const MAX_LINE_OFFSET_M: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LengthBand {
    FullToss,
    Yorker,
    Full,
    GoodLength,
    BackOfALength,
    Short,
}

impl LengthBand {
    pub const ALL: [LengthBand; 6] = [
        LengthBand::FullToss,
        LengthBand::Yorker,
        LengthBand::Full,
        LengthBand::GoodLength,
        LengthBand::BackOfALength,
        LengthBand::Short,
    ];

    /// Bounce-distance interval in meters; `None` for FullToss. Short is closed at 20 m.
    pub fn range_m(self) -> Option<(f64, f64)> {
        match self {
            LengthBand::FullToss => None,
            LengthBand::Yorker => Some((0.0, 2.0)),
            LengthBand::Full => Some((2.0, 6.0)),
            LengthBand::GoodLength => Some((6.0, 8.0)),
            LengthBand::BackOfALength => Some((8.0, 10.0)),
            LengthBand::Short => Some((10.0, MAX_BOUNCE_M)),
        }
    }

    /// Representative trajectory for a named band.
    pub fn midpoint(self) -> Bounce {
        match self.range_m() {
            None => Bounce::FullToss,
            Some((lo, hi)) => Bounce::At((lo + hi) / 2.0),
        }
    }

    pub fn coarse(self) -> CoarseLength {
        match self {
            LengthBand::FullToss | LengthBand::Yorker => CoarseLength::Yorker,
            LengthBand::Full => CoarseLength::Full,
            LengthBand::GoodLength | LengthBand::BackOfALength => CoarseLength::Good,
            LengthBand::Short => CoarseLength::Short,
        }
    }
}

pub fn length_band(bounce: Bounce) -> Result<LengthBand, DomainError> {
    let d = match bounce {
        Bounce::FullToss => return Ok(LengthBand::FullToss),
        Bounce::At(d) => d,
    };
    if !(0.0..=MAX_BOUNCE_M).contains(&d) {
        return Err(DomainError::OutOfRange {
            what: "bounce_distance_m",
            value: d,
        });
    }
    Ok(LengthBand::ALL[1..]
        .iter()
        .copied()
        .find(|b| {
            let (lo, hi) = b.range_m().unwrap();
            d >= lo && (d < hi || (*b == LengthBand::Short && d <= hi))
        })
        .expect("length bands cover [0, 20]"))
}

/// The four coarse lengths used for per-player aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarseLength {
    Yorker,
    Full,
    Good,
    Short,
}

impl CoarseLength {
    pub const ALL: [CoarseLength; 4] = [
        CoarseLength::Yorker,
        CoarseLength::Full,
        CoarseLength::Good,
        CoarseLength::Short,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of(bounce: Bounce) -> Result<Self, DomainError> {
        length_band(bounce).map(LengthBand::coarse)
    }

    pub fn name(self) -> &'static str {
        match self {
            CoarseLength::Yorker => "yorker",
            CoarseLength::Full => "full",
            CoarseLength::Good => "good",
            CoarseLength::Short => "short",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineBand {
    WideOutsideOff,
    OutsideOff,
    OffStump,
    MiddleAndLeg,
    DownLeg,
}

impl LineBand {
    pub const ALL: [LineBand; 5] = [
        LineBand::WideOutsideOff,
        LineBand::OutsideOff,
        LineBand::OffStump,
        LineBand::MiddleAndLeg,
        LineBand::DownLeg,
    ];

    /// Lateral interval in meters off middle stump, off side positive.
    pub fn range_m(self) -> (f64, f64) {
        match self {
            LineBand::WideOutsideOff => (0.6, MAX_LINE_OFFSET_M),
            LineBand::OutsideOff => (0.25, 0.6),
            LineBand::OffStump => (0.1, 0.25),
            LineBand::MiddleAndLeg => (-0.25, 0.1),
            LineBand::DownLeg => (-MAX_LINE_OFFSET_M, -0.25),
        }
    }

    pub fn midpoint(self) -> f64 {
        let (lo, hi) = self.range_m();
        (lo + hi) / 2.0
    }
}

/// Line band of a lateral offset.
///
/// Offsets are recorded relative to the striker (positive toward the striker's
/// off side), so the canonical sign is the recorded sign for both hands.
pub fn line_band(lateral_offset_m: f64, _batsman: Handedness) -> Result<LineBand, DomainError> {
    let x = lateral_offset_m;
    if !(x.abs() <= MAX_LINE_OFFSET_M) {
        return Err(DomainError::OutOfRange {
            what: "line_offset_m",
            value: x,
        });
    }
    Ok(LineBand::ALL
        .iter()
        .copied()
        .find(|b| {
            let (lo, hi) = b.range_m();
            x >= lo && (x < hi || (*b == LineBand::WideOutsideOff && x <= hi))
        })
        .expect("line bands cover [-1.6, 1.6]"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BowlingAngle {
    OverTheWicket,
    AroundTheWicket,
}

impl BowlingAngle {
    pub const ALL: [BowlingAngle; 2] = [BowlingAngle::OverTheWicket, BowlingAngle::AroundTheWicket];

    pub fn code(self) -> &'static str {
        match self {
            BowlingAngle::OverTheWicket => "over",
            BowlingAngle::AroundTheWicket => "around",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "over" | "overthewicket" => Some(BowlingAngle::OverTheWicket),
            "around" | "aroundthewicket" => Some(BowlingAngle::AroundTheWicket),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn length_examples() {
        assert_eq!(length_band(Bounce::FullToss).unwrap(), LengthBand::FullToss);
        assert_eq!(length_band(Bounce::At(1.0)).unwrap(), LengthBand::Yorker);
        assert_eq!(length_band(Bounce::At(12.0)).unwrap(), LengthBand::Short);
        assert_eq!(length_band(Bounce::At(20.0)).unwrap(), LengthBand::Short);
        assert_eq!(length_band(Bounce::At(2.0)).unwrap(), LengthBand::Full);
        assert_eq!(length_band(Bounce::At(8.0)).unwrap(), LengthBand::BackOfALength);
        assert!(length_band(Bounce::At(-0.1)).is_err());
        assert!(length_band(Bounce::At(20.5)).is_err());
        assert!(length_band(Bounce::At(f64::NAN)).is_err());
    }

    #[test]
    fn line_examples() {
        assert_eq!(line_band(0.15, Handedness::Right).unwrap(), LineBand::OffStump);
        assert_eq!(line_band(0.0, Handedness::Right).unwrap(), LineBand::MiddleAndLeg);
        assert_eq!(line_band(0.15, Handedness::Left).unwrap(), LineBand::OffStump);
        assert_eq!(line_band(1.6, Handedness::Right).unwrap(), LineBand::WideOutsideOff);
        assert_eq!(line_band(-1.6, Handedness::Right).unwrap(), LineBand::DownLeg);
        assert_eq!(line_band(0.1, Handedness::Right).unwrap(), LineBand::OffStump);
        assert_eq!(line_band(-0.25, Handedness::Right).unwrap(), LineBand::MiddleAndLeg);
        assert!(line_band(1.61, Handedness::Right).is_err());
    }

    #[test]
    fn midpoints_fall_in_their_band() {
        for b in LengthBand::ALL {
            assert_eq!(length_band(b.midpoint()).unwrap(), b);
        }
        assert_eq!(LengthBand::GoodLength.midpoint(), Bounce::At(7.0));
        for b in LineBand::ALL {
            assert_eq!(line_band(b.midpoint(), Handedness::Right).unwrap(), b);
        }
    }

    #[test]
    fn bounce_token() {
        assert_eq!(Bounce::parse("FT"), Some(Bounce::FullToss));
        assert_eq!(Bounce::FullToss.to_string(), "FT");
        assert_eq!(Bounce::parse("4.25"), Some(Bounce::At(4.25)));
        assert_eq!(Bounce::parse("x"), None);
    }

    proptest! {
        // Partition: exactly one band claims each admissible value.
        #[test]
        fn length_partition(d in 0.0f64..=20.0) {
            let owners = LengthBand::ALL[1..].iter().filter(|b| {
                let (lo, hi) = b.range_m().unwrap();
                d >= lo && (d < hi || (**b == LengthBand::Short && d <= hi))
            }).count();
            prop_assert_eq!(owners, 1);
            prop_assert!(length_band(Bounce::At(d)).is_ok());
        }

        #[test]
        fn line_partition(x in -1.6f64..=1.6) {
            let owners = LineBand::ALL.iter().filter(|b| {
                let (lo, hi) = b.range_m();
                x >= lo && (x < hi || (**b == LineBand::WideOutsideOff && x <= hi))
            }).count();
            prop_assert_eq!(owners, 1);
        }
    }
}
