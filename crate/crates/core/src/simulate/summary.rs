use serde::Serialize;

use crate::domain::{exact_sum, AggressionClass, ZoneDistribution, ZoneId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedZone {
    pub zone: ZoneId,
    pub probability: f64,
}

/// A distribution folded into aggression groups and field halves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TacticalSummary {
    pub p_defensive: f64,
    pub p_rotate: f64,
    pub p_attack: f64,
    /// The combined ThirdMan and FineLeg zones.
    pub p_deflect: f64,
    /// Shares of the 16 directional zones; `None` when they carry no mass.
    pub off_side_share: Option<f64>,
    pub leg_side_share: Option<f64>,
    pub top_zones: Vec<RankedZone>,
}

pub const TOP_ZONES: usize = 3;

fn group(dist: &ZoneDistribution, keep: impl Fn(ZoneId) -> bool) -> f64 {
    exact_sum(ZoneId::all().filter(|z| keep(*z)).map(|z| dist.get(z)))
}

pub fn summarize(dist: &ZoneDistribution) -> TacticalSummary {
    let class = |c: AggressionClass| move |z: ZoneId| z.class() == c;
    let off = group(dist, |z| z.sector().is_some_and(|s| s.is_off_side()));
    let leg = group(dist, |z| z.sector().is_some_and(|s| !s.is_off_side()));
    let directional = off + leg;
    let (off_side_share, leg_side_share) = if directional > 0.0 {
        (Some(off / directional), Some(leg / directional))
    } else {
        (None, None)
    };
    let mut ranked: Vec<RankedZone> = ZoneId::all().map(|zone| RankedZone { zone, probability: dist.get(zone) }).collect();
    // stable sort keeps the lower id first among ties
    ranked.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    ranked.truncate(TOP_ZONES);
    TacticalSummary {
        p_defensive: group(dist, class(AggressionClass::Defensive)),
        p_rotate: group(dist, class(AggressionClass::Rotate)),
        p_attack: group(dist, class(AggressionClass::Attack)),
        p_deflect: group(dist, class(AggressionClass::Combined)),
        off_side_share,
        leg_side_share,
        top_zones: ranked,
    }
}

impl TacticalSummary {
    pub fn group_total(&self) -> f64 {
        exact_sum([self.p_defensive, self.p_rotate, self.p_attack, self.p_deflect])
    }
}

/// Whole-number percentage, e.g. "43%".
pub fn percent(p: f64) -> String {
    format!("{:.0}%", 100.0 * p)
}

/// Two shares side by side, e.g. "50% vs 43%".
pub fn format_comparison(a: f64, b: f64) -> String {
    format!("{} vs {}", percent(a), percent(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_groups_count_zones() {
        let s = summarize(&ZoneDistribution::uniform());
        assert_eq!(s.p_defensive, 1.0 / 17.0);
        assert_eq!(s.p_rotate, 7.0 / 17.0);
        assert_eq!(s.p_attack, 7.0 / 17.0);
        assert_eq!(s.p_deflect, 2.0 / 17.0);
        assert_eq!(s.off_side_share, Some(9.0 / 16.0));
        assert_eq!(s.top_zones[0].zone, ZoneId::DEFENSIVE);
    }

    #[test]
    fn all_defensive_has_no_direction() {
        let s = summarize(&ZoneDistribution::one_hot(ZoneId::DEFENSIVE));
        assert_eq!(s.p_defensive, 1.0);
        assert_eq!(s.off_side_share, None);
        assert_eq!(s.leg_side_share, None);
    }

    #[test]
    fn comparison_format() {
        assert_eq!(format_comparison(0.5, 0.43), "50% vs 43%");
        assert_eq!(percent(1.0 / 17.0), "6%");
    }
}
