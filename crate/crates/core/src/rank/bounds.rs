//! Rank intervals.

use std::fmt;
use std::str::FromStr;

use super::ordinal::Ordinal;
use super::RankError;

/// Upper end of a rank interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hi {
    Finite(Ordinal),
    Unbounded,
}

impl Hi {
    pub fn min(&self, other: &Hi) -> Hi {
        match (self, other) {
            (Hi::Unbounded, h) | (h, Hi::Unbounded) => h.clone(),
            (Hi::Finite(a), Hi::Finite(b)) => Hi::Finite(a.min(b).clone()),
        }
    }

    pub fn max(&self, other: &Hi) -> Hi {
        match (self, other) {
            (Hi::Unbounded, _) | (_, Hi::Unbounded) => Hi::Unbounded,
            (Hi::Finite(a), Hi::Finite(b)) => Hi::Finite(a.max(b).clone()),
        }
    }

    pub fn add(&self, other: &Hi) -> Hi {
        match (self, other) {
            (Hi::Finite(a), Hi::Finite(b)) => Hi::Finite(a.add(b)),
            _ => Hi::Unbounded,
        }
    }

    pub fn finite(&self) -> Option<&Ordinal> {
        match self {
            Hi::Finite(o) => Some(o),
            Hi::Unbounded => None,
        }
    }

    /// `lo ≤ self`.
    pub fn admits(&self, lo: &Ordinal) -> bool {
        match self {
            Hi::Finite(h) => lo <= h,
            Hi::Unbounded => true,
        }
    }
}

impl From<Ordinal> for Hi {
    fn from(o: Ordinal) -> Self {
        Hi::Finite(o)
    }
}

impl fmt::Display for Hi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hi::Finite(o) => write!(f, "{o}"),
            Hi::Unbounded => write!(f, "inf"),
        }
    }
}

/// An interval `[lo, hi]` of possible ranks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankBounds {
    pub lo: Ordinal,
    pub hi: Hi,
}

impl RankBounds {
    pub fn unknown() -> Self {
        RankBounds {
            lo: Ordinal::zero(),
            hi: Hi::Unbounded,
        }
    }

    pub fn exact(o: Ordinal) -> Self {
        RankBounds {
            lo: o.clone(),
            hi: Hi::Finite(o),
        }
    }

    pub fn finite(lo: u64, hi: u64) -> Self {
        RankBounds {
            lo: Ordinal::finite(lo),
            hi: Hi::Finite(Ordinal::finite(hi)),
        }
    }

    pub fn at_least(lo: Ordinal) -> Self {
        RankBounds { lo, hi: Hi::Unbounded }
    }

    pub fn at_most(hi: Ordinal) -> Self {
        RankBounds {
            lo: Ordinal::zero(),
            hi: Hi::Finite(hi),
        }
    }

    pub fn is_exact(&self) -> Option<&Ordinal> {
        match &self.hi {
            Hi::Finite(h) if *h == self.lo => Some(h),
            _ => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.hi.admits(&self.lo)
    }

    /// Both intervals hold; an empty result is an inconsistency, never clamped.
    pub fn intersect(&self, other: &RankBounds) -> Result<RankBounds, RankError> {
        let r = RankBounds {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.min(&other.hi),
        };
        if r.is_consistent() {
            Ok(r)
        } else {
            Err(RankError::Inconsistent {
                left: self.clone(),
                right: other.clone(),
            })
        }
    }
}

impl fmt::Display for RankBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl FromStr for RankBounds {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RankError::Parse(format!("bounds {s:?}"));
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        let lo: Ordinal = lo.parse().map_err(|_| bad())?;
        let hi = match hi.trim() {
            "inf" => Hi::Unbounded,
            h => Hi::Finite(h.parse().map_err(|_| bad())?),
        };
        Ok(RankBounds { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersect_narrows_or_fails() {
        let a = RankBounds::finite(1, 3);
        let b = RankBounds::at_least(Ordinal::finite(2));
        assert_eq!(a.intersect(&b).unwrap(), RankBounds::finite(2, 3));
        assert!(matches!(
            RankBounds::finite(0, 0).intersect(&RankBounds::at_least(Ordinal::finite(1))),
            Err(RankError::Inconsistent { .. })
        ));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["[0,inf]", "[3,3]", "[1,w+1]"] {
            assert_eq!(s.parse::<RankBounds>().unwrap().to_string(), s);
        }
        assert!("[1;2]".parse::<RankBounds>().is_err());
    }
}
