//! Ordinals below ω^ω in Cantor normal form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse ordinal {0:?}")]
pub struct OrdinalParseError(pub String);

/// `Σ ω^e·c` with strictly decreasing exponents and positive coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        Self::from_terms(vec![(0, n)])
    }

    pub fn omega() -> Self {
        Self::from_terms(vec![(1, 1)])
    }

    /// Normalizes: drops zero coefficients and merges out-of-order terms by addition.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Self {
        terms
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal { terms: vec![(e, c)] }))
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    /// Ordinal sum; terms of `self` below the leading exponent of `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(&(lead, lead_c)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(u32, u64)> = self.terms.iter().copied().filter(|&(e, _)| e > lead).collect();
        let same = self.terms.iter().find(|&&(e, _)| e == lead).map_or(0, |&(_, c)| c);
        terms.push((lead, same.saturating_add(lead_c)));
        terms.extend_from_slice(&other.terms[1..]);
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::finite(1))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let o = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OrdinalParseError(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (base, coeff) = match part.split_once('*') {
                Some((b, c)) => (b, c.parse::<u64>().map_err(|_| err())?),
                None => (part, 1),
            };
            let exp = if let Some(rest) = base.strip_prefix("w^") {
                rest.parse::<u32>().map_err(|_| err())?
            } else if base == "w" {
                1
            } else {
                if part.contains('*') {
                    return Err(err());
                }
                terms.push((0, base.parse::<u64>().map_err(|_| err())?));
                continue;
            };
            terms.push((exp, coeff));
        }
        let o = Ordinal::from_terms(terms.clone());
        // only canonical spellings are accepted, so printing is a bijection
        if o.terms != terms {
            return Err(err());
        }
        Ok(o)
    }
}
