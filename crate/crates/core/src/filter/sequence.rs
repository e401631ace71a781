//! Eventually-uniform rational sequences and their limits along a filter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;

use super::{FilterError, FilterExpr};
use crate::domain::DomainExpr;
use crate::set::{SetError, SetExpr};

/// Values of a sequence, mirroring the section-family layout of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqValues {
    /// The same value at every point below this level.
    Const(Rational64),
    /// Per-index values at this level: listed exceptions, `tail` elsewhere.
    Table {
        exceptions: BTreeMap<u64, SeqValues>,
        tail: Box<SeqValues>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSpec {
    pub domain: DomainExpr,
    pub values: SeqValues,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Flim {
    Value(Rational64),
    Divergent,
}

impl fmt::Display for Flim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flim::Value(v) => write!(f, "{v}"),
            Flim::Divergent => write!(f, "divergent"),
        }
    }
}

impl SeqValues {
    pub fn constant(v: i64) -> Self {
        SeqValues::Const(Rational64::from_integer(v))
    }

    fn attained(&self, out: &mut BTreeSet<Rational64>) {
        match self {
            SeqValues::Const(v) => {
                out.insert(*v);
            }
            SeqValues::Table { exceptions, tail } => {
                tail.attained(out);
                for s in exceptions.values() {
                    s.attained(out);
                }
            }
        }
    }

    /// `{p : s(p) = v}` over `domain`.
    fn level_set(&self, domain: &DomainExpr, v: Rational64) -> Result<SetExpr, SetError> {
        match (self, domain) {
            (SeqValues::Const(c), _) => Ok(if *c == v {
                SetExpr::full(domain)
            } else {
                SetExpr::empty(domain)
            }),
            (SeqValues::Table { exceptions, tail }, DomainExpr::Nat) => {
                let flat = |s: &SeqValues| match s {
                    SeqValues::Const(c) => Ok(*c == v),
                    SeqValues::Table { .. } => Err(SetError::WrongShape {
                        needed: "a constant at the innermost level",
                        found: DomainExpr::Nat,
                    }),
                };
                let tail_in = flat(tail)?;
                let mut flips = Vec::new();
                for (&k, s) in exceptions {
                    if flat(s)? != tail_in {
                        flips.push(k);
                    }
                }
                Ok(if tail_in {
                    SetExpr::nat_cofin(flips)
                } else {
                    SetExpr::nat_fin(flips)
                })
            }
            (SeqValues::Table { exceptions, tail }, d) if d.is_indexed() => {
                let mut keys: BTreeSet<u64> = exceptions.keys().copied().collect();
                keys.extend(d.irregular_indices());
                let mut table = BTreeMap::new();
                for k in keys {
                    let s = exceptions.get(&k).unwrap_or(tail);
                    table.insert(k, s.level_set(d.component(k).unwrap(), v)?);
                }
                let t = tail.level_set(d.tail_component().unwrap(), v)?;
                SetExpr::sections(d.clone(), table, t)
            }
            (_, d) => Err(SetError::WrongShape {
                needed: "Nat, Prod or DSum",
                found: d.clone(),
            }),
        }
    }
}

impl SequenceSpec {
    pub fn new(domain: DomainExpr, values: SeqValues) -> Result<Self, SetError> {
        let s = SequenceSpec { domain, values };
        let mut vals = BTreeSet::new();
        s.values.attained(&mut vals);
        for v in vals {
            s.values.level_set(&s.domain, v)?;
        }
        Ok(s)
    }

    /// Values taken on a nonempty set of points.
    pub fn attained_values(&self) -> Result<Vec<Rational64>, SetError> {
        let mut vals = BTreeSet::new();
        self.values.attained(&mut vals);
        let mut out = Vec::new();
        for v in vals {
            if !self.values.level_set(&self.domain, v)?.is_empty() {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn level_set(&self, v: Rational64) -> Result<SetExpr, SetError> {
        self.values.level_set(&self.domain, v)
    }
}

/// The `F`-limit of a sequence.
///
/// An eventually-uniform sequence attains finitely many values, so below half the
/// least gap between them the `ε`-ball around a candidate is its level set.
pub fn flim(s: &SequenceSpec, f: &FilterExpr) -> Result<Flim, FilterError> {
    let d = f.domain()?;
    if d != s.domain {
        return Err(FilterError::DomainMismatch {
            context: "flim",
            expected: d,
            found: s.domain.clone(),
        });
    }
    for v in s.attained_values()? {
        if f.member_unchecked(&s.level_set(v)?)? {
            return Ok(Flim::Value(v));
        }
    }
    Ok(Flim::Divergent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::SetExpr;

    fn table(exc: Vec<(u64, SeqValues)>, tail: SeqValues) -> SeqValues {
        SeqValues::Table {
            exceptions: exc.into_iter().collect(),
            tail: Box::new(tail),
        }
    }

    #[test]
    fn eventually_constant() {
        let s = SequenceSpec::new(
            DomainExpr::Nat,
            table(
                (0..5).map(|i| (i, SeqValues::constant(0))).collect(),
                SeqValues::constant(7),
            ),
        )
        .unwrap();
        let fr = FilterExpr::Frechet(DomainExpr::Nat);
        assert_eq!(flim(&s, &fr).unwrap(), Flim::Value(Rational64::from_integer(7)));
    }

    #[test]
    fn principal_reads_the_point() {
        let s = SequenceSpec::new(
            DomainExpr::Nat,
            table(vec![(0, SeqValues::constant(1))], SeqValues::constant(1)),
        )
        .unwrap();
        let p = FilterExpr::Principal(SetExpr::nat_fin([0]));
        assert_eq!(flim(&s, &p).unwrap(), Flim::Value(Rational64::from_integer(1)));
        let alt = SequenceSpec::new(
            DomainExpr::Nat,
            table(vec![(0, SeqValues::constant(2))], SeqValues::constant(1)),
        )
        .unwrap();
        assert_eq!(flim(&alt, &p).unwrap(), Flim::Value(Rational64::from_integer(2)));
    }

    #[test]
    fn divergent_under_principal_pair() {
        let alt = SequenceSpec::new(
            DomainExpr::Nat,
            table(vec![(0, SeqValues::constant(2))], SeqValues::constant(1)),
        )
        .unwrap();
        let p = FilterExpr::Principal(SetExpr::nat_fin([0, 1]));
        assert_eq!(flim(&alt, &p).unwrap(), Flim::Divergent);
    }
}
