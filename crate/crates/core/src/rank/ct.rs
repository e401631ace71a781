//! Countable-type levels: nesting depth of Fréchet limits over principal ultrafilters.

use std::fmt;

use crate::filter::{FilterExpr, FilterFamily, FilterTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtBound {
    Level(u32),
    Unknown,
}

impl CtBound {
    pub fn level(self) -> Option<u32> {
        match self {
            CtBound::Level(n) => Some(n),
            CtBound::Unknown => None,
        }
    }
}

impl fmt::Display for CtBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtBound::Level(n) => write!(f, "<= {n}"),
            CtBound::Unknown => write!(f, "unknown"),
        }
    }
}

fn is_frechet(f: &FilterExpr) -> bool {
    matches!(f, FilterExpr::Frechet(_))
}

fn one_above(levels: impl IntoIterator<Item = Option<u32>>) -> Option<u32> {
    let mut m = 0;
    for l in levels {
        m = m.max(l?);
    }
    Some(m + 1)
}

fn table_levels(t: &FilterTable) -> Vec<Option<u32>> {
    t.members().map(ct_level).collect()
}

fn ct_level(f: &FilterExpr) -> Option<u32> {
    match f {
        FilterExpr::Principal(e) => match e.finite_count() {
            Some(1) => Some(0),
            // a Fréchet limit of the point masses of E, each repeated forever
            _ if !e.is_empty() => Some(1),
            _ => None,
        },
        // the Fréchet limit of the point masses along an enumeration
        FilterExpr::Frechet(_) => Some(1),
        FilterExpr::Product { outer, inner } if is_frechet(outer) => one_above([ct_level(inner)]),
        // a Fubini sum is the limit of its lifted members, and lifting keeps the level
        FilterExpr::FubiniSum { base, family } if is_frechet(base) => one_above(table_levels(family)),
        FilterExpr::Limit { base, family } if is_frechet(base) => {
            let t = match family {
                FilterFamily::Table(t) | FilterFamily::Lifted { table: t, .. } => t,
                FilterFamily::Repeated(inner) => inner.base_table(),
            };
            one_above(table_levels(t))
        }
        // the Fréchet limit of the alternating sequence f, g, f, g, ...
        FilterExpr::Intersection(f, g) => one_above([ct_level(f), ct_level(g)]),
        FilterExpr::Pushforward { inner, .. } => ct_level(inner),
        _ => None,
    }
}

/// An upper bound on the countable type of `f` read off its syntax.
pub fn ct_bound(f: &FilterExpr) -> CtBound {
    ct_level(f).map_or(CtBound::Unknown, CtBound::Level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainExpr;
    use crate::set::SetExpr;

    fn fr() -> FilterExpr {
        FilterExpr::Frechet(DomainExpr::Nat)
    }

    #[test]
    fn levels() {
        assert_eq!(
            ct_bound(&FilterExpr::Principal(SetExpr::nat_fin([3]))),
            CtBound::Level(0)
        );
        assert_eq!(ct_bound(&fr()), CtBound::Level(1));
        let n2 = FilterExpr::product(fr(), fr()).unwrap();
        assert_eq!(ct_bound(&n2), CtBound::Level(2));
        let singletons = FilterExpr::limit(
            fr(),
            FilterFamily::table(
                (0..4)
                    .map(|i| (i, FilterExpr::Principal(SetExpr::nat_fin([i]))))
                    .collect(),
                FilterExpr::Principal(SetExpr::nat_fin([9])),
            ),
        )
        .unwrap();
        assert_eq!(ct_bound(&singletons), CtBound::Level(1));
        let principal_base = FilterExpr::limit(
            FilterExpr::Principal(SetExpr::nat_fin([0])),
            FilterFamily::Table(FilterTable::constant(fr())),
        )
        .unwrap();
        assert_eq!(ct_bound(&principal_base), CtBound::Unknown);
    }
}
