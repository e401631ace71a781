//! Membership in the separating set `S = ⋃_n ⋃_m ⋂_{k>m} ⋃_{i ∈ Z_n^k} S_i` of a limit.

use std::fmt;
use std::sync::Arc;

use super::universal::{threshold, UniversalFamily};
use super::GameError;
use crate::domain::Point;
use crate::filter::{FilterExpr, FilterFamily};
use crate::rank::engine::syntactically_borel;
use crate::rank::{rank_bounds, Ordinal};
use crate::set::SetExpr;

/// Window inspected when the separators or the family are given by code.
pub const SEARCH_BOUND: u64 = 200;

/// Membership of a set in `S_i`.
pub type SectionTest = Arc<dyn Fn(u64, &SetExpr) -> bool + Send + Sync>;

/// The sets `S_i`, read as families of subsets.
#[derive(Clone)]
pub enum SeparatorFamily {
    /// `S_i` is the `i`-th filter of the family (a proper filter separates itself from its dual).
    Filters(FilterFamily),
    Custom {
        label: String,
        contains: SectionTest,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    In,
    Out,
    /// Undecided within the given search bound.
    Unknown(u64),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::In => write!(f, "in"),
            Verdict::Out => write!(f, "out"),
            Verdict::Unknown(b) => write!(f, "unknown (searched k <= {b})"),
        }
    }
}

/// Decides `A ∈ S` for a limit over a Borel filter of rank 1.
///
/// With `W = {i : A ∈ S_i}` the set is `A ∈ S ⟺ ∃n ∀^∞k Z_n^k ∩ W ≠ ∅`. When `W` is
/// eventually uniform and the family is built in, the clause is constant beyond the
/// listed exceptions and the answer is exact.
pub fn separator_verdict(
    lim: &FilterExpr,
    u: &UniversalFamily,
    sep: &SeparatorFamily,
    a: &SetExpr,
) -> Result<Verdict, GameError> {
    let FilterExpr::Limit { base, family } = lim else {
        return Err(GameError::Precondition(format!("{lim} is not a limit")));
    };
    let (b, _) = rank_bounds(base)?;
    if !syntactically_borel(base) || b.is_exact() != Some(&Ordinal::finite(1)) {
        return Err(GameError::Precondition(format!(
            "base {base} is not a Borel filter of rank 1"
        )));
    }
    if u.domain() != family.index_domain() {
        return Err(GameError::Precondition(format!(
            "universal family lives on {}, the limit is indexed by {}",
            u.domain(),
            family.index_domain()
        )));
    }
    let w = match sep {
        SeparatorFamily::Filters(ff) => {
            if ff.index_domain() != family.index_domain() {
                return Err(GameError::Precondition("separators indexed differently".into()));
            }
            ff.index_set(a)?
        }
        SeparatorFamily::Custom { .. } => return Ok(Verdict::Unknown(SEARCH_BOUND)),
    };
    let n = match u {
        UniversalFamily::ColumnSegments => {
            let tail = w
                .tail_section()
                .ok_or_else(|| GameError::Precondition("index set without columns".into()))?;
            match super::strategy::first_points(tail, 1, &Default::default()).first() {
                Some(Point::Nat(j)) => *j,
                _ => return Ok(Verdict::Out),
            }
        }
        UniversalFamily::Custom { .. } => {
            return Ok(Verdict::Unknown(SEARCH_BOUND));
        }
        _ => 0,
    };
    let (t, _) = threshold(u, n, &w, SEARCH_BOUND)?;
    Ok(if t.is_some() { Verdict::In } else { Verdict::Out })
}
