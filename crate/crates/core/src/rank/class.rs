//! Borel class tags propagated through limits.

use std::fmt;

use super::ordinal::Ordinal;
use crate::filter::{FilterExpr, FilterFamily, FilterTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Sigma,
    Pi,
}

/// `Σ⁰_level` or `Π⁰_level`, `level ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelClass {
    pub kind: ClassKind,
    pub level: Ordinal,
}

impl BorelClass {
    pub fn sigma(level: u64) -> Self {
        BorelClass {
            kind: ClassKind::Sigma,
            level: Ordinal::finite(level),
        }
    }

    pub fn pi(level: u64) -> Self {
        BorelClass {
            kind: ClassKind::Pi,
            level: Ordinal::finite(level),
        }
    }

    /// `α` with `level = 1 + α`.
    fn alpha(&self) -> Option<Ordinal> {
        match self.level.as_finite() {
            Some(0) => None,
            Some(n) => Some(Ordinal::finite(n - 1)),
            None => Some(self.level.clone()),
        }
    }
}

impl fmt::Display for BorelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            ClassKind::Sigma => "Sigma",
            ClassKind::Pi => "Pi",
        };
        write!(f, "{k}^0_{}", self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassBound {
    Tag(BorelClass),
    Unknown,
}

impl fmt::Display for ClassBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassBound::Tag(c) => write!(f, "{c}"),
            ClassBound::Unknown => write!(f, "unknown"),
        }
    }
}

/// Class of a limit whose base lies in `Γ⁰_{1+α}` and whose members lie below level `β`:
/// `Γ⁰_{1+β+α}` with the base's kind.
pub fn limit_class(base: &BorelClass, beta: &Ordinal) -> Option<BorelClass> {
    let alpha = base.alpha()?;
    Some(BorelClass {
        kind: base.kind,
        level: Ordinal::finite(1).add(beta).add(&alpha),
    })
}

fn meet_class(a: BorelClass, b: BorelClass) -> BorelClass {
    if a.kind == b.kind {
        let level = a.level.max(b.level);
        return BorelClass { kind: a.kind, level };
    }
    // a Σ and a Π class of levels m < n both sit inside the higher one
    match a.level.cmp(&b.level) {
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Equal => BorelClass {
            kind: ClassKind::Sigma,
            level: a.level.succ(),
        },
    }
}

fn members_beta(t: &FilterTable) -> Option<Ordinal> {
    let mut top = Ordinal::zero();
    for f in t.members() {
        top = top.max(class_of(f)?.level);
    }
    Some(top.succ())
}

fn class_of(f: &FilterExpr) -> Option<BorelClass> {
    match f {
        // an intersection of the clopen sets {A : x ∈ A}
        FilterExpr::Principal(_) => Some(BorelClass::pi(1)),
        // a countable union of the closed sets {A : A ⊇ X \ F}, F finite
        FilterExpr::Frechet(_) => Some(BorelClass::sigma(2)),
        FilterExpr::Product { outer, inner } => limit_class(&class_of(outer)?, &class_of(inner)?.level.succ()),
        FilterExpr::FubiniSum { base, family } => limit_class(&class_of(base)?, &members_beta(family)?),
        FilterExpr::Limit { base, family } => {
            let t = match family {
                FilterFamily::Table(t) | FilterFamily::Lifted { table: t, .. } => t,
                FilterFamily::Repeated(inner) => inner.base_table(),
            };
            limit_class(&class_of(base)?, &members_beta(t)?)
        }
        FilterExpr::Intersection(a, b) => Some(meet_class(class_of(a)?, class_of(b)?)),
        // a bijection of the underlying set is a homeomorphism of the power set
        FilterExpr::Pushforward { inner, .. } => class_of(inner),
    }
}

/// A Borel class containing `f`, by structural propagation.
pub fn borel_class_bound(f: &FilterExpr) -> ClassBound {
    class_of(f).map_or(ClassBound::Unknown, ClassBound::Tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainExpr;

    #[test]
    fn formula_instances() {
        let c = limit_class(&BorelClass::pi(2), &Ordinal::finite(2)).unwrap();
        assert_eq!(c, BorelClass::pi(4));
        let c = limit_class(&BorelClass::pi(1), &Ordinal::finite(1)).unwrap();
        assert_eq!(c, BorelClass::pi(2));
        assert_eq!(c.to_string(), "Pi^0_2");
    }

    #[test]
    fn propagated_through_a_frechet_limit() {
        let fr = FilterExpr::Frechet(DomainExpr::Nat);
        let lim = FilterExpr::limit(fr.clone(), FilterFamily::Table(FilterTable::constant(fr))).unwrap();
        // Σ⁰₂ base (α = 1), Σ⁰₂ members (β = 3)
        assert_eq!(borel_class_bound(&lim), ClassBound::Tag(BorelClass::sigma(5)));
    }
}
