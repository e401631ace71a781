//! Symbolic subsets of structured domains in eventually-uniform normal form.
//!
//! Over `Unit` and `Nat` a set is a finite or cofinite point set. Over a product
//! or sum it is a finite table of exceptional sections plus one tail section
//! shared by every other index. Boolean operations and sections stay inside this
//! class, which is what makes every filter membership question decidable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{point_in_domain, truncated_points, DomainExpr, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: DomainExpr, found: DomainExpr },
    #[error("point {point} does not belong to domain {domain}")]
    ShapeMismatch { point: Point, domain: DomainExpr },
    #[error("set is not in normal form: {0}")]
    NotNormal(String),
    #[error("operation needs a set over {needed}, got one over {found}")]
    WrongShape { needed: &'static str, found: DomainExpr },
}

/// A symbolic subset of a structured countable domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetExpr {
    Fin {
        elements: BTreeSet<Point>,
        domain: DomainExpr,
    },
    Cofin {
        excluded: BTreeSet<Point>,
        domain: DomainExpr,
    },
    Sections {
        exceptions: BTreeMap<u64, SetExpr>,
        tail: Box<SetExpr>,
        domain: DomainExpr,
    },
}

/// Finite/cofinite reading of a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NatClass {
    Finite(u64),
    Cofinite(u64),
}

/// Finite/cofinite reading of a set over an arbitrary domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetClass {
    Finite(u64),
    Cofinite(u64),
    /// Infinite with infinite complement.
    Split,
}

#[derive(Clone, Copy)]
enum Op {
    And,
    Or,
}

impl SetExpr {
    fn leaf(domain: &DomainExpr, complemented: bool, mut pts: BTreeSet<Point>) -> SetExpr {
        if *domain == DomainExpr::Unit {
            let has = pts.contains(&Point::Unit) != complemented;
            pts.clear();
            if has {
                pts.insert(Point::Unit);
            }
            return SetExpr::Fin {
                elements: pts,
                domain: DomainExpr::Unit,
            };
        }
        if complemented {
            SetExpr::Cofin {
                excluded: pts,
                domain: domain.clone(),
            }
        } else {
            SetExpr::Fin {
                elements: pts,
                domain: domain.clone(),
            }
        }
    }

    fn check_leaf(domain: &DomainExpr, pts: &BTreeSet<Point>) -> Result<(), SetError> {
        if !matches!(domain, DomainExpr::Unit | DomainExpr::Nat) {
            return Err(SetError::WrongShape {
                needed: "Unit or Nat",
                found: domain.clone(),
            });
        }
        for p in pts {
            if !point_in_domain(p, domain) {
                return Err(SetError::ShapeMismatch {
                    point: p.clone(),
                    domain: domain.clone(),
                });
            }
        }
        Ok(())
    }

    /// A finite set over `Unit` or `Nat`.
    pub fn fin(domain: DomainExpr, elements: impl IntoIterator<Item = Point>) -> Result<SetExpr, SetError> {
        let pts: BTreeSet<Point> = elements.into_iter().collect();
        Self::check_leaf(&domain, &pts)?;
        Ok(Self::leaf(&domain, false, pts))
    }

    /// A cofinite set over `Unit` or `Nat`.
    pub fn cofin(domain: DomainExpr, excluded: impl IntoIterator<Item = Point>) -> Result<SetExpr, SetError> {
        let pts: BTreeSet<Point> = excluded.into_iter().collect();
        Self::check_leaf(&domain, &pts)?;
        Ok(Self::leaf(&domain, true, pts))
    }

    pub fn nat_fin(elements: impl IntoIterator<Item = u64>) -> SetExpr {
        Self::leaf(&DomainExpr::Nat, false, elements.into_iter().map(Point::Nat).collect())
    }

    pub fn nat_cofin(excluded: impl IntoIterator<Item = u64>) -> SetExpr {
        Self::leaf(&DomainExpr::Nat, true, excluded.into_iter().map(Point::Nat).collect())
    }

    /// A section family over a product or sum domain. Exceptions equal to the
    /// tail are dropped.
    pub fn sections(
        domain: DomainExpr,
        exceptions: BTreeMap<u64, SetExpr>,
        tail: SetExpr,
    ) -> Result<SetExpr, SetError> {
        let tail_dom = domain.tail_component().ok_or_else(|| SetError::WrongShape {
            needed: "Prod or DSum",
            found: domain.clone(),
        })?;
        if tail.domain() != tail_dom {
            return Err(SetError::DomainMismatch {
                expected: tail_dom.clone(),
                found: tail.domain().clone(),
            });
        }
        for (&k, s) in &exceptions {
            let comp = domain.component(k).expect("indexed domain");
            if s.domain() != comp {
                return Err(SetError::DomainMismatch {
                    expected: comp.clone(),
                    found: s.domain().clone(),
                });
            }
        }
        for i in domain.irregular_indices() {
            if !exceptions.contains_key(&i) {
                return Err(SetError::NotNormal(format!(
                    "section {i} of {domain} lies over a non-tail component and must be listed"
                )));
            }
        }
        Ok(Self::sections_unchecked(domain, exceptions, tail))
    }

    fn sections_unchecked(domain: DomainExpr, mut exceptions: BTreeMap<u64, SetExpr>, tail: SetExpr) -> SetExpr {
        exceptions.retain(|_, s| *s != tail);
        SetExpr::Sections {
            exceptions,
            tail: Box::new(tail),
            domain,
        }
    }

    pub fn empty(domain: &DomainExpr) -> SetExpr {
        Self::constant(domain, false)
    }

    pub fn full(domain: &DomainExpr) -> SetExpr {
        Self::constant(domain, true)
    }

    fn constant(domain: &DomainExpr, full: bool) -> SetExpr {
        match domain {
            DomainExpr::Unit | DomainExpr::Nat => Self::leaf(domain, full, BTreeSet::new()),
            _ => {
                let tail = Self::constant(domain.tail_component().unwrap(), full);
                let exceptions = domain
                    .irregular_indices()
                    .into_iter()
                    .map(|i| (i, Self::constant(domain.component(i).unwrap(), full)))
                    .collect();
                Self::sections_unchecked(domain.clone(), exceptions, tail)
            }
        }
    }

    /// The finite set of the given points over any domain.
    pub fn from_points(domain: &DomainExpr, points: impl IntoIterator<Item = Point>) -> Result<SetExpr, SetError> {
        let pts: Vec<Point> = points.into_iter().collect();
        for p in &pts {
            if !point_in_domain(p, domain) {
                return Err(SetError::ShapeMismatch {
                    point: p.clone(),
                    domain: domain.clone(),
                });
            }
        }
        Ok(Self::from_points_unchecked(domain, pts))
    }

    fn from_points_unchecked(domain: &DomainExpr, pts: Vec<Point>) -> SetExpr {
        match domain {
            DomainExpr::Unit | DomainExpr::Nat => Self::leaf(domain, false, pts.into_iter().collect()),
            _ => {
                let mut grouped: BTreeMap<u64, Vec<Point>> = BTreeMap::new();
                for p in pts {
                    let i = p.head().unwrap();
                    grouped.entry(i).or_default().push(p.rest().unwrap().clone());
                }
                let mut exceptions: BTreeMap<u64, SetExpr> = domain
                    .irregular_indices()
                    .into_iter()
                    .map(|i| (i, Self::empty(domain.component(i).unwrap())))
                    .collect();
                for (i, inner) in grouped {
                    exceptions.insert(i, Self::from_points_unchecked(domain.component(i).unwrap(), inner));
                }
                let tail = Self::empty(domain.tail_component().unwrap());
                Self::sections_unchecked(domain.clone(), exceptions, tail)
            }
        }
    }

    /// The complement of a finite point set over any domain.
    pub fn cofinite_points(domain: &DomainExpr, points: impl IntoIterator<Item = Point>) -> Result<SetExpr, SetError> {
        Ok(Self::from_points(domain, points)?.complement())
    }

    pub fn domain(&self) -> &DomainExpr {
        match self {
            SetExpr::Fin { domain, .. } | SetExpr::Cofin { domain, .. } | SetExpr::Sections { domain, .. } => domain,
        }
    }

    /// Checks every normal-form invariant recursively.
    pub fn validate(&self) -> Result<(), SetError> {
        match self {
            SetExpr::Fin { elements, domain } => {
                Self::check_leaf(domain, elements)?;
                Ok(())
            }
            SetExpr::Cofin { excluded, domain } => {
                Self::check_leaf(domain, excluded)?;
                if *domain == DomainExpr::Unit {
                    return Err(SetError::NotNormal("cofinite set over Unit".into()));
                }
                Ok(())
            }
            SetExpr::Sections {
                exceptions,
                tail,
                domain,
            } => {
                let rebuilt = Self::sections(domain.clone(), exceptions.clone(), (**tail).clone())?;
                if rebuilt != *self {
                    return Err(SetError::NotNormal("exception section equal to the tail".into()));
                }
                tail.validate()?;
                exceptions.values().try_for_each(SetExpr::validate)
            }
        }
    }

    fn check_domain(&self, other: &SetExpr) -> Result<(), SetError> {
        if self.domain() != other.domain() {
            return Err(SetError::DomainMismatch {
                expected: self.domain().clone(),
                found: other.domain().clone(),
            });
        }
        Ok(())
    }

    /// Membership by structural recursion.
    pub fn contains(&self, p: &Point) -> Result<bool, SetError> {
        if !point_in_domain(p, self.domain()) {
            return Err(SetError::ShapeMismatch {
                point: p.clone(),
                domain: self.domain().clone(),
            });
        }
        Ok(self.contains_unchecked(p))
    }

    fn contains_unchecked(&self, p: &Point) -> bool {
        match self {
            SetExpr::Fin { elements, .. } => elements.contains(p),
            SetExpr::Cofin { excluded, .. } => !excluded.contains(p),
            SetExpr::Sections { .. } => self
                .section_ref(p.head().unwrap())
                .contains_unchecked(p.rest().unwrap()),
        }
    }

    /// The `i`-th section of a section family.
    pub fn section(&self, i: u64) -> Result<SetExpr, SetError> {
        match self {
            SetExpr::Sections { .. } => Ok(self.section_ref(i).clone()),
            _ => Err(SetError::WrongShape {
                needed: "Prod or DSum",
                found: self.domain().clone(),
            }),
        }
    }

    pub(crate) fn section_ref(&self, i: u64) -> &SetExpr {
        match self {
            SetExpr::Sections { exceptions, tail, .. } => exceptions.get(&i).unwrap_or(tail),
            _ => panic!("section of a leaf set"),
        }
    }

    /// Exception keys of a section family (empty for leaves).
    pub fn exception_keys(&self) -> BTreeSet<u64> {
        match self {
            SetExpr::Sections { exceptions, .. } => exceptions.keys().copied().collect(),
            _ => BTreeSet::new(),
        }
    }

    pub fn tail_section(&self) -> Option<&SetExpr> {
        match self {
            SetExpr::Sections { tail, .. } => Some(tail),
            _ => None,
        }
    }

    fn combine(&self, other: &SetExpr, op: Op) -> SetExpr {
        match (self, other) {
            (SetExpr::Sections { domain, .. }, SetExpr::Sections { .. }) => {
                let keys: BTreeSet<u64> = self.exception_keys().union(&other.exception_keys()).copied().collect();
                let exceptions = keys
                    .into_iter()
                    .map(|k| (k, self.section_ref(k).combine(other.section_ref(k), op)))
                    .collect();
                let tail = self.tail_section().unwrap().combine(other.tail_section().unwrap(), op);
                Self::sections_unchecked(domain.clone(), exceptions, tail)
            }
            _ => {
                let (ca, a) = self.leaf_parts();
                let (cb, b) = other.leaf_parts();
                let domain = self.domain();
                match (op, ca, cb) {
                    (Op::Or, false, false) => Self::leaf(domain, false, a.union(b).cloned().collect()),
                    (Op::Or, false, true) => Self::leaf(domain, true, b.difference(a).cloned().collect()),
                    (Op::Or, true, false) => Self::leaf(domain, true, a.difference(b).cloned().collect()),
                    (Op::Or, true, true) => Self::leaf(domain, true, a.intersection(b).cloned().collect()),
                    (Op::And, false, false) => Self::leaf(domain, false, a.intersection(b).cloned().collect()),
                    (Op::And, false, true) => Self::leaf(domain, false, a.difference(b).cloned().collect()),
                    (Op::And, true, false) => Self::leaf(domain, false, b.difference(a).cloned().collect()),
                    (Op::And, true, true) => Self::leaf(domain, true, a.union(b).cloned().collect()),
                }
            }
        }
    }

    fn leaf_parts(&self) -> (bool, &BTreeSet<Point>) {
        match self {
            SetExpr::Fin { elements, .. } => (false, elements),
            SetExpr::Cofin { excluded, .. } => (true, excluded),
            SetExpr::Sections { .. } => panic!("leaf_parts of a section family"),
        }
    }

    pub fn union(&self, other: &SetExpr) -> Result<SetExpr, SetError> {
        self.check_domain(other)?;
        Ok(self.combine(other, Op::Or))
    }

    pub fn intersect(&self, other: &SetExpr) -> Result<SetExpr, SetError> {
        self.check_domain(other)?;
        Ok(self.combine(other, Op::And))
    }

    pub fn difference(&self, other: &SetExpr) -> Result<SetExpr, SetError> {
        self.intersect(&other.complement())
    }

    pub fn complement(&self) -> SetExpr {
        match self {
            SetExpr::Fin { elements, domain } => Self::leaf(domain, true, elements.clone()),
            SetExpr::Cofin { excluded, domain } => Self::leaf(domain, false, excluded.clone()),
            SetExpr::Sections {
                exceptions,
                tail,
                domain,
            } => Self::sections_unchecked(
                domain.clone(),
                exceptions.iter().map(|(&k, s)| (k, s.complement())).collect(),
                tail.complement(),
            ),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SetExpr::Fin { elements, .. } => elements.is_empty(),
            // cofinite sets only live over Nat after normalization
            SetExpr::Cofin { .. } => false,
            SetExpr::Sections { exceptions, tail, .. } => tail.is_empty() && exceptions.values().all(SetExpr::is_empty),
        }
    }

    pub fn is_full(&self) -> bool {
        self.complement().is_empty()
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SetExpr::Fin { .. } => true,
            SetExpr::Cofin { .. } => false,
            SetExpr::Sections { exceptions, tail, .. } => {
                tail.is_empty() && exceptions.values().all(SetExpr::is_finite)
            }
        }
    }

    pub fn is_cofinite(&self) -> bool {
        self.complement().is_finite()
    }

    /// Number of points of a finite set.
    pub fn finite_count(&self) -> Option<u64> {
        match self {
            SetExpr::Fin { elements, .. } => Some(elements.len() as u64),
            SetExpr::Cofin { .. } => None,
            SetExpr::Sections { exceptions, tail, .. } => {
                if !tail.is_empty() {
                    return None;
                }
                exceptions.values().map(SetExpr::finite_count).sum()
            }
        }
    }

    /// All points of a finite set, in canonical order.
    pub fn finite_points(&self) -> Option<Vec<Point>> {
        match self {
            SetExpr::Fin { elements, .. } => Some(elements.iter().cloned().collect()),
            SetExpr::Cofin { .. } => None,
            SetExpr::Sections {
                exceptions,
                tail,
                domain,
            } => {
                if !tail.is_empty() {
                    return None;
                }
                let mut out = Vec::new();
                for (&k, s) in exceptions {
                    for p in s.finite_points()? {
                        out.push(match domain {
                            DomainExpr::Prod(_) => Point::pair(k, p),
                            _ => Point::sum(k, p),
                        });
                    }
                }
                Some(out)
            }
        }
    }

    /// Exact finite/cofinite classification of a set over `Unit` or `Nat`.
    pub fn classify_nat(&self) -> Result<NatClass, SetError> {
        match self {
            SetExpr::Fin { elements, .. } => Ok(NatClass::Finite(elements.len() as u64)),
            SetExpr::Cofin { excluded, .. } => Ok(NatClass::Cofinite(excluded.len() as u64)),
            SetExpr::Sections { domain, .. } => Err(SetError::WrongShape {
                needed: "Unit or Nat",
                found: domain.clone(),
            }),
        }
    }

    pub fn classify(&self) -> SetClass {
        if let Some(n) = self.finite_count() {
            SetClass::Finite(n)
        } else if let Some(n) = self.complement().finite_count() {
            SetClass::Cofinite(n)
        } else {
            SetClass::Split
        }
    }

    /// `self ⊆ other`, decided as emptiness of `self ∖ other`.
    pub fn subset_of(&self, other: &SetExpr) -> Result<bool, SetError> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Member points with every coordinate `< bound`, in canonical order.
    pub fn truncate(&self, bound: u64) -> Vec<Point> {
        match self {
            SetExpr::Fin { elements, .. } => elements
                .iter()
                .filter(|p| p.coords().iter().all(|&c| c < bound))
                .cloned()
                .collect(),
            SetExpr::Cofin { excluded, domain } => truncated_points(domain, bound)
                .into_iter()
                .filter(|p| !excluded.contains(p))
                .collect(),
            SetExpr::Sections { domain, .. } => {
                let wrap = |i: u64, p: Point| match domain {
                    DomainExpr::Prod(_) => Point::pair(i, p),
                    _ => Point::sum(i, p),
                };
                (0..bound)
                    .flat_map(|i| self.section_ref(i).truncate(bound).into_iter().map(move |p| wrap(i, p)))
                    .collect()
            }
        }
    }

    /// Every natural number mentioned by the description (point coordinates and keys).
    pub fn collect_support(&self, out: &mut BTreeSet<u64>) {
        match self {
            SetExpr::Fin { elements: pts, .. } | SetExpr::Cofin { excluded: pts, .. } => {
                for p in pts {
                    out.extend(p.coords());
                }
            }
            SetExpr::Sections { exceptions, tail, .. } => {
                out.extend(exceptions.keys().copied());
                for s in exceptions.values() {
                    s.collect_support(out);
                }
                tail.collect_support(out);
            }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn points(f: &mut fmt::Formatter<'_>, pts: &BTreeSet<Point>) -> fmt::Result {
            for (i, p) in pts.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            Ok(())
        }
        match self {
            SetExpr::Fin { elements, .. } => {
                write!(f, "fin{{")?;
                points(f, elements)?;
                write!(f, "}}")
            }
            SetExpr::Cofin { excluded, .. } => {
                write!(f, "cofin{{")?;
                points(f, excluded)?;
                write!(f, "}}")
            }
            SetExpr::Sections { exceptions, tail, .. } => {
                write!(f, "sections({{")?;
                for (i, (k, s)) in exceptions.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}: {s}")?;
                }
                write!(f, "}}, {tail})")
            }
        }
    }
}

/// A subset given by a decision procedure instead of a normal form.
///
/// Only truncations of such sets are ever inspected.
#[derive(Clone)]
pub struct ProgrammaticSet {
    pub domain: DomainExpr,
    pub label: String,
    pub truncation_bound: u64,
    predicate: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
}

impl ProgrammaticSet {
    pub fn new(
        domain: DomainExpr,
        label: impl Into<String>,
        truncation_bound: u64,
        predicate: impl Fn(&Point) -> bool + Send + Sync + 'static,
    ) -> Self {
        ProgrammaticSet {
            domain,
            label: label.into(),
            truncation_bound,
            predicate: Arc::new(predicate),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.predicate)(p)
    }

    pub fn truncate(&self, bound: u64) -> Vec<Point> {
        truncated_points(&self.domain, bound)
            .into_iter()
            .filter(|p| self.contains(p))
            .collect()
    }
}

impl fmt::Debug for ProgrammaticSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProgrammaticSet")
            .field("domain", &self.domain)
            .field("label", &self.label)
            .field("truncation_bound", &self.truncation_bound)
            .finish()
    }
}

/// Anything that can be listed up to a coordinate bound.
pub trait Truncate {
    fn truncate_to(&self, bound: u64) -> Vec<Point>;
}

impl Truncate for SetExpr {
    fn truncate_to(&self, bound: u64) -> Vec<Point> {
        self.truncate(bound)
    }
}

impl Truncate for ProgrammaticSet {
    fn truncate_to(&self, bound: u64) -> Vec<Point> {
        self.truncate(bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega2() -> DomainExpr {
        DomainExpr::prod(DomainExpr::Nat)
    }

    fn fam(exc: Vec<(u64, SetExpr)>, tail: SetExpr) -> SetExpr {
        SetExpr::sections(omega2(), exc.into_iter().collect(), tail).unwrap()
    }

    #[test]
    fn member_examples() {
        let a = SetExpr::nat_cofin([4]);
        assert!(!a.contains(&Point::Nat(4)).unwrap());
        let full_tail = fam(vec![], SetExpr::nat_cofin([]));
        assert!(full_tail.contains(&Point::pair(7, Point::Nat(0))).unwrap());
        let b = fam(vec![(0, SetExpr::nat_fin([2]))], SetExpr::nat_cofin([]));
        assert!(!b.contains(&Point::pair(0, Point::Nat(1))).unwrap());
        assert!(b.contains(&Point::pair(0, Point::Nat(2))).unwrap());
        assert!(matches!(
            b.contains(&Point::Nat(1)),
            Err(SetError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(SetExpr::nat_fin([1, 2]).complement(), SetExpr::nat_cofin([1, 2]));
        assert_eq!(
            SetExpr::nat_cofin([1]).union(&SetExpr::nat_cofin([2])).unwrap(),
            SetExpr::nat_cofin([])
        );
        let a = fam(vec![(0, SetExpr::nat_cofin([]))], SetExpr::nat_fin([]));
        let b = fam(vec![], SetExpr::nat_cofin([]));
        assert_eq!(a.intersect(&b).unwrap(), a);
        assert!(matches!(
            SetExpr::nat_fin([]).union(&b),
            Err(SetError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(SetExpr::nat_fin([1, 5, 9]).classify_nat().unwrap(), NatClass::Finite(3));
        assert_eq!(SetExpr::nat_cofin([]).classify_nat().unwrap(), NatClass::Cofinite(0));
        let u = SetExpr::nat_fin([0]).union(&SetExpr::nat_cofin([0, 1])).unwrap();
        assert_eq!(u.classify_nat().unwrap(), NatClass::Cofinite(1));
        assert!(fam(vec![], SetExpr::nat_fin([])).classify_nat().is_err());
    }

    #[test]
    fn section_examples() {
        let a = fam(vec![(2, SetExpr::nat_fin([0]))], SetExpr::nat_cofin([]));
        assert_eq!(a.section(2).unwrap(), SetExpr::nat_fin([0]));
        assert_eq!(a.section(99).unwrap(), SetExpr::nat_cofin([]));
        assert!(SetExpr::nat_fin([]).section(0).is_err());
    }

    #[test]
    fn subset_examples() {
        assert!(SetExpr::nat_fin([1]).subset_of(&SetExpr::nat_cofin([])).unwrap());
        assert!(!SetExpr::nat_cofin([]).subset_of(&SetExpr::nat_fin([1])).unwrap());
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(SetExpr::nat_cofin([1]).truncate(3), vec![Point::Nat(0), Point::Nat(2)]);
        assert!(SetExpr::nat_fin([]).truncate(10).is_empty());
        let t = fam(vec![], SetExpr::nat_cofin([])).truncate(2);
        let coords: Vec<_> = t.iter().map(Point::coords).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn unit_sets_normalize_to_fin() {
        let full = SetExpr::cofin(DomainExpr::Unit, []).unwrap();
        assert_eq!(full, SetExpr::fin(DomainExpr::Unit, [Point::Unit]).unwrap());
        assert!(full.complement().is_empty());
        assert_eq!(full.classify_nat().unwrap(), NatClass::Finite(1));
    }

    #[test]
    fn sum_domains_require_irregular_sections() {
        let d = DomainExpr::dsum(vec![DomainExpr::Unit], DomainExpr::Nat);
        assert!(SetExpr::sections(d.clone(), BTreeMap::new(), SetExpr::nat_fin([])).is_err());
        let s = SetExpr::sections(
            d.clone(),
            [(0, SetExpr::full(&DomainExpr::Unit))].into_iter().collect(),
            SetExpr::nat_fin([]),
        )
        .unwrap();
        assert!(s.is_finite());
        assert_eq!(s.finite_count(), Some(1));
        assert_eq!(s.complement().complement(), s);
        assert_eq!(SetExpr::full(&d).complement(), SetExpr::empty(&d));
        s.validate().unwrap();
    }

    #[test]
    fn from_points_builds_finite_sets() {
        let d = DomainExpr::katetov(2);
        let pts = vec![
            Point::pair(3, Point::pair(1, Point::Unit)),
            Point::pair(0, Point::pair(0, Point::Unit)),
        ];
        let s = SetExpr::from_points(&d, pts.clone()).unwrap();
        assert_eq!(s.finite_count(), Some(2));
        let mut sorted = pts;
        sorted.sort();
        assert_eq!(s.truncate(5), sorted);
        assert!(SetExpr::cofinite_points(&d, sorted.clone()).unwrap().is_cofinite());
    }

    #[test]
    fn validator_rejects_redundant_exceptions() {
        let bad = SetExpr::Sections {
            exceptions: [(1, SetExpr::nat_fin([]))].into_iter().collect(),
            tail: Box::new(SetExpr::nat_fin([])),
            domain: omega2(),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn display_uses_dsl_syntax() {
        let a = fam(vec![(0, SetExpr::nat_fin([1, 2]))], SetExpr::nat_cofin([]));
        assert_eq!(a.to_string(), "sections({0: fin{1,2}}, cofin{})");
    }
}
