//! Filter expressions and the membership oracle.
//!
//! Every constructor keeps membership decidable on eventually-uniform sets: the
//! index set `{i : A ∈ F_i}` of an eventually-uniform family is finite or
//! cofinite (or a union of full rows for repeated families), so recursion
//! bottoms out in set algebra.

pub mod bijection;
pub mod sequence;
pub mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::domain::{points_with_coords, DomainError, DomainExpr, Point};
use crate::set::{SetError, SetExpr};

pub use bijection::{BijectionError, BijectionSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("{context}: expected domain {expected}, found {found}")]
    DomainMismatch {
        context: &'static str,
        expected: DomainExpr,
        found: DomainExpr,
    },
    #[error("the Fréchet filter needs an infinite domain, got {0}")]
    FiniteFrechet(DomainExpr),
    #[error("malformed family: {0}")]
    BadFamily(String),
    #[error("unsupported preimage: {0}")]
    UnsupportedPreimage(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl From<BijectionError> for FilterError {
    fn from(e: BijectionError) -> Self {
        match e {
            BijectionError::Set(s) => FilterError::Set(s),
            BijectionError::Domain(d) => FilterError::Domain(d),
            other => FilterError::UnsupportedPreimage(other.to_string()),
        }
    }
}

fn expect_domain(context: &'static str, expected: &DomainExpr, found: &DomainExpr) -> Result<(), FilterError> {
    if expected != found {
        return Err(FilterError::DomainMismatch {
            context,
            expected: expected.clone(),
            found: found.clone(),
        });
    }
    Ok(())
}

/// An algebraic description of a filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterExpr {
    /// `{A : E ⊆ A}`.
    Principal(SetExpr),
    /// Cofinite subsets of an infinite domain.
    Frechet(DomainExpr),
    /// `outer × inner` on `ω × dom(inner)`; `outer` lives on `Nat`.
    Product {
        outer: Box<FilterExpr>,
        inner: Box<FilterExpr>,
    },
    /// `base`-Fubini sum of the family on `Σ_i dom(F_i)`; `base` lives on `Nat`.
    FubiniSum { base: Box<FilterExpr>, family: FilterTable },
    /// `{A : {i : A ∈ F_i} ∈ base}`.
    Limit {
        base: Box<FilterExpr>,
        family: FilterFamily,
    },
    /// Sets belonging to both filters.
    Intersection(Box<FilterExpr>, Box<FilterExpr>),
    /// `{A : σ⁻¹[A] ∈ inner}`.
    Pushforward {
        sigma: BijectionSpec,
        inner: Box<FilterExpr>,
    },
}

/// An eventually constant sequence of filters indexed by `ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterTable {
    pub exceptions: BTreeMap<u64, FilterExpr>,
    pub tail: Box<FilterExpr>,
}

impl FilterTable {
    /// Exceptions structurally equal to the tail are dropped.
    pub fn new(mut exceptions: BTreeMap<u64, FilterExpr>, tail: FilterExpr) -> Self {
        exceptions.retain(|_, f| *f != tail);
        FilterTable {
            exceptions,
            tail: Box::new(tail),
        }
    }

    pub fn constant(tail: FilterExpr) -> Self {
        Self::new(BTreeMap::new(), tail)
    }

    pub fn get(&self, i: u64) -> &FilterExpr {
        self.exceptions.get(&i).unwrap_or(&self.tail)
    }

    /// The distinct filters of the table, tail last.
    pub fn members(&self) -> impl Iterator<Item = &FilterExpr> {
        self.exceptions.values().chain(std::iter::once(&*self.tail))
    }

    /// `Σ_i dom(F_i)`.
    pub fn sum_domain(&self) -> Result<DomainExpr, FilterError> {
        let tail = self.tail.domain()?;
        let len = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let mut comps = Vec::with_capacity(len as usize);
        for i in 0..len {
            comps.push(match self.exceptions.get(&i) {
                Some(f) => f.domain()?,
                None => tail.clone(),
            });
        }
        Ok(DomainExpr::dsum(comps, tail))
    }

    /// `{i : A_i ∈ F_i}` where `section(i)` yields the `i`-th set and beyond the
    /// listed keys every set equals `tail_set`.
    fn index_set<'a>(
        &self,
        extra_keys: impl IntoIterator<Item = u64>,
        section: impl Fn(u64) -> &'a SetExpr,
        tail_set: &SetExpr,
    ) -> Result<SetExpr, FilterError> {
        let mut keys: BTreeSet<u64> = self.exceptions.keys().copied().collect();
        keys.extend(extra_keys);
        let tail_verdict = self.tail.member_unchecked(tail_set)?;
        let mut flips = Vec::new();
        for k in keys {
            if self.get(k).member_unchecked(section(k))? != tail_verdict {
                flips.push(k);
            }
        }
        Ok(if tail_verdict {
            SetExpr::nat_cofin(flips)
        } else {
            SetExpr::nat_fin(flips)
        })
    }
}

/// A family `(F_i)_{i∈I}` of filters on a common target domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterFamily {
    /// `I = ω`, `F_i` read from the table.
    Table(FilterTable),
    /// `I = ω`, `F̃_j = {M ⊆ target : M_j ∈ F_j}` where `M_j` is the `j`-th section.
    Lifted { table: FilterTable, target: DomainExpr },
    /// `I = ω × ω`, `F_(i,j) = inner_i`: every filter of `inner` repeated infinitely often.
    Repeated(Box<FilterFamily>),
}

impl FilterFamily {
    pub fn table(exceptions: BTreeMap<u64, FilterExpr>, tail: FilterExpr) -> Self {
        FilterFamily::Table(FilterTable::new(exceptions, tail))
    }

    pub fn index_domain(&self) -> DomainExpr {
        match self {
            FilterFamily::Table(_) | FilterFamily::Lifted { .. } => DomainExpr::Nat,
            FilterFamily::Repeated(_) => DomainExpr::prod(DomainExpr::Nat),
        }
    }

    pub fn target_domain(&self) -> Result<DomainExpr, FilterError> {
        match self {
            FilterFamily::Table(t) => {
                let d = t.tail.domain()?;
                for f in t.exceptions.values() {
                    expect_domain("family member", &d, &f.domain()?)?;
                }
                Ok(d)
            }
            FilterFamily::Lifted { table, target } => {
                let tail_comp = target
                    .tail_component()
                    .ok_or_else(|| FilterError::BadFamily(format!("lifted family over unindexed domain {target}")))?;
                expect_domain("lifted tail", tail_comp, &table.tail.domain()?)?;
                let mut keys: BTreeSet<u64> = table.exceptions.keys().copied().collect();
                keys.extend(target.irregular_indices());
                for k in keys {
                    expect_domain("lifted member", target.component(k).unwrap(), &table.get(k).domain()?)?;
                }
                Ok(target.clone())
            }
            FilterFamily::Repeated(inner) => {
                if matches!(**inner, FilterFamily::Repeated(_)) {
                    return Err(FilterError::BadFamily("nested repetition".into()));
                }
                inner.target_domain()
            }
        }
    }

    /// The underlying table of filters (lifted members are the table entries).
    pub fn base_table(&self) -> &FilterTable {
        match self {
            FilterFamily::Table(t) | FilterFamily::Lifted { table: t, .. } => t,
            FilterFamily::Repeated(inner) => inner.base_table(),
        }
    }

    /// The filter at index `idx` as a standalone expression.
    pub fn member_filter(&self, idx: &Point) -> Result<FilterExpr, FilterError> {
        match (self, idx) {
            (FilterFamily::Table(t), Point::Nat(i)) => Ok(t.get(*i).clone()),
            (FilterFamily::Lifted { table, target }, Point::Nat(j)) => {
                let at_j = SetExpr::nat_fin([*j]);
                Ok(match target {
                    DomainExpr::Prod(_) => FilterExpr::Product {
                        outer: Box::new(FilterExpr::Principal(at_j)),
                        inner: Box::new(table.get(*j).clone()),
                    },
                    _ => FilterExpr::FubiniSum {
                        base: Box::new(FilterExpr::Principal(at_j)),
                        family: table.clone(),
                    },
                })
            }
            (FilterFamily::Repeated(inner), Point::Pair(i, _)) => inner.member_filter(&Point::Nat(*i)),
            _ => Err(DomainError::ShapeMismatch {
                point: idx.clone(),
                domain: self.index_domain(),
            }
            .into()),
        }
    }

    /// `{i ∈ I : A ∈ F_i}` as a set over the index domain.
    pub fn index_set(&self, a: &SetExpr) -> Result<SetExpr, FilterError> {
        match self {
            FilterFamily::Table(t) => t.index_set([], |_| a, a),
            FilterFamily::Lifted { table, .. } => {
                let tail = a.tail_section().ok_or_else(|| SetError::WrongShape {
                    needed: "Prod or DSum",
                    found: a.domain().clone(),
                })?;
                table.index_set(a.exception_keys(), |k| a.section_ref(k), tail)
            }
            FilterFamily::Repeated(inner) => {
                let rows = inner.index_set(a)?;
                let full = SetExpr::full(&DomainExpr::Nat);
                let empty = SetExpr::empty(&DomainExpr::Nat);
                let (listed, fill, rest) = match &rows {
                    SetExpr::Fin { elements, .. } => (elements, full, empty),
                    SetExpr::Cofin { excluded, .. } => (excluded, empty, full),
                    SetExpr::Sections { .. } => unreachable!("index sets over Nat"),
                };
                let exceptions = listed.iter().map(|p| (nat_of(p), fill.clone())).collect();
                Ok(SetExpr::sections(self.index_domain(), exceptions, rest)?)
            }
        }
    }

    fn collect_support(&self, out: &mut BTreeSet<u64>) {
        let t = self.base_table();
        out.extend(t.exceptions.keys().copied());
        for f in t.members() {
            f.collect_support(out);
        }
        if let FilterFamily::Lifted { target, .. } = self {
            out.extend(target.irregular_indices());
        }
    }
}

fn nat_of(p: &Point) -> u64 {
    match p {
        Point::Nat(n) => *n,
        _ => unreachable!("natural expected"),
    }
}

impl FilterExpr {
    pub fn principal(e: SetExpr) -> Self {
        FilterExpr::Principal(e)
    }

    pub fn frechet(d: DomainExpr) -> Result<Self, FilterError> {
        if !d.is_infinite() {
            return Err(FilterError::FiniteFrechet(d));
        }
        Ok(FilterExpr::Frechet(d))
    }

    pub fn product(outer: FilterExpr, inner: FilterExpr) -> Result<Self, FilterError> {
        let f = FilterExpr::Product {
            outer: Box::new(outer),
            inner: Box::new(inner),
        };
        f.domain()?;
        Ok(f)
    }

    pub fn fubini(base: FilterExpr, family: FilterTable) -> Result<Self, FilterError> {
        let f = FilterExpr::FubiniSum {
            base: Box::new(base),
            family,
        };
        f.domain()?;
        Ok(f)
    }

    pub fn limit(base: FilterExpr, family: FilterFamily) -> Result<Self, FilterError> {
        let f = FilterExpr::Limit {
            base: Box::new(base),
            family,
        };
        f.domain()?;
        Ok(f)
    }

    pub fn meet(f: FilterExpr, g: FilterExpr) -> Result<Self, FilterError> {
        let h = FilterExpr::Intersection(Box::new(f), Box::new(g));
        h.domain()?;
        Ok(h)
    }

    pub fn pushforward(sigma: BijectionSpec, inner: FilterExpr) -> Result<Self, FilterError> {
        let h = FilterExpr::Pushforward {
            sigma,
            inner: Box::new(inner),
        };
        h.domain()?;
        Ok(h)
    }

    /// The carrier domain, validating annotations across the tree.
    pub fn domain(&self) -> Result<DomainExpr, FilterError> {
        match self {
            FilterExpr::Principal(e) => Ok(e.domain().clone()),
            FilterExpr::Frechet(d) => {
                if !d.is_infinite() {
                    return Err(FilterError::FiniteFrechet(d.clone()));
                }
                Ok(d.clone())
            }
            FilterExpr::Product { outer, inner } => {
                expect_domain("product outer factor", &DomainExpr::Nat, &outer.domain()?)?;
                Ok(DomainExpr::prod(inner.domain()?))
            }
            FilterExpr::FubiniSum { base, family } => {
                expect_domain("Fubini base", &DomainExpr::Nat, &base.domain()?)?;
                family.sum_domain()
            }
            FilterExpr::Limit { base, family } => {
                expect_domain("limit base", &family.index_domain(), &base.domain()?)?;
                family.target_domain()
            }
            FilterExpr::Intersection(f, g) => {
                let d = f.domain()?;
                expect_domain("intersection", &d, &g.domain()?)?;
                Ok(d)
            }
            FilterExpr::Pushforward { sigma, inner } => {
                expect_domain("pushforward source", &sigma.source(), &inner.domain()?)?;
                Ok(sigma.target())
            }
        }
    }

    /// Exact membership `A ∈ F`.
    pub fn member(&self, a: &SetExpr) -> Result<bool, FilterError> {
        expect_domain("member", &self.domain()?, a.domain())?;
        self.member_unchecked(a)
    }

    /// `A ∈ F*`, i.e. the complement of `A` is a member.
    pub fn dual_member(&self, a: &SetExpr) -> Result<bool, FilterError> {
        self.member(&a.complement())
    }

    pub(crate) fn member_unchecked(&self, a: &SetExpr) -> Result<bool, FilterError> {
        match self {
            FilterExpr::Principal(e) => Ok(e.subset_of(a)?),
            FilterExpr::Frechet(_) => Ok(a.is_cofinite()),
            FilterExpr::Product { outer, inner } => {
                let tail = a.tail_section().expect("product sets are section families");
                let table = FilterTable::constant((**inner).clone());
                let idx = table.index_set(a.exception_keys(), |k| a.section_ref(k), tail)?;
                outer.member_unchecked(&idx)
            }
            FilterExpr::FubiniSum { base, family } => {
                let tail = a.tail_section().expect("sum sets are section families");
                let idx = family.index_set(a.exception_keys(), |k| a.section_ref(k), tail)?;
                base.member_unchecked(&idx)
            }
            FilterExpr::Limit { base, family } => base.member_unchecked(&family.index_set(a)?),
            FilterExpr::Intersection(f, g) => Ok(f.member_unchecked(a)? && g.member_unchecked(a)?),
            FilterExpr::Pushforward { sigma, inner } => match sigma.preimage(a) {
                Ok(pre) => inner.member_unchecked(&pre),
                Err(BijectionError::Unsupported(msg)) => self.pushforward_fallback(sigma, inner, a, msg),
                Err(e) => Err(e.into()),
            },
        }
    }

    fn pushforward_fallback(
        &self,
        sigma: &BijectionSpec,
        inner: &FilterExpr,
        a: &SetExpr,
        msg: String,
    ) -> Result<bool, FilterError> {
        if matches!(sigma, BijectionSpec::BlockInterleave { .. }) {
            return Err(FilterError::UnsupportedPreimage(msg));
        }
        let push = |f: &FilterExpr| FilterExpr::Pushforward {
            sigma: sigma.clone(),
            inner: Box::new(f.clone()),
        };
        match inner {
            // bijections preserve cofiniteness
            FilterExpr::Frechet(_) => Ok(a.is_cofinite()),
            FilterExpr::Principal(e) => Ok(sigma.image(e)?.subset_of(a)?),
            FilterExpr::Intersection(f, g) => Ok(push(f).member_unchecked(a)? && push(g).member_unchecked(a)?),
            FilterExpr::Limit {
                base,
                family: FilterFamily::Table(t),
            } => {
                let pushed = FilterTable::new(t.exceptions.iter().map(|(&k, f)| (k, push(f))).collect(), push(&t.tail));
                base.member_unchecked(&pushed.index_set([], |_| a, a)?)
            }
            _ => Err(FilterError::UnsupportedPreimage(msg)),
        }
    }

    /// Every natural mentioned anywhere in the expression.
    pub fn support(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.collect_support(&mut out);
        out
    }

    fn collect_support(&self, out: &mut BTreeSet<u64>) {
        match self {
            FilterExpr::Principal(e) => e.collect_support(out),
            FilterExpr::Frechet(d) => collect_domain_support(d, out),
            FilterExpr::Product { outer, inner } => {
                outer.collect_support(out);
                inner.collect_support(out);
            }
            FilterExpr::FubiniSum { base, family } => {
                base.collect_support(out);
                out.extend(family.exceptions.keys().copied());
                for f in family.members() {
                    f.collect_support(out);
                }
            }
            FilterExpr::Limit { base, family } => {
                base.collect_support(out);
                family.collect_support(out);
            }
            FilterExpr::Intersection(f, g) => {
                f.collect_support(out);
                g.collect_support(out);
            }
            FilterExpr::Pushforward { sigma, inner } => {
                out.extend(sigma.support());
                inner.collect_support(out);
            }
        }
    }

    /// Nesting depth of the expression tree.
    pub fn depth(&self) -> usize {
        match self {
            FilterExpr::Principal(_) | FilterExpr::Frechet(_) => 1,
            FilterExpr::Product { outer, inner } => 1 + outer.depth().max(inner.depth()),
            FilterExpr::FubiniSum { base, family } => {
                1 + family.members().map(FilterExpr::depth).fold(base.depth(), usize::max)
            }
            FilterExpr::Limit { base, family } => {
                1 + family
                    .base_table()
                    .members()
                    .map(FilterExpr::depth)
                    .fold(base.depth(), usize::max)
            }
            FilterExpr::Intersection(f, g) => 1 + f.depth().max(g.depth()),
            FilterExpr::Pushforward { inner, .. } => 1 + inner.depth(),
        }
    }

    fn has_nested_transport(&self) -> bool {
        match self {
            FilterExpr::Principal(_) | FilterExpr::Frechet(_) => false,
            FilterExpr::Pushforward { sigma, inner } => !sigma.is_identity_like() || inner.has_nested_transport(),
            FilterExpr::Product { outer, inner } => outer.has_nested_transport() || inner.has_nested_transport(),
            FilterExpr::FubiniSum { base, family } => {
                base.has_nested_transport() || family.members().any(Self::has_nested_transport)
            }
            FilterExpr::Limit { base, family } => {
                base.has_nested_transport() || family.base_table().members().any(Self::has_nested_transport)
            }
            FilterExpr::Intersection(f, g) => f.has_nested_transport() || g.has_nested_transport(),
        }
    }

    /// Points whose co-singletons represent every co-singleton up to symmetry:
    /// coordinates range over the support plus one fresh value per level.
    pub fn candidate_core(&self) -> Result<Vec<Point>, FilterError> {
        let d = self.domain()?;
        let mut values = self.support();
        collect_domain_support(&d, &mut values);
        let m = values.iter().next_back().map_or(0, |v| v + 1);
        values.extend(m..m + d.max_coords().max(1) as u64);
        let values: Vec<u64> = values.into_iter().collect();
        Ok(points_with_coords(&d, &values))
    }

    /// Some point of `∩F`, if the intersection is nonempty.
    pub fn kernel_point(&self) -> Result<Option<Point>, FilterError> {
        match self {
            FilterExpr::Pushforward { sigma, inner } if !sigma.is_identity_like() => inner
                .kernel_point()?
                .map(|p| sigma.apply(&p).map_err(FilterError::from))
                .transpose(),
            FilterExpr::Intersection(f, g) => match f.kernel_point()? {
                Some(p) => Ok(Some(p)),
                None => g.kernel_point(),
            },
            _ => {
                if self.has_nested_transport() {
                    return Err(FilterError::Unsupported(
                        "freeness of a filter with a nested non-identity pushforward".into(),
                    ));
                }
                let d = self.domain()?;
                for p in self.candidate_core()? {
                    let co = SetExpr::cofinite_points(&d, [p.clone()])?;
                    if !self.member_unchecked(&co)? {
                        return Ok(Some(p));
                    }
                }
                Ok(None)
            }
        }
    }

    /// `∩F = ∅`.
    pub fn is_free(&self) -> Result<bool, FilterError> {
        Ok(self.kernel_point()?.is_none())
    }

    /// Whether `∅ ∉ F`.
    pub fn is_proper(&self) -> Result<bool, FilterError> {
        Ok(!self.member(&SetExpr::empty(&self.domain()?))?)
    }
}

fn collect_domain_support(d: &DomainExpr, out: &mut BTreeSet<u64>) {
    match d {
        DomainExpr::Unit | DomainExpr::Nat => {}
        DomainExpr::Prod(inner) => collect_domain_support(inner, out),
        DomainExpr::DSum { exceptions, tail } => {
            out.extend(0..exceptions.len() as u64);
            for c in exceptions {
                collect_domain_support(c, out);
            }
            collect_domain_support(tail, out);
        }
    }
}

/// The Fubini sum rewritten as a limit of lifted filters over the same domain.
pub fn fubini_as_limit(base: FilterExpr, family: FilterTable) -> Result<FilterExpr, FilterError> {
    let target = family.sum_domain()?;
    FilterExpr::limit(base, FilterFamily::Lifted { table: family, target })
}

impl fmt::Display for FilterTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family({{")?;
        for (i, (k, g)) in self.exceptions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {g}")?;
        }
        write!(f, "}}, {})", self.tail)
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterFamily::Table(t) => write!(f, "{t}"),
            FilterFamily::Lifted { table, .. } => write!(f, "lift({table})"),
            FilterFamily::Repeated(inner) => write!(f, "repeat({inner})"),
        }
    }
}

impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::Principal(e) => write!(f, "principal({e})"),
            FilterExpr::Frechet(_) => write!(f, "frechet"),
            FilterExpr::Product { outer, inner } => write!(f, "prod({outer}, {inner})"),
            FilterExpr::FubiniSum { base, family } => write!(f, "fubini({base}, {family})"),
            FilterExpr::Limit { base, family } => write!(f, "limit({base}, {family})"),
            FilterExpr::Intersection(a, b) => write!(f, "meet({a}, {b})"),
            FilterExpr::Pushforward { sigma, inner } => write!(f, "push({sigma}, {inner})"),
        }
    }
}
