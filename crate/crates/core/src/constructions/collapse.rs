//! Filters known only through a membership oracle and externally certified rank
//! bounds: the pair `G_k = {M : π_k[M] ∈ N_α}` of rank `α` whose meet has rank 1,
//! and the limit that equals that meet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::interleave::InterleavedPair;
use super::katetov::katetov;
use super::{Answer, ConstructionError};
use crate::domain::{pairing, DomainExpr, Point};
use crate::filter::{FilterExpr, FilterFamily};
use crate::rank::{certified_bounds, rank_bounds, RankBounds, RankCertificate, RankError};
use crate::set::{ProgrammaticSet, SetExpr};

/// A subset of the domain of a certified filter.
#[derive(Debug, Clone)]
pub enum Query {
    Set(SetExpr),
    /// `π_side⁻¹[B]` for a symbolic `B ⊆ dom(N_α)`.
    Pullback {
        side: usize,
        set: SetExpr,
    },
    Programmatic(ProgrammaticSet),
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Set(s) => write!(f, "{s}"),
            Query::Pullback { side, set } => write!(f, "pi_{side}^-1[{set}]"),
            Query::Programmatic(p) => write!(f, "<{}>", p.label),
        }
    }
}

type Oracle = Arc<dyn Fn(&Query) -> Result<Answer, ConstructionError> + Send + Sync>;

/// A filter given by an oracle, with rank bounds established outside the rule engine.
#[derive(Clone)]
pub struct CertifiedFilter {
    pub label: String,
    pub domain: DomainExpr,
    pub bounds: RankBounds,
    pub provenance: String,
    oracle: Oracle,
}

impl fmt::Debug for CertifiedFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CertifiedFilter")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl CertifiedFilter {
    pub fn new(
        label: impl Into<String>,
        domain: DomainExpr,
        bounds: RankBounds,
        provenance: impl Into<String>,
        oracle: impl Fn(&Query) -> Result<Answer, ConstructionError> + Send + Sync + 'static,
    ) -> Result<Self, ConstructionError> {
        if !bounds.is_consistent() {
            return Err(RankError::Inconsistent {
                left: bounds.clone(),
                right: bounds,
            }
            .into());
        }
        Ok(CertifiedFilter {
            label: label.into(),
            domain,
            bounds,
            provenance: provenance.into(),
            oracle: Arc::new(oracle),
        })
    }

    pub fn member(&self, q: &Query) -> Result<Answer, ConstructionError> {
        (self.oracle)(q)
    }

    /// The certified interval as a one-node `RCert` certificate.
    pub fn rank_bounds(&self) -> Result<(RankBounds, RankCertificate), ConstructionError> {
        Ok(certified_bounds(&self.label, &self.bounds, &self.provenance)?)
    }

    /// `self ∩ other` with the given certified bounds.
    pub fn meet(
        &self,
        other: &CertifiedFilter,
        label: impl Into<String>,
        bounds: RankBounds,
        provenance: impl Into<String>,
    ) -> Result<CertifiedFilter, ConstructionError> {
        if self.domain != other.domain {
            return Err(ConstructionError::Precondition(format!(
                "meet of filters on {} and {}",
                self.domain, other.domain
            )));
        }
        let (a, b) = (self.clone(), other.clone());
        CertifiedFilter::new(label, self.domain.clone(), bounds, provenance, move |q| {
            Ok(a.member(q)?.and(b.member(q)?))
        })
    }
}

/// Membership in a free filter on `ω` for sets that are finite or cofinite.
fn free_verdict(s: &SetExpr) -> Answer {
    if s.is_finite() {
        Answer::No
    } else if s.is_cofinite() {
        Answer::Yes
    } else {
        Answer::Unknown
    }
}

fn side_filter(k: usize, alpha: usize) -> Result<CertifiedFilter, ConstructionError> {
    let n_alpha = katetov(alpha)?;
    let target = DomainExpr::katetov(alpha);
    CertifiedFilter::new(
        format!("G{k}"),
        DomainExpr::Nat,
        RankBounds::finite(alpha as u64, alpha as u64),
        format!("isomorphic copy of N_{alpha} along the interleaving bijection pi_{k}"),
        move |q| {
            match q {
                Query::Set(s) if *s.domain() == DomainExpr::Nat => Ok(free_verdict(s)),
                Query::Pullback { side, set } if *set.domain() == target => {
                    if *side == k {
                        Ok(Answer::from_bool(n_alpha.member(set)?))
                    } else {
                        // π_side is a bijection: finite and cofinite sets pull back to the same kind
                        Ok(free_verdict(set))
                    }
                }
                Query::Programmatic(_) => Ok(Answer::Unknown),
                other => Err(ConstructionError::Precondition(format!("{other} is not a subset of w"))),
            }
        },
    )
}

/// The two rank-`α` copies of `N_α` and their rank-1 meet.
#[derive(Debug, Clone)]
pub struct CollapsePair {
    pub interleaving: Arc<Mutex<InterleavedPair>>,
    pub g0: CertifiedFilter,
    pub g1: CertifiedFilter,
    pub meet: CertifiedFilter,
}

pub fn collapse_pair(alpha: usize) -> Result<CollapsePair, ConstructionError> {
    let interleaving = Arc::new(Mutex::new(InterleavedPair::new(alpha)?));
    let g0 = side_filter(0, alpha)?;
    let g1 = side_filter(1, alpha)?;
    let meet = g0.meet(
        &g1,
        "G0 & G1",
        RankBounds::finite(1, 1),
        format!("meet of two interleaved copies of N_{alpha} admits no copy of N_2"),
    )?;
    Ok(CollapsePair {
        interleaving,
        g0,
        g1,
        meet,
    })
}

/// A subset `H` of the index set of a limit, with exact membership in the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSet {
    Symbolic(SetExpr),
    /// `{i ∈ ω : i mod period ∈ residues}`; not eventually uniform unless trivial.
    Periodic {
        period: u64,
        residues: BTreeSet<u64>,
    },
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Symbolic(s) => write!(f, "{s}"),
            IndexSet::Periodic { period, residues } => {
                let r: Vec<String> = residues.iter().map(u64::to_string).collect();
                write!(f, "{{i : i mod {period} in {{{}}}}}", r.join(","))
            }
        }
    }
}

impl IndexSet {
    pub fn even() -> Self {
        IndexSet::Periodic {
            period: 2,
            residues: BTreeSet::from([0]),
        }
    }

    pub fn periodic(period: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self, ConstructionError> {
        if period == 0 {
            return Err(ConstructionError::Precondition("period must be positive".into()));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if residues.iter().any(|&r| r >= period) {
            return Err(ConstructionError::Precondition(format!(
                "residues must be below {period}"
            )));
        }
        Ok(IndexSet::Periodic { period, residues })
    }

    pub fn domain(&self) -> DomainExpr {
        match self {
            IndexSet::Symbolic(s) => s.domain().clone(),
            IndexSet::Periodic { .. } => DomainExpr::Nat,
        }
    }

    pub fn contains(&self, p: &Point) -> Result<bool, ConstructionError> {
        match self {
            IndexSet::Symbolic(s) => Ok(s.contains(p)?),
            IndexSet::Periodic { period, residues } => match p {
                Point::Nat(n) => Ok(residues.contains(&(n % period))),
                _ => Err(ConstructionError::Precondition(format!("{p} is not a natural"))),
            },
        }
    }

    pub fn complement(&self) -> IndexSet {
        match self {
            IndexSet::Symbolic(s) => IndexSet::Symbolic(s.complement()),
            IndexSet::Periodic { period, residues } => IndexSet::Periodic {
                period: *period,
                residues: (0..*period).filter(|r| !residues.contains(r)).collect(),
            },
        }
    }

    pub fn full(d: &DomainExpr) -> IndexSet {
        IndexSet::Symbolic(SetExpr::full(d))
    }

    pub fn empty(d: &DomainExpr) -> IndexSet {
        IndexSet::Symbolic(SetExpr::empty(d))
    }

    /// Exact membership in `base`, or `None` outside the supported shapes.
    pub fn member_of(&self, base: &FilterExpr) -> Result<Option<bool>, ConstructionError> {
        if base.domain()? != self.domain() {
            return Err(ConstructionError::Precondition(format!(
                "{self} is not a subset of {}",
                base.domain()?
            )));
        }
        let IndexSet::Periodic { period, residues } = self else {
            let IndexSet::Symbolic(s) = self else { unreachable!() };
            return Ok(Some(base.member(s)?));
        };
        let everything = residues.len() as u64 == *period;
        Ok(match base {
            FilterExpr::Frechet(_) => Some(everything),
            FilterExpr::Principal(e) => match e.finite_points() {
                Some(pts) => {
                    let mut all = true;
                    for p in &pts {
                        all &= self.contains(p)?;
                    }
                    Some(all)
                }
                None => Some(everything),
            },
            FilterExpr::Intersection(a, b) => match (self.member_of(a)?, self.member_of(b)?) {
                (Some(x), Some(y)) => Some(x && y),
                _ => None,
            },
            FilterExpr::Limit {
                base: outer,
                family: FilterFamily::Table(t),
            } => {
                let mut inside = BTreeSet::new();
                let mut outside = BTreeSet::new();
                for (&i, f) in &t.exceptions {
                    match self.member_of(f)? {
                        Some(true) => inside.insert(i),
                        Some(false) => outside.insert(i),
                        None => return Ok(None),
                    };
                }
                let Some(tail) = self.member_of(&t.tail)? else {
                    return Ok(None);
                };
                let idx = if tail {
                    SetExpr::nat_cofin(outside)
                } else {
                    SetExpr::nat_fin(inside)
                };
                Some(outer.member(&idx)?)
            }
            _ => None,
        })
    }
}

/// `lim_base F_i` with `F_i = G_0` on `H` and `G_1` off `H`.
#[derive(Debug, Clone)]
pub struct CollapseLimit {
    pub base: FilterExpr,
    pub h: IndexSet,
    pub base_bounds: RankBounds,
    pub g0: CertifiedFilter,
    pub g1: CertifiedFilter,
    /// Membership installed as `G_0 ∩ G_1`, with certified bounds `[1,1]`.
    pub filter: CertifiedFilter,
}

impl CollapseLimit {
    /// Membership from the limit definition: `{i : A ∈ F_i} ∈ base`.
    pub fn member_by_definition(&self, q: &Query) -> Result<Answer, ConstructionError> {
        let (Some(a0), Some(a1)) = (self.g0.member(q)?.as_bool(), self.g1.member(q)?.as_bool()) else {
            return Ok(Answer::Unknown);
        };
        let d = self.h.domain();
        let index = match (a0, a1) {
            (true, true) => IndexSet::full(&d),
            (true, false) => self.h.clone(),
            (false, true) => self.h.complement(),
            (false, false) => IndexSet::empty(&d),
        };
        Ok(match index.member_of(&self.base)? {
            Some(b) => Answer::from_bool(b),
            None => Answer::Unknown,
        })
    }
}

/// Builds the limit over arbitrary `G_0`, `G_1` after checking `H, H^c ∉ base`.
pub fn collapse_limit_of(
    base: FilterExpr,
    h: IndexSet,
    g0: CertifiedFilter,
    g1: CertifiedFilter,
) -> Result<CollapseLimit, ConstructionError> {
    for (set, name) in [(h.clone(), "H"), (h.complement(), "the complement of H")] {
        match set.member_of(&base)? {
            Some(false) => {}
            Some(true) => {
                return Err(ConstructionError::Precondition(format!(
                    "{name} = {set} is a member of {base}"
                )))
            }
            None => {
                return Err(ConstructionError::Precondition(format!(
                    "membership of {set} in {base} is not decidable here"
                )))
            }
        }
    }
    let (base_bounds, _) = rank_bounds(&base)?;
    let filter = g0.meet(
        &g1,
        "lim",
        RankBounds::finite(1, 1),
        format!("limit over {base} alternating G0 on {h} and G1 elsewhere equals G0 & G1"),
    )?;
    Ok(CollapseLimit {
        base,
        h,
        base_bounds,
        g0,
        g1,
        filter,
    })
}

pub fn collapse_limit(alpha: usize, base: FilterExpr, h: IndexSet) -> Result<CollapseLimit, ConstructionError> {
    let pair = collapse_pair(alpha)?;
    collapse_limit_of(base, h, pair.g0, pair.g1)
}

/// Finite-scale view of the selector argument at truncation `bound`.
///
/// `E_j = τ⁻¹[{j} × ω]` for the Cantor pairing `τ`; `S_i` takes the least
/// element of each nonempty `π_1⁻¹[Z_i] ∩ E_j` with `j > i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorShadow {
    /// `|E_j ∩ ∪_i S_i|` for `j < blocks`.
    pub block_hits: Vec<usize>,
    /// `S_i` for `i < blocks`.
    pub selectors: Vec<BTreeSet<u64>>,
    /// Number of `j > i` with `π_1⁻¹[Z_i] ∩ E_j ∩ [0, bound)` nonempty, for `i < blocks`.
    pub available: Vec<usize>,
}

impl SelectorShadow {
    /// First block `j` with more than `j` selected points.
    pub fn bound_violation(&self) -> Option<usize> {
        self.block_hits
            .iter()
            .enumerate()
            .find(|&(j, &h)| h > j)
            .map(|(j, _)| j)
    }
}

pub fn selector_shadow(
    pair: &mut InterleavedPair,
    bound: u64,
    blocks: usize,
) -> Result<SelectorShadow, ConstructionError> {
    let pts = pair.prefix(1, bound)?.to_vec();
    let z = pair.zfamily().clone();
    let mut first: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for (n, p) in pts.iter().enumerate() {
        let n = n as u64;
        let (j, _) = pairing::unpair(n);
        let (i, _) = z.locate(p)?;
        if j > i {
            first.entry((i, j)).or_insert(n);
        }
    }
    let mut selectors = vec![BTreeSet::new(); blocks];
    let mut block_hits = vec![0; blocks];
    for (&(i, j), &n) in &first {
        if (i as usize) < blocks {
            selectors[i as usize].insert(n);
        }
        if (j as usize) < blocks {
            block_hits[j as usize] += 1;
        }
    }
    let available = selectors.iter().map(BTreeSet::len).collect();
    Ok(SelectorShadow {
        block_hits,
        selectors,
        available,
    })
}
