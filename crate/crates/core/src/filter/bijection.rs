//! Bijections between domains and their action on symbolic sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::domain::{enumerate, enumeration_index, point_in_domain, DomainError, DomainExpr, Point};
use crate::set::{SetError, SetExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("patch is not a permutation of a finite subset of {0}")]
    BadPatch(DomainExpr),
    #[error("domains {source_domain} and {target} have different cardinalities")]
    Cardinality {
        source_domain: DomainExpr,
        target: DomainExpr,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A bijection between two countable domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BijectionSpec {
    /// The canonical enumeration `ω → d`.
    CanonicalEnum(DomainExpr),
    /// The canonical bijection `source → target` (identity when they coincide)
    /// followed by a finite permutation `patch` of target points.
    TableBij {
        source: DomainExpr,
        target: DomainExpr,
        patch: BTreeMap<Point, Point>,
    },
    /// One side of the stagewise interleaving `ω → dom(N_alpha)`. Points are
    /// evaluated by the constructions module; set images are never computed.
    BlockInterleave { alpha: usize, side: u8 },
}

impl BijectionSpec {
    /// A finite permutation of `domain` given as a table.
    pub fn patch(domain: DomainExpr, patch: BTreeMap<Point, Point>) -> Result<BijectionSpec, BijectionError> {
        Self::table(domain.clone(), domain, patch)
    }

    pub fn table(
        source: DomainExpr,
        target: DomainExpr,
        patch: BTreeMap<Point, Point>,
    ) -> Result<BijectionSpec, BijectionError> {
        if source != target && (!source.is_infinite() || !target.is_infinite()) {
            return Err(BijectionError::Cardinality {
                source_domain: source,
                target,
            });
        }
        let keys: BTreeSet<&Point> = patch.keys().collect();
        let values: BTreeSet<&Point> = patch.values().collect();
        if keys != values || keys.iter().any(|p| !point_in_domain(p, &target)) {
            return Err(BijectionError::BadPatch(target));
        }
        Ok(BijectionSpec::TableBij { source, target, patch })
    }

    /// The transposition of two points of `domain`.
    pub fn swap(domain: DomainExpr, a: Point, b: Point) -> Result<BijectionSpec, BijectionError> {
        let mut patch = BTreeMap::new();
        if a != b {
            patch.insert(a.clone(), b.clone());
            patch.insert(b, a);
        }
        Self::patch(domain, patch)
    }

    pub fn source(&self) -> DomainExpr {
        match self {
            BijectionSpec::CanonicalEnum(_) | BijectionSpec::BlockInterleave { .. } => DomainExpr::Nat,
            BijectionSpec::TableBij { source, .. } => source.clone(),
        }
    }

    pub fn target(&self) -> DomainExpr {
        match self {
            BijectionSpec::CanonicalEnum(d) => d.clone(),
            BijectionSpec::TableBij { target, .. } => target.clone(),
            BijectionSpec::BlockInterleave { alpha, .. } => DomainExpr::katetov(*alpha),
        }
    }

    fn parts(&self) -> Result<(DomainExpr, DomainExpr, BTreeMap<Point, Point>), BijectionError> {
        match self {
            BijectionSpec::CanonicalEnum(d) => Ok((DomainExpr::Nat, d.clone(), BTreeMap::new())),
            BijectionSpec::TableBij { source, target, patch } => Ok((source.clone(), target.clone(), patch.clone())),
            BijectionSpec::BlockInterleave { .. } => Err(BijectionError::Unsupported(
                "interleaving bijections are evaluated stagewise by the constructions module".into(),
            )),
        }
    }

    /// True when the bijection is the identity up to a finite patch.
    pub fn is_identity_like(&self) -> bool {
        match self {
            BijectionSpec::TableBij { source, target, .. } => source == target,
            BijectionSpec::CanonicalEnum(d) => *d == DomainExpr::Nat,
            BijectionSpec::BlockInterleave { .. } => false,
        }
    }

    /// Finite set of naturals mentioned by the patch table.
    pub fn support(&self) -> BTreeSet<u64> {
        match self {
            BijectionSpec::TableBij { patch, .. } => patch.keys().flat_map(Point::coords).collect(),
            _ => BTreeSet::new(),
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point, BijectionError> {
        let (source, target, patch) = self.parts()?;
        if !point_in_domain(p, &source) {
            return Err(DomainError::ShapeMismatch {
                point: p.clone(),
                domain: source,
            }
            .into());
        }
        let q = if source == target {
            p.clone()
        } else {
            enumerate(&target, enumeration_index(&source, p)?)?
        };
        Ok(patch.get(&q).cloned().unwrap_or(q))
    }

    pub fn invert(&self, q: &Point) -> Result<Point, BijectionError> {
        let (source, target, patch) = self.parts()?;
        if !point_in_domain(q, &target) {
            return Err(DomainError::ShapeMismatch {
                point: q.clone(),
                domain: target,
            }
            .into());
        }
        let q = patch
            .iter()
            .find(|(_, v)| *v == q)
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| q.clone());
        if source == target {
            Ok(q)
        } else {
            Ok(enumerate(&source, enumeration_index(&target, &q)?)?)
        }
    }

    /// The inverse bijection.
    pub fn inverse(&self) -> Result<BijectionSpec, BijectionError> {
        match self {
            BijectionSpec::TableBij { source, target, patch } if source == target => Ok(BijectionSpec::TableBij {
                source: source.clone(),
                target: target.clone(),
                patch: patch.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
            }),
            BijectionSpec::CanonicalEnum(DomainExpr::Nat) => Ok(self.clone()),
            _ => Err(BijectionError::Unsupported(format!("no symbolic inverse for {self}"))),
        }
    }

    /// `σ[A]`. Exact for every set when the bijection is identity-like, and for
    /// finite or cofinite sets otherwise.
    pub fn image(&self, a: &SetExpr) -> Result<SetExpr, BijectionError> {
        self.transport(a, false)
    }

    /// `σ⁻¹[A]`, with the same exactness guarantees as [`Self::image`].
    pub fn preimage(&self, a: &SetExpr) -> Result<SetExpr, BijectionError> {
        self.transport(a, true)
    }

    fn transport(&self, a: &SetExpr, backwards: bool) -> Result<SetExpr, BijectionError> {
        let (source, target, patch) = self.parts()?;
        let (from, to) = if backwards {
            (target.clone(), source.clone())
        } else {
            (source.clone(), target.clone())
        };
        if *a.domain() != from {
            return Err(SetError::DomainMismatch {
                expected: from,
                found: a.domain().clone(),
            }
            .into());
        }
        if source == target {
            // identity away from the patch: rebuild the patched points only
            let moved = SetExpr::from_points(&from, patch.keys().cloned())?;
            let mut hits = Vec::new();
            for (k, v) in &patch {
                let (x, y) = if backwards { (k, v) } else { (v, k) };
                if a.contains(y)? {
                    hits.push(x.clone());
                }
            }
            let kept = a.difference(&moved)?;
            return Ok(kept.union(&SetExpr::from_points(&to, hits)?)?);
        }
        let map = |p: &Point| {
            if backwards {
                self.invert(p)
            } else {
                self.apply(p)
            }
        };
        if let Some(pts) = a.finite_points() {
            let img = pts.iter().map(map).collect::<Result<Vec<_>, _>>()?;
            return Ok(SetExpr::from_points(&to, img)?);
        }
        if let Some(pts) = a.complement().finite_points() {
            let img = pts.iter().map(map).collect::<Result<Vec<_>, _>>()?;
            return Ok(SetExpr::from_points(&to, img)?.complement());
        }
        Err(BijectionError::Unsupported(format!(
            "{} of a set that is neither finite nor cofinite under {self}",
            if backwards { "preimage" } else { "image" }
        )))
    }
}

impl fmt::Display for BijectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BijectionSpec::CanonicalEnum(d) => write!(f, "enum[w -> {d}]"),
            BijectionSpec::TableBij { source, target, patch } => {
                write!(f, "table[{source} -> {target}")?;
                for (k, v) in patch {
                    write!(f, "; {k}->{v}")?;
                }
                write!(f, "]")
            }
            BijectionSpec::BlockInterleave { alpha, side } => {
                write!(f, "interleave[alpha={alpha}, side={side}]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_moves_two_points() {
        let s = BijectionSpec::swap(DomainExpr::Nat, Point::Nat(3), Point::Nat(4)).unwrap();
        assert_eq!(s.apply(&Point::Nat(3)).unwrap(), Point::Nat(4));
        assert_eq!(s.apply(&Point::Nat(9)).unwrap(), Point::Nat(9));
        assert_eq!(s.image(&SetExpr::nat_fin([3, 7])).unwrap(), SetExpr::nat_fin([4, 7]));
        assert_eq!(s.preimage(&SetExpr::nat_cofin([4])).unwrap(), SetExpr::nat_cofin([3]));
    }

    #[test]
    fn patch_must_be_a_permutation() {
        let mut patch = BTreeMap::new();
        patch.insert(Point::Nat(1), Point::Nat(2));
        assert!(BijectionSpec::patch(DomainExpr::Nat, patch).is_err());
    }

    #[test]
    fn canonical_enum_round_trips() {
        let d = DomainExpr::prod(DomainExpr::Nat);
        let s = BijectionSpec::CanonicalEnum(d.clone());
        for n in 0..500 {
            let q = s.apply(&Point::Nat(n)).unwrap();
            assert_eq!(s.invert(&q).unwrap(), Point::Nat(n));
        }
        let cof = SetExpr::nat_cofin([0, 1, 2]);
        let img = s.image(&cof).unwrap();
        assert!(img.is_cofinite());
        assert_eq!(s.preimage(&img).unwrap(), cof);
        let split = SetExpr::sections(d, BTreeMap::new(), SetExpr::nat_fin([0])).unwrap();
        assert!(matches!(s.preimage(&split), Err(BijectionError::Unsupported(_))));
    }

    #[test]
    fn interleave_refuses_set_images() {
        let s = BijectionSpec::BlockInterleave { alpha: 1, side: 0 };
        assert!(s.image(&SetExpr::nat_fin([])).is_err());
    }
}
