//! Checkers for embedding and quasi-homomorphism witnesses, and diagonalization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{BijectionSpec, FilterError, FilterExpr, FilterFamily, FilterTable};
use crate::domain::{DomainExpr, Point};
use crate::set::SetExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleVerdict {
    Pass,
    Fail,
    /// The sample was not a member of the filter it was drawn for.
    BadSample,
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WitnessReport {
    pub results: Vec<SampleVerdict>,
}

impl WitnessReport {
    /// Every usable sample passed and at least one did.
    pub fn passed(&self) -> bool {
        self.results.contains(&SampleVerdict::Pass)
            && self
                .results
                .iter()
                .all(|r| matches!(r, SampleVerdict::Pass | SampleVerdict::BadSample))
    }

    pub fn count(&self, v: &SampleVerdict) -> usize {
        self.results.iter().filter(|r| *r == v).count()
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pass={} fail={} bad={} unsupported={}",
            self.count(&SampleVerdict::Pass),
            self.count(&SampleVerdict::Fail),
            self.count(&SampleVerdict::BadSample),
            self.results
                .iter()
                .filter(|r| matches!(r, SampleVerdict::Unsupported(_)))
                .count()
        )
    }
}

fn check_domains(context: &'static str, expected: &DomainExpr, found: &DomainExpr) -> Result<(), FilterError> {
    if expected != found {
        return Err(FilterError::DomainMismatch {
            context,
            expected: expected.clone(),
            found: found.clone(),
        });
    }
    Ok(())
}

/// Checks `σ[A] ∈ dst` for every sample `A ∈ src`.
pub fn verify_embedding(
    sigma: &BijectionSpec,
    src: &FilterExpr,
    dst: &FilterExpr,
    samples: &[SetExpr],
) -> Result<WitnessReport, FilterError> {
    check_domains("embedding source", &sigma.source(), &src.domain()?)?;
    check_domains("embedding target", &sigma.target(), &dst.domain()?)?;
    let mut report = WitnessReport::default();
    for a in samples {
        let verdict = if !src.member(a)? {
            SampleVerdict::BadSample
        } else {
            match sigma.image(a) {
                Ok(img) => {
                    if dst.member(&img)? {
                        SampleVerdict::Pass
                    } else {
                        SampleVerdict::Fail
                    }
                }
                Err(e) => SampleVerdict::Unsupported(e.to_string()),
            }
        };
        report.results.push(verdict);
    }
    Ok(report)
}

/// A map from a member of the source filter into the target domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointMap {
    Identity,
    Constant(Point),
    /// `x ↦ (column, x)`.
    Column(u64),
    Bijection(BijectionSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiHom {
    pub map: PointMap,
    /// The member of the source filter on which the map is defined.
    pub domain_member: SetExpr,
}

impl QuasiHom {
    /// `π⁻¹[B]` as a subset of the source domain.
    pub fn preimage(&self, b: &SetExpr) -> Result<SetExpr, FilterError> {
        let f = &self.domain_member;
        let pre = match &self.map {
            PointMap::Identity => b.clone(),
            PointMap::Constant(y) => {
                if b.contains(y)? {
                    SetExpr::full(f.domain())
                } else {
                    SetExpr::empty(f.domain())
                }
            }
            PointMap::Column(c) => b.section(*c)?,
            PointMap::Bijection(sigma) => sigma.preimage(b)?,
        };
        Ok(pre.intersect(f)?)
    }
}

/// Checks `π⁻¹[B] ∈ src` for every sample `B ∈ dst`.
pub fn verify_quasi_homomorphism(
    qh: &QuasiHom,
    src: &FilterExpr,
    dst: &FilterExpr,
    samples: &[SetExpr],
) -> Result<WitnessReport, FilterError> {
    if !src.member(&qh.domain_member)? {
        return Err(FilterError::Unsupported(format!(
            "map domain {} is not a member of the source filter",
            qh.domain_member
        )));
    }
    let mut report = WitnessReport::default();
    for b in samples {
        let verdict = if !dst.member(b)? {
            SampleVerdict::BadSample
        } else {
            match qh.preimage(b) {
                Ok(pre) => {
                    if src.member(&pre)? {
                        SampleVerdict::Pass
                    } else {
                        SampleVerdict::Fail
                    }
                }
                Err(FilterError::UnsupportedPreimage(msg)) => SampleVerdict::Unsupported(msg),
                Err(e) => return Err(e),
            }
        };
        report.results.push(verdict);
    }
    Ok(report)
}

/// Whether some infinite `A` satisfies `A ⊆* M` for every member `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagonal {
    Yes(SetExpr),
    No,
    Unknown,
}

/// Structural decision of diagonalizability for the supported shapes.
pub fn is_diagonalizable(f: &FilterExpr) -> Result<Diagonal, FilterError> {
    match f {
        FilterExpr::Frechet(d) => Ok(Diagonal::Yes(SetExpr::full(d))),
        FilterExpr::Principal(e) => Ok(if e.is_finite() {
            Diagonal::No
        } else {
            Diagonal::Yes(e.clone())
        }),
        FilterExpr::Intersection(a, b) => {
            let va = is_diagonalizable(a)?;
            if let Diagonal::Yes(_) = va {
                return Ok(va);
            }
            let vb = is_diagonalizable(b)?;
            if let Diagonal::Yes(_) = vb {
                return Ok(vb);
            }
            match (&**a, &**b) {
                (FilterExpr::Principal(_), FilterExpr::Principal(_)) => Ok(Diagonal::No),
                _ => Ok(Diagonal::Unknown),
            }
        }
        FilterExpr::Product { outer, inner } => {
            rows_rule(outer, &FilterTable::constant((**inner).clone()), &f.domain()?)
        }
        FilterExpr::FubiniSum { base, family } => rows_rule(base, family, &f.domain()?),
        FilterExpr::Limit { base, family } => match (&**base, family) {
            // a Fréchet limit of an eventually constant family is its tail
            (FilterExpr::Frechet(_), FilterFamily::Table(t)) => is_diagonalizable(&t.tail),
            (FilterExpr::Frechet(_), FilterFamily::Lifted { table, target }) => rows_rule(base, table, target),
            _ => Ok(Diagonal::Unknown),
        },
        FilterExpr::Pushforward { sigma, inner } => match is_diagonalizable(inner)? {
            Diagonal::Yes(a) => Ok(match sigma.image(&a) {
                Ok(img) => Diagonal::Yes(img),
                Err(_) => Diagonal::Unknown,
            }),
            other => Ok(other),
        },
    }
}

/// The set whose listed rows are given and whose other rows equal `tail`.
fn rows(d: &DomainExpr, listed: BTreeMap<u64, SetExpr>, tail: SetExpr) -> Result<SetExpr, FilterError> {
    let mut exceptions = listed;
    for i in d.irregular_indices() {
        exceptions
            .entry(i)
            .or_insert_with(|| SetExpr::empty(d.component(i).unwrap()));
    }
    Ok(SetExpr::sections(d.clone(), exceptions, tail)?)
}

/// `G = {M : {i : M_i ∈ F_i} ∈ base}` on a product or sum domain `d`.
fn rows_rule(base: &FilterExpr, table: &FilterTable, d: &DomainExpr) -> Result<Diagonal, FilterError> {
    let tail_dom = d.tail_component().expect("indexed domain");
    let keys: BTreeSet<u64> = table.exceptions.keys().copied().chain(d.irregular_indices()).collect();
    let empty_rows = |skip: &BTreeSet<u64>| -> BTreeMap<u64, SetExpr> {
        skip.iter()
            .map(|&i| (i, SetExpr::empty(d.component(i).unwrap())))
            .collect()
    };
    match base {
        FilterExpr::Frechet(_) => match table.tail.kernel_point()? {
            Some(k) => {
                let col = SetExpr::from_points(tail_dom, [k])?;
                Ok(Diagonal::Yes(rows(d, empty_rows(&keys), col)?))
            }
            None => Ok(Diagonal::No),
        },
        FilterExpr::Principal(e) => {
            if e.is_empty() {
                return Ok(Diagonal::No);
            }
            let infinite = !e.is_finite();
            let listed_in_e: Vec<u64> = keys
                .iter()
                .copied()
                .filter(|k| e.contains(&Point::Nat(*k)).unwrap_or(false))
                .collect();
            let mut members: Vec<(u64, &FilterExpr)> = listed_in_e.iter().map(|&k| (k, table.get(k))).collect();
            let tail_row = match e {
                SetExpr::Fin { elements, .. } => elements
                    .iter()
                    .filter_map(|p| match p {
                        Point::Nat(n) if !keys.contains(n) => Some(*n),
                        _ => None,
                    })
                    .next(),
                _ => (0..).find(|n| !keys.contains(n) && e.contains(&Point::Nat(*n)).unwrap()),
            };
            if let Some(r) = tail_row {
                members.push((r, &table.tail));
            }
            let mut all_no = true;
            for (row, g) in members {
                match is_diagonalizable(g)? {
                    Diagonal::Yes(a) => {
                        let mut listed = empty_rows(&keys);
                        listed.insert(row, a);
                        return Ok(Diagonal::Yes(rows(d, listed, SetExpr::empty(tail_dom))?));
                    }
                    Diagonal::No => {}
                    Diagonal::Unknown => all_no = false,
                }
            }
            if infinite {
                if let Some(k) = table.tail.kernel_point()? {
                    let col = SetExpr::from_points(tail_dom, [k])?;
                    let mut skip = keys.clone();
                    if let SetExpr::Cofin { excluded, .. } = e {
                        skip.extend(excluded.iter().map(|p| match p {
                            Point::Nat(n) => *n,
                            _ => unreachable!(),
                        }));
                    }
                    return Ok(Diagonal::Yes(rows(d, empty_rows(&skip), col)?));
                }
            }
            Ok(if all_no { Diagonal::No } else { Diagonal::Unknown })
        }
        _ => Ok(Diagonal::Unknown),
    }
}

/// Looks for a member `M` with `A ∖ M` infinite, refuting `A` as a diagonal witness.
pub fn refute_diagonal_witness(f: &FilterExpr, a: &SetExpr) -> Result<Option<SetExpr>, FilterError> {
    let d = f.domain()?;
    let mut candidates = vec![a.complement()];
    if d.is_indexed() {
        let keys = a.exception_keys();
        let fresh = keys.iter().next_back().map_or(0, |k| k + 1);
        for i in keys.into_iter().chain([fresh]) {
            let mut listed = BTreeMap::new();
            listed.insert(i, SetExpr::empty(d.component(i).unwrap()));
            let full_tail = SetExpr::full(d.tail_component().unwrap());
            let mut exceptions = listed;
            for j in d.irregular_indices() {
                exceptions
                    .entry(j)
                    .or_insert_with(|| SetExpr::full(d.component(j).unwrap()));
            }
            candidates.push(SetExpr::sections(d.clone(), exceptions, full_tail)?);
        }
    }
    for m in candidates {
        if f.member(&m)? && !a.difference(&m)?.is_finite() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
