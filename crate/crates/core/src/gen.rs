//! Seeded random generators for domains, sets, filters and filter members.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{truncated_points, DomainExpr, Point};
use crate::filter::{BijectionSpec, FilterExpr, FilterFamily, FilterTable};
use crate::set::SetExpr;

/// Coordinates drawn by the generators lie below this bound.
pub const COORD_RANGE: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("depth budget {budget} is below the domain depth {depth}")]
    Budget { budget: usize, depth: usize },
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random normal-form set over `domain`, deterministic in `seed`.
pub fn gen_random_setexpr(domain: &DomainExpr, depth_budget: usize, seed: u64) -> Result<SetExpr, GenError> {
    if depth_budget < domain.depth() {
        return Err(GenError::Budget {
            budget: depth_budget,
            depth: domain.depth(),
        });
    }
    Ok(random_set(&mut rng(seed), domain))
}

fn random_points<R: Rng>(r: &mut R, max: usize) -> Vec<Point> {
    let n = r.gen_range(0..=max);
    (0..n).map(|_| Point::Nat(r.gen_range(0..COORD_RANGE))).collect()
}

pub fn random_set<R: Rng>(r: &mut R, d: &DomainExpr) -> SetExpr {
    match d {
        DomainExpr::Unit => SetExpr::from_points(d, r.gen_bool(0.5).then_some(Point::Unit)).unwrap(),
        DomainExpr::Nat => {
            let pts = random_points(r, 4);
            if r.gen_bool(0.5) {
                SetExpr::fin(DomainExpr::Nat, pts).unwrap()
            } else {
                SetExpr::cofin(DomainExpr::Nat, pts).unwrap()
            }
        }
        _ => {
            let mut exceptions = BTreeMap::new();
            for _ in 0..r.gen_range(0..=3) {
                let k = r.gen_range(0..COORD_RANGE);
                exceptions.insert(k, random_set(r, d.component(k).unwrap()));
            }
            for i in d.irregular_indices() {
                exceptions
                    .entry(i)
                    .or_insert_with(|| random_set(r, d.component(i).unwrap()));
            }
            let tail = random_set(r, d.tail_component().unwrap());
            SetExpr::sections(d.clone(), exceptions, tail).unwrap()
        }
    }
}

/// A random domain of depth at most `max_depth`.
pub fn random_domain<R: Rng>(r: &mut R, max_depth: usize) -> DomainExpr {
    if max_depth == 0 {
        return if r.gen_bool(0.2) {
            DomainExpr::Unit
        } else {
            DomainExpr::Nat
        };
    }
    match r.gen_range(0..5) {
        0 => DomainExpr::Nat,
        1 | 2 => DomainExpr::prod(random_domain(r, max_depth - 1)),
        3 => DomainExpr::prod(DomainExpr::Nat),
        _ => {
            let tail = random_domain(r, max_depth - 1);
            let n = r.gen_range(0..=2);
            let exceptions = (0..n).map(|_| random_domain(r, max_depth - 1)).collect();
            DomainExpr::dsum(exceptions, tail)
        }
    }
}

/// Top-level constructor of a generated filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Principal,
    Frechet,
    Product,
    Fubini,
    Limit,
    Intersection,
    Pushforward,
}

impl FilterKind {
    pub const ALL: [FilterKind; 7] = [
        FilterKind::Principal,
        FilterKind::Frechet,
        FilterKind::Product,
        FilterKind::Fubini,
        FilterKind::Limit,
        FilterKind::Intersection,
        FilterKind::Pushforward,
    ];
}

fn nonempty_set<R: Rng>(r: &mut R, d: &DomainExpr) -> SetExpr {
    loop {
        let s = random_set(r, d);
        if !s.is_empty() {
            return s;
        }
    }
}

fn random_patch<R: Rng>(r: &mut R, d: &DomainExpr) -> BijectionSpec {
    let pts = truncated_points(d, 4);
    let mut chosen: Vec<Point> = pts.choose_multiple(r, 3.min(pts.len())).cloned().collect();
    let mut shuffled = chosen.clone();
    shuffled.shuffle(r);
    let patch = chosen.drain(..).zip(shuffled).collect();
    BijectionSpec::patch(d.clone(), patch).unwrap()
}

/// A proper filter on `d` of expression depth at most `depth`.
pub fn random_filter<R: Rng>(r: &mut R, d: &DomainExpr, depth: usize) -> FilterExpr {
    let mut kinds = vec![FilterKind::Principal];
    if d.is_infinite() {
        kinds.push(FilterKind::Frechet);
    }
    if depth > 1 {
        kinds.push(FilterKind::Intersection);
        kinds.push(FilterKind::Pushforward);
        kinds.push(FilterKind::Limit);
        match d {
            DomainExpr::Prod(_) => kinds.push(FilterKind::Product),
            DomainExpr::DSum { .. } => kinds.push(FilterKind::Fubini),
            _ => {}
        }
    }
    let kind = *kinds.choose(r).unwrap();
    build(r, kind, d, depth).expect("kind chosen to fit the domain")
}

/// A proper filter on `d` whose top constructor is `kind`, when the domain allows it.
pub fn build<R: Rng>(r: &mut R, kind: FilterKind, d: &DomainExpr, depth: usize) -> Option<FilterExpr> {
    let sub = depth.saturating_sub(1).max(1);
    Some(match kind {
        FilterKind::Principal => FilterExpr::Principal(nonempty_set(r, d)),
        FilterKind::Frechet => {
            if !d.is_infinite() {
                return None;
            }
            FilterExpr::Frechet(d.clone())
        }
        FilterKind::Product => {
            let DomainExpr::Prod(inner) = d else {
                return None;
            };
            FilterExpr::Product {
                outer: Box::new(random_filter(r, &DomainExpr::Nat, sub)),
                inner: Box::new(random_filter(r, inner, sub)),
            }
        }
        FilterKind::Fubini => {
            let DomainExpr::DSum { .. } = d else {
                return None;
            };
            FilterExpr::FubiniSum {
                base: Box::new(random_filter(r, &DomainExpr::Nat, sub)),
                family: random_table(r, d, sub),
            }
        }
        FilterKind::Limit => {
            if d.is_indexed() && r.gen_bool(0.4) {
                let table = random_table(r, d, sub);
                let family = FilterFamily::Lifted {
                    table,
                    target: d.clone(),
                };
                if r.gen_bool(0.3) {
                    FilterExpr::Limit {
                        base: Box::new(random_filter(r, &DomainExpr::prod(DomainExpr::Nat), sub)),
                        family: FilterFamily::Repeated(Box::new(family)),
                    }
                } else {
                    FilterExpr::Limit {
                        base: Box::new(random_filter(r, &DomainExpr::Nat, sub)),
                        family,
                    }
                }
            } else {
                let mut exceptions = BTreeMap::new();
                for _ in 0..r.gen_range(0..=2) {
                    exceptions.insert(r.gen_range(0..COORD_RANGE), random_filter(r, d, sub));
                }
                let tail = random_filter(r, d, sub);
                FilterExpr::Limit {
                    base: Box::new(random_filter(r, &DomainExpr::Nat, sub)),
                    family: FilterFamily::Table(FilterTable::new(exceptions, tail)),
                }
            }
        }
        FilterKind::Intersection => {
            FilterExpr::Intersection(Box::new(random_filter(r, d, sub)), Box::new(random_filter(r, d, sub)))
        }
        FilterKind::Pushforward => FilterExpr::Pushforward {
            sigma: random_patch(r, d),
            inner: Box::new(random_filter(r, d, sub)),
        },
    })
}

/// A table whose members live on the components of the indexed domain `d`.
fn random_table<R: Rng>(r: &mut R, d: &DomainExpr, depth: usize) -> FilterTable {
    let mut exceptions = BTreeMap::new();
    for i in d.irregular_indices() {
        exceptions.insert(i, random_filter(r, d.component(i).unwrap(), depth));
    }
    for _ in 0..r.gen_range(0..=2) {
        let k = r.gen_range(0..COORD_RANGE);
        exceptions.insert(k, random_filter(r, d.component(k).unwrap(), depth));
    }
    FilterTable::new(exceptions, random_filter(r, d.tail_component().unwrap(), depth))
}

/// A filter of the given kind on a randomly chosen compatible domain.
pub fn random_filter_of_kind<R: Rng>(r: &mut R, kind: FilterKind, depth: usize) -> FilterExpr {
    loop {
        let d = match kind {
            FilterKind::Product => DomainExpr::prod(random_domain(r, depth.saturating_sub(2))),
            FilterKind::Fubini => {
                let inner = depth.saturating_sub(2);
                let n = r.gen_range(0..=2);
                let exc = (0..n).map(|_| random_domain(r, inner)).collect();
                DomainExpr::dsum(exc, random_domain(r, inner))
            }
            _ => random_domain(r, depth.saturating_sub(1)),
        };
        if let Some(f) = build(r, kind, &d, depth.max(2)) {
            return f;
        }
    }
}

/// A random member of `f`, built constructively from members of its parts.
pub fn random_member<R: Rng>(r: &mut R, f: &FilterExpr) -> SetExpr {
    let d = f.domain().expect("well-formed filter");
    if r.gen_bool(0.05) {
        return SetExpr::full(&d);
    }
    match f {
        FilterExpr::Principal(e) => e.union(&random_set(r, &d)).unwrap(),
        FilterExpr::Frechet(_) => {
            let pts = truncated_points(&d, 4);
            let n = r.gen_range(0..=4.min(pts.len()));
            let drop: Vec<Point> = pts.choose_multiple(r, n).cloned().collect();
            SetExpr::cofinite_points(&d, drop).unwrap()
        }
        FilterExpr::Product { outer, inner } => {
            let idx = random_member(r, outer);
            rows_member(r, &d, &idx, [], |_| inner)
        }
        FilterExpr::FubiniSum { base, family } => {
            let idx = random_member(r, base);
            let keys: Vec<u64> = family.exceptions.keys().copied().collect();
            rows_member(r, &d, &idx, keys, |i| family.get(i))
        }
        FilterExpr::Limit { family, .. } => family_member(r, family, &d),
        FilterExpr::Intersection(a, b) => random_member(r, a).union(&random_member(r, b)).unwrap(),
        FilterExpr::Pushforward { sigma, inner } => {
            let m = random_member(r, inner);
            sigma.image(&m).unwrap_or_else(|_| SetExpr::full(&d))
        }
    }
}

/// A set in every filter of the family.
fn family_member<R: Rng>(r: &mut R, family: &FilterFamily, d: &DomainExpr) -> SetExpr {
    match family {
        FilterFamily::Table(t) => t
            .members()
            .map(|g| random_member(r, g))
            .fold(SetExpr::empty(d), |acc, m| acc.union(&m).unwrap()),
        FilterFamily::Lifted { table, .. } => {
            let keys: Vec<u64> = table.exceptions.keys().copied().collect();
            rows_member(r, d, &SetExpr::full(&DomainExpr::Nat), keys, |i| table.get(i))
        }
        FilterFamily::Repeated(inner) => family_member(r, inner, d),
    }
}

/// A set whose rows in `idx` are members of the corresponding filters.
fn rows_member<'a, R: Rng>(
    r: &mut R,
    d: &DomainExpr,
    idx: &SetExpr,
    table_keys: impl IntoIterator<Item = u64>,
    filter_at: impl Fn(u64) -> &'a FilterExpr,
) -> SetExpr {
    let tail_in = idx.contains(&Point::Nat(u64::MAX)).unwrap();
    let tail_dom = d.tail_component().unwrap();
    // rows beyond every key share one tail set, so a member of the tail filter
    // works for all of them at once
    let tail_filter = filter_at(u64::MAX);
    let tail = if tail_in {
        random_member(r, tail_filter)
    } else {
        random_set(r, tail_dom)
    };
    let mut keys: Vec<u64> = match idx {
        SetExpr::Fin { elements: pts, .. } | SetExpr::Cofin { excluded: pts, .. } => pts
            .iter()
            .map(|p| match p {
                Point::Nat(n) => *n,
                _ => unreachable!(),
            })
            .collect(),
        SetExpr::Sections { .. } => unreachable!("index sets live on Nat"),
    };
    keys.extend(d.irregular_indices());
    keys.extend(table_keys);
    for _ in 0..r.gen_range(0..=2) {
        keys.push(r.gen_range(0..COORD_RANGE));
    }
    let mut exceptions = BTreeMap::new();
    for k in keys {
        let comp = d.component(k).unwrap();
        let s = if idx.contains(&Point::Nat(k)).unwrap() {
            random_member(r, filter_at(k))
        } else {
            random_set(r, comp)
        };
        exceptions.insert(k, s);
    }
    SetExpr::sections(d.clone(), exceptions, tail).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_determinism() {
        let d = DomainExpr::katetov(3);
        for seed in 0..20 {
            assert_eq!(
                gen_random_setexpr(&d, 3, seed).unwrap(),
                gen_random_setexpr(&d, 3, seed).unwrap()
            );
        }
        assert!(gen_random_setexpr(&d, 2, 0).is_err());
    }

    #[test]
    fn outputs_are_normal() {
        let mut r = rng(7);
        for _ in 0..300 {
            let d = random_domain(&mut r, 3);
            random_set(&mut r, &d).validate().unwrap();
        }
    }

    #[test]
    fn both_leaf_kinds_appear() {
        let (mut fin, mut cofin) = (0, 0);
        for seed in 0..1000 {
            match gen_random_setexpr(&DomainExpr::Nat, 0, seed).unwrap() {
                SetExpr::Fin { .. } => fin += 1,
                SetExpr::Cofin { .. } => cofin += 1,
                SetExpr::Sections { .. } => unreachable!(),
            }
        }
        assert!(fin > 350 && cofin > 350, "fin={fin} cofin={cofin}");
    }

    #[test]
    fn generated_members_are_members() {
        let mut r = rng(11);
        for kind in FilterKind::ALL {
            for _ in 0..40 {
                let f = random_filter_of_kind(&mut r, kind, 3);
                let m = random_member(&mut r, &f);
                assert!(f.member(&m).unwrap(), "{f} should contain {m}");
                assert!(f.is_proper().unwrap(), "{f} should be proper");
            }
        }
    }
}
