//! A definitional membership evaluator, independent of the set algebra.
//!
//! Sets are read only through point predicates. Every eventually-uniform set and
//! every filter expression is invariant under permutations of the naturals that
//! fix all numbers it mentions, separately at each coordinate level. With `s`
//! one above the largest mentioned number, `s` stands for every unmentioned
//! value, so quantifiers over the infinite domain reduce to the grid `[0, s]`.

use crate::domain::{DomainExpr, Point};
use crate::filter::{BijectionSpec, FilterExpr, FilterFamily, FilterTable};
use crate::set::SetExpr;

/// Membership of a point in a set, by direct inspection of the description.
pub fn point_in(a: &SetExpr, p: &Point) -> bool {
    match (a, p) {
        (SetExpr::Fin { elements, .. }, _) => elements.contains(p),
        (SetExpr::Cofin { excluded, .. }, _) => !excluded.contains(p),
        (SetExpr::Sections { exceptions, tail, .. }, Point::Pair(i, rest) | Point::Sum(i, rest)) => {
            point_in(exceptions.get(i).unwrap_or(tail), rest)
        }
        _ => false,
    }
}

fn grid(d: &DomainExpr, s: u64) -> Vec<Point> {
    match d {
        DomainExpr::Unit => vec![Point::Unit],
        DomainExpr::Nat => (0..=s).map(Point::Nat).collect(),
        DomainExpr::Prod(inner) => {
            let rest = grid(inner, s);
            (0..=s)
                .flat_map(|i| rest.iter().map(move |q| Point::Pair(i, Box::new(q.clone()))))
                .collect()
        }
        DomainExpr::DSum { exceptions, tail } => (0..=s)
            .flat_map(|i| {
                let comp = exceptions.get(i as usize).unwrap_or(tail);
                grid(comp, s).into_iter().map(move |q| Point::Sum(i, Box::new(q)))
            })
            .collect(),
    }
}

fn touches(p: &Point, s: u64) -> bool {
    match p {
        Point::Unit => false,
        Point::Nat(n) => *n == s,
        Point::Pair(i, rest) | Point::Sum(i, rest) => *i == s || touches(rest, s),
    }
}

fn point_numbers(p: &Point, m: &mut u64) {
    match p {
        Point::Unit => {}
        Point::Nat(n) => *m = (*m).max(*n),
        Point::Pair(i, rest) | Point::Sum(i, rest) => {
            *m = (*m).max(*i);
            point_numbers(rest, m);
        }
    }
}

fn set_numbers(a: &SetExpr, m: &mut u64) {
    match a {
        SetExpr::Fin { elements: pts, domain } | SetExpr::Cofin { excluded: pts, domain } => {
            domain_numbers(domain, m);
            pts.iter().for_each(|p| point_numbers(p, m));
        }
        SetExpr::Sections {
            exceptions,
            tail,
            domain,
        } => {
            domain_numbers(domain, m);
            for (k, s) in exceptions {
                *m = (*m).max(*k);
                set_numbers(s, m);
            }
            set_numbers(tail, m);
        }
    }
}

fn domain_numbers(d: &DomainExpr, m: &mut u64) {
    match d {
        DomainExpr::Unit | DomainExpr::Nat => {}
        DomainExpr::Prod(inner) => domain_numbers(inner, m),
        DomainExpr::DSum { exceptions, tail } => {
            *m = (*m).max(exceptions.len() as u64);
            exceptions.iter().for_each(|c| domain_numbers(c, m));
            domain_numbers(tail, m);
        }
    }
}

fn table_numbers(t: &FilterTable, m: &mut u64) {
    for (k, f) in &t.exceptions {
        *m = (*m).max(*k);
        filter_numbers(f, m);
    }
    filter_numbers(&t.tail, m);
}

fn filter_numbers(f: &FilterExpr, m: &mut u64) {
    match f {
        FilterExpr::Principal(e) => set_numbers(e, m),
        FilterExpr::Frechet(d) => domain_numbers(d, m),
        FilterExpr::Product { outer, inner } => {
            filter_numbers(outer, m);
            filter_numbers(inner, m);
        }
        FilterExpr::FubiniSum { base, family } => {
            filter_numbers(base, m);
            table_numbers(family, m);
        }
        FilterExpr::Limit { base, family } => {
            filter_numbers(base, m);
            let mut fam = family;
            while let FilterFamily::Repeated(inner) = fam {
                fam = inner;
            }
            match fam {
                FilterFamily::Table(t) => table_numbers(t, m),
                FilterFamily::Lifted { table, target } => {
                    table_numbers(table, m);
                    domain_numbers(target, m);
                }
                FilterFamily::Repeated(_) => unreachable!(),
            }
        }
        FilterExpr::Intersection(a, b) => {
            filter_numbers(a, m);
            filter_numbers(b, m);
        }
        FilterExpr::Pushforward { sigma, inner } => {
            if let BijectionSpec::TableBij { patch, .. } = sigma {
                for (k, v) in patch {
                    point_numbers(k, m);
                    point_numbers(v, m);
                }
            }
            filter_numbers(inner, m);
        }
    }
}

type Pred<'a> = &'a dyn Fn(&Point) -> bool;

struct Evaluator {
    s: u64,
}

impl Evaluator {
    fn nat_index(&self, verdicts: Vec<bool>) -> impl Fn(&Point) -> bool {
        let s = self.s;
        move |p: &Point| match p {
            Point::Nat(n) => verdicts[(*n).min(s) as usize],
            _ => false,
        }
    }

    fn eval(&self, f: &FilterExpr, d: &DomainExpr, a: Pred) -> Option<bool> {
        let s = self.s;
        match f {
            FilterExpr::Principal(e) => Some(grid(d, s).iter().all(|p| !point_in(e, p) || a(p))),
            FilterExpr::Frechet(_) => Some(grid(d, s).iter().all(|p| !touches(p, s) || a(p))),
            FilterExpr::Product { outer, inner } => {
                let inner_dom = match d {
                    DomainExpr::Prod(x) => &**x,
                    _ => return None,
                };
                let mut v = Vec::new();
                for i in 0..=s {
                    let sec = |q: &Point| a(&Point::Pair(i, Box::new(q.clone())));
                    v.push(self.eval(inner, inner_dom, &sec)?);
                }
                self.eval(outer, &DomainExpr::Nat, &self.nat_index(v))
            }
            FilterExpr::FubiniSum { base, family } => {
                let v = self.lifted_verdicts(family, d, a)?;
                self.eval(base, &DomainExpr::Nat, &self.nat_index(v))
            }
            FilterExpr::Limit { base, family } => {
                let (idx_dom, pred) = self.family_index(family, d, a)?;
                self.eval(base, &idx_dom, &*pred)
            }
            FilterExpr::Intersection(x, y) => Some(self.eval(x, d, a)? && self.eval(y, d, a)?),
            FilterExpr::Pushforward { sigma, inner } => match sigma {
                BijectionSpec::TableBij { source, target, patch } if source == target => {
                    let moved = |p: &Point| a(patch.get(p).unwrap_or(p));
                    self.eval(inner, source, &moved)
                }
                _ => None,
            },
        }
    }

    /// `[A_i ∈ F_i]` for rows `i ≤ s` of a sum or product domain.
    fn lifted_verdicts(&self, t: &FilterTable, d: &DomainExpr, a: Pred) -> Option<Vec<bool>> {
        let (excs, tail, wrap_pair): (&[DomainExpr], &DomainExpr, bool) = match d {
            DomainExpr::DSum { exceptions, tail } => (exceptions, tail, false),
            DomainExpr::Prod(inner) => (&[], inner, true),
            _ => return None,
        };
        let mut v = Vec::new();
        for i in 0..=self.s {
            let comp = excs.get(i as usize).unwrap_or(tail);
            let sec = |q: &Point| {
                let q = Box::new(q.clone());
                a(&if wrap_pair { Point::Pair(i, q) } else { Point::Sum(i, q) })
            };
            let g = t.exceptions.get(&i).unwrap_or(&t.tail);
            v.push(self.eval(g, comp, &sec)?);
        }
        Some(v)
    }

    #[allow(clippy::type_complexity)]
    fn family_index(
        &self,
        family: &FilterFamily,
        d: &DomainExpr,
        a: Pred,
    ) -> Option<(DomainExpr, Box<dyn Fn(&Point) -> bool>)> {
        match family {
            FilterFamily::Table(t) => {
                let mut v = Vec::new();
                for i in 0..=self.s {
                    v.push(self.eval(t.exceptions.get(&i).unwrap_or(&t.tail), d, a)?);
                }
                Some((DomainExpr::Nat, Box::new(self.nat_index(v))))
            }
            FilterFamily::Lifted { table, .. } => {
                let v = self.lifted_verdicts(table, d, a)?;
                Some((DomainExpr::Nat, Box::new(self.nat_index(v))))
            }
            FilterFamily::Repeated(inner) => {
                let (_, rows) = self.family_index(inner, d, a)?;
                let pred = move |p: &Point| match p {
                    Point::Pair(i, _) => rows(&Point::Nat(*i)),
                    _ => false,
                };
                Some((DomainExpr::Prod(Box::new(DomainExpr::Nat)), Box::new(pred)))
            }
        }
    }
}

/// Membership by definition; `None` when a pushforward is not identity-like.
pub fn reference_member(f: &FilterExpr, a: &SetExpr) -> Option<bool> {
    let mut m = 0;
    filter_numbers(f, &mut m);
    set_numbers(a, &mut m);
    let ev = Evaluator { s: m + 1 };
    let d = a.domain().clone();
    ev.eval(f, &d, &|p: &Point| point_in(a, p))
}

/// Membership of an arbitrary predicate-given set, read on the grid `[0, s]`.
///
/// Only meaningful when both the filter and the predicate are symmetric beyond `s - 1`.
pub fn reference_member_pred(f: &FilterExpr, d: &DomainExpr, s: u64, pred: &dyn Fn(&Point) -> bool) -> Option<bool> {
    Evaluator { s }.eval(f, d, pred)
}

/// Finite sets of the grid `[0, bound)` read from a predicate, for truncation tests.
pub fn reference_truncate(d: &DomainExpr, bound: u64, pred: &dyn Fn(&Point) -> bool) -> Vec<Point> {
    if bound == 0 {
        return Vec::new();
    }
    let mut pts: Vec<Point> = grid(d, bound - 1).into_iter().filter(|p| pred(p)).collect();
    pts.sort();
    pts
}
