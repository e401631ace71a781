//! Elaboration of syntax trees into filters, sets, and sequences.
//!
//! Sets and sequences take their domain from the surrounding filter. Where no
//! filter fixes it, a point tuple of length `k` suggests `ω^k` and `()` the
//! one-point domain; a Fréchet filter with nothing to go on lives on `ω`.

use std::collections::{BTreeMap, HashMap};

use filterlab::constructions::{katetov, ConstructionError};
use filterlab::domain::{DomainError, DomainExpr, Point};
use filterlab::filter::sequence::{SeqValues, SequenceSpec};
use filterlab::filter::{FilterError, FilterExpr, FilterTable};
use filterlab::set::{SetError, SetExpr};
use thiserror::Error;

use crate::dsl::{FamilyAst, FilterAst, PointLit, Program, SeqAst, SetAst, Term};

#[derive(Debug, Error)]
pub enum ElabError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("`{0}` is bound to a {1}")]
    WrongSort(String, crate::dsl::Sort),
    #[error("point {point} does not fit domain {domain}")]
    Point { point: String, domain: DomainExpr },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

type Result<T> = std::result::Result<T, ElabError>;

/// Named terms visible during elaboration.
#[derive(Debug, Clone, Default)]
pub struct Env {
    terms: HashMap<String, Term>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Adds the bindings of `p`; later bindings shadow earlier ones.
    pub fn extend(&mut self, p: &Program) {
        for b in &p.bindings {
            self.terms.insert(b.name.clone(), b.term.clone());
        }
    }

    fn get(&self, name: &str) -> Result<&Term> {
        self.terms.get(name).ok_or_else(|| ElabError::Unbound(name.to_string()))
    }

    fn filter_var(&self, name: &str) -> Result<&FilterAst> {
        match self.get(name)? {
            Term::Filter(f) => Ok(f),
            t => Err(ElabError::WrongSort(name.to_string(), t.sort())),
        }
    }

    fn set_var(&self, name: &str) -> Result<&SetAst> {
        match self.get(name)? {
            Term::Set(s) => Ok(s),
            t => Err(ElabError::WrongSort(name.to_string(), t.sort())),
        }
    }

    fn family_var(&self, name: &str) -> Result<&FamilyAst> {
        match self.get(name)? {
            Term::Family(f) => Ok(f),
            t => Err(ElabError::WrongSort(name.to_string(), t.sort())),
        }
    }

    fn seq_var(&self, name: &str) -> Result<&SeqAst> {
        match self.get(name)? {
            Term::Seq(s) => Ok(s),
            t => Err(ElabError::WrongSort(name.to_string(), t.sort())),
        }
    }

    fn family_table<'a>(&'a self, fam: &'a FamilyAst) -> Result<(&'a BTreeMap<u64, FilterAst>, &'a FilterAst)> {
        match fam {
            FamilyAst::Table(t, tail) => Ok((t, tail)),
            FamilyAst::Var(v) => self.family_table(self.family_var(v)?),
        }
    }

    /// The domain a filter term pins down by itself, if any.
    pub fn infer_filter(&self, f: &FilterAst) -> Option<DomainExpr> {
        match f {
            FilterAst::Frechet => None,
            FilterAst::Katetov(n) => Some(DomainExpr::katetov(*n as usize)),
            FilterAst::Principal(s) => self.infer_set(s),
            FilterAst::Prod(_, inner) => self.infer_filter(inner).map(DomainExpr::prod),
            FilterAst::Meet(a, b) => self.infer_filter(a).or_else(|| self.infer_filter(b)),
            FilterAst::Limit(_, fam) => {
                let (t, tail) = self.family_table(fam).ok()?;
                self.infer_filter(tail)
                    .or_else(|| t.values().find_map(|g| self.infer_filter(g)))
            }
            FilterAst::Fubini(_, fam) => {
                let (t, tail) = self.family_table(fam).ok()?;
                self.infer_filter(tail)?;
                for g in t.values() {
                    self.infer_filter(g)?;
                }
                self.filter(f, None).ok()?.domain().ok()
            }
            FilterAst::Var(v) => self.infer_filter(self.filter_var(v).ok()?),
        }
    }

    pub fn infer_set(&self, s: &SetAst) -> Option<DomainExpr> {
        match s {
            SetAst::Fin(pts) | SetAst::Cofin(pts) => pts.first().map(|p| match p.0.len() {
                0 => DomainExpr::Unit,
                k => (1..k).fold(DomainExpr::Nat, |d, _| DomainExpr::prod(d)),
            }),
            SetAst::Sections(t, tail) => self
                .infer_set(tail)
                .or_else(|| t.values().find_map(|x| self.infer_set(x)))
                .map(DomainExpr::prod),
            SetAst::Var(v) => self.infer_set(self.set_var(v).ok()?),
        }
    }

    /// Elaborates `f`, placing it on `expect` where the term leaves the domain open.
    pub fn filter(&self, f: &FilterAst, expect: Option<&DomainExpr>) -> Result<FilterExpr> {
        let nat = DomainExpr::Nat;
        Ok(match f {
            FilterAst::Frechet => FilterExpr::frechet(expect.cloned().unwrap_or(DomainExpr::Nat))?,
            FilterAst::Katetov(n) => {
                let n = usize::try_from(*n).map_err(|_| ElabError::Shape(format!("katetov level {n} too large")))?;
                katetov(n)?
            }
            FilterAst::Principal(s) => {
                let d = expect.cloned().or_else(|| self.infer_set(s)).unwrap_or(DomainExpr::Nat);
                FilterExpr::principal(self.set(s, &d)?)
            }
            FilterAst::Prod(outer, inner) => {
                let inner_expect = match expect {
                    Some(DomainExpr::Prod(i)) => Some(&**i),
                    _ => None,
                };
                FilterExpr::product(self.filter(outer, Some(&nat))?, self.filter(inner, inner_expect)?)?
            }
            FilterAst::Meet(a, b) => {
                let d = expect
                    .cloned()
                    .or_else(|| self.infer_filter(f))
                    .unwrap_or(DomainExpr::Nat);
                FilterExpr::meet(self.filter(a, Some(&d))?, self.filter(b, Some(&d))?)?
            }
            FilterAst::Fubini(base, fam) => {
                let (t, tail) = self.family_table(fam)?;
                let tail_expect = expect.and_then(DomainExpr::tail_component);
                let mut exceptions = BTreeMap::new();
                for (&k, g) in t {
                    let e = expect.and_then(|d| d.component(k));
                    exceptions.insert(k, self.filter(g, e)?);
                }
                let table = FilterTable::new(exceptions, self.filter(tail, tail_expect)?);
                FilterExpr::fubini(self.filter(base, Some(&nat))?, table)?
            }
            FilterAst::Limit(base, fam) => {
                let (t, tail) = self.family_table(fam)?;
                let d = expect
                    .cloned()
                    .or_else(|| self.infer_filter(f))
                    .unwrap_or(DomainExpr::Nat);
                let mut exceptions = BTreeMap::new();
                for (&k, g) in t {
                    exceptions.insert(k, self.filter(g, Some(&d))?);
                }
                let family = filterlab::filter::FilterFamily::table(exceptions, self.filter(tail, Some(&d))?);
                FilterExpr::limit(self.filter(base, Some(&nat))?, family)?
            }
            FilterAst::Var(v) => self.filter(self.filter_var(v)?, expect)?,
        })
    }

    fn point(&self, p: &PointLit, d: &DomainExpr) -> Result<Point> {
        Point::from_coords(d, &p.0).map_err(|_| ElabError::Point {
            point: p.to_string(),
            domain: d.clone(),
        })
    }

    pub fn set(&self, s: &SetAst, d: &DomainExpr) -> Result<SetExpr> {
        Ok(match s {
            SetAst::Fin(pts) => {
                let pts = pts.iter().map(|p| self.point(p, d)).collect::<Result<Vec<_>>>()?;
                SetExpr::from_points(d, pts)?
            }
            SetAst::Cofin(pts) => {
                let pts = pts.iter().map(|p| self.point(p, d)).collect::<Result<Vec<_>>>()?;
                SetExpr::cofinite_points(d, pts)?
            }
            SetAst::Sections(t, tail) => {
                let tail_dom = d
                    .tail_component()
                    .ok_or_else(|| ElabError::Shape(format!("sections over {d}, which has no sections")))?;
                let mut exceptions = BTreeMap::new();
                for (&k, x) in t {
                    let c = d.component(k).expect("indexed domain");
                    exceptions.insert(k, self.set(x, c)?);
                }
                SetExpr::sections(d.clone(), exceptions, self.set(tail, tail_dom)?)?
            }
            SetAst::Var(v) => self.set(self.set_var(v)?, d)?,
        })
    }

    fn seq_values(&self, s: &SeqAst) -> Result<SeqValues> {
        Ok(match s {
            SeqAst::Const(r) => SeqValues::Const(*r),
            SeqAst::Table(t, tail) => SeqValues::Table {
                exceptions: t
                    .iter()
                    .map(|(&k, x)| Ok((k, self.seq_values(x)?)))
                    .collect::<Result<_>>()?,
                tail: Box::new(self.seq_values(tail)?),
            },
            SeqAst::Var(v) => self.seq_values(self.seq_var(v)?)?,
        })
    }

    pub fn sequence(&self, s: &SeqAst, d: &DomainExpr) -> Result<SequenceSpec> {
        Ok(SequenceSpec::new(d.clone(), self.seq_values(s)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn filter(src: &str) -> FilterExpr {
        let p = parse(src).unwrap();
        let mut env = Env::new();
        env.extend(&p);
        let Some(Term::Filter(f)) = &p.body else { panic!() };
        env.filter(f, None).unwrap()
    }

    #[test]
    fn katetov_matches_the_tower() {
        assert_eq!(filter("katetov(2)"), katetov(2).unwrap());
        assert_eq!(filter("prod(frechet, katetov(1))"), katetov(2).unwrap());
    }

    #[test]
    fn frechet_takes_the_sibling_domain() {
        let f = filter("meet(frechet, katetov(2))");
        assert_eq!(f.domain().unwrap(), DomainExpr::katetov(2));
        let g = filter("limit(frechet, family({0: frechet}, katetov(1)))");
        assert_eq!(g.domain().unwrap(), DomainExpr::katetov(1));
    }

    #[test]
    fn point_depth_is_inferred() {
        let f = filter("principal(fin{(0,1),(2,3)})");
        assert_eq!(f.domain().unwrap(), DomainExpr::prod(DomainExpr::Nat));
        assert_eq!(filter("principal(fin{()})").domain().unwrap(), DomainExpr::Unit);
    }

    #[test]
    fn sets_follow_the_filter() {
        let env = Env::new();
        let d = DomainExpr::katetov(2);
        let p = parse("sections({0: fin{}}, cofin{})").unwrap();
        let Some(Term::Set(s)) = &p.body else { panic!() };
        let a = env.set(s, &d).unwrap();
        assert!(katetov(2).unwrap().member(&a).unwrap());
        let bad = parse("fin{(1,2,3)}").unwrap();
        let Some(Term::Set(s)) = &bad.body else { panic!() };
        assert!(matches!(env.set(s, &d), Err(ElabError::Point { .. })));
    }
}
