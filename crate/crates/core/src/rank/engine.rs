//! Fixpoint derivation of rank intervals over an expression tree.

use std::cmp::Ordering;

use super::bounds::{Hi, RankBounds};
use super::certificate::{CertNode, RankCertificate, RuleApp};
use super::ct::{ct_bound, CtBound};
use super::rules::Rule;
use super::RankError;
use crate::domain::DomainExpr;
use crate::filter::witness::{verify_quasi_homomorphism, PointMap, QuasiHom};
use crate::filter::{FilterExpr, FilterFamily, FilterTable};
use crate::gen::{random_member, random_set, rng};
use crate::set::SetExpr;

/// Past this many exception keys only the full index set is tried as `J`.
const MAX_CHOICE_KEYS: usize = 8;
const QH_SAMPLES: usize = 48;

/// A claimed quasi-homomorphism from `source` for every subexpression equal to `target`.
#[derive(Debug, Clone)]
pub struct QhHint {
    pub target: FilterExpr,
    pub source: FilterExpr,
    pub witness: QuasiHom,
}

#[derive(Debug, Clone, Default)]
pub struct RankHints {
    pub quasi_homs: Vec<QhHint>,
}

/// A member `J` of the base and the nodes of the filters indexed by it.
#[derive(Debug, Clone)]
struct Choice {
    label: String,
    members: Vec<usize>,
}

#[derive(Debug, Clone)]
enum Template {
    Fixed(Rule, String),
    Up(Rule, Vec<usize>, String),
    Down(Rule, usize),
    Over {
        rule: Rule,
        base: usize,
        choices: Vec<Choice>,
    },
}

#[derive(Debug)]
struct Node {
    label: String,
    depth: usize,
    templates: Vec<Template>,
    bounds: RankBounds,
}

#[derive(Debug, Default)]
struct Engine {
    nodes: Vec<Node>,
    iterations: usize,
}

fn tighter(a: &RankBounds, b: &RankBounds) -> bool {
    let hi_cmp = match (&a.hi, &b.hi) {
        (Hi::Finite(x), Hi::Finite(y)) => x.cmp(y),
        (Hi::Finite(_), Hi::Unbounded) => Ordering::Less,
        (Hi::Unbounded, Hi::Finite(_)) => Ordering::Greater,
        (Hi::Unbounded, Hi::Unbounded) => Ordering::Equal,
    };
    a.lo.cmp(&b.lo).then(hi_cmp.reverse()) == Ordering::Greater
}

/// `n` when `f` is literally the Katětov filter `N_n`.
pub fn katetov_level(f: &FilterExpr) -> Option<u64> {
    match f {
        FilterExpr::Principal(e) if *e.domain() == DomainExpr::Unit && e.is_full() => Some(0),
        // every infinite countable set carries a copy of N_1
        FilterExpr::Frechet(_) => Some(1),
        FilterExpr::Product { outer, inner } if **outer == FilterExpr::Frechet(DomainExpr::Nat) => {
            Some(katetov_level(inner)? + 1)
        }
        _ => None,
    }
}

/// Frechet, principal filters, and intersections and bijective copies of these.
pub fn syntactically_borel(f: &FilterExpr) -> bool {
    match f {
        FilterExpr::Frechet(_) | FilterExpr::Principal(_) => true,
        FilterExpr::Intersection(a, b) => syntactically_borel(a) && syntactically_borel(b),
        FilterExpr::Pushforward { inner, .. } => syntactically_borel(inner),
        _ => false,
    }
}

fn describe_map(m: &PointMap) -> String {
    match m {
        PointMap::Identity => "identity".into(),
        PointMap::Constant(p) => format!("const{p}"),
        PointMap::Column(c) => format!("column({c})"),
        PointMap::Bijection(s) => s.to_string(),
    }
}

/// `J` candidates: for each nonempty set `P` of table positions (exception keys and the
/// tail), the indices whose filter sits at a position in `P`.
fn index_sets(keys: &[u64], repeated: bool) -> Vec<(SetExpr, Vec<usize>)> {
    let n = keys.len();
    let masks: Vec<u64> = if n <= MAX_CHOICE_KEYS {
        (1..1u64 << (n + 1)).collect()
    } else {
        vec![(1u64 << (n + 1)) - 1]
    };
    let row_domain = DomainExpr::prod(DomainExpr::Nat);
    let nat = DomainExpr::Nat;
    masks
        .into_iter()
        .map(|mask| {
            let picked: Vec<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
            let with_tail = mask >> n & 1 == 1;
            let chosen = keys
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, k)| *k);
            let left_out = keys
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, k)| *k);
            let j = match (with_tail, repeated) {
                (true, false) => SetExpr::nat_cofin(left_out),
                (false, false) => SetExpr::nat_fin(chosen),
                (true, true) => SetExpr::sections(
                    row_domain.clone(),
                    left_out.map(|k| (k, SetExpr::empty(&nat))).collect(),
                    SetExpr::full(&nat),
                )
                .expect("rows over Nat"),
                (false, true) => SetExpr::sections(
                    row_domain.clone(),
                    chosen.map(|k| (k, SetExpr::full(&nat))).collect(),
                    SetExpr::empty(&nat),
                )
                .expect("rows over Nat"),
            };
            (j, picked)
        })
        .collect()
}

impl Engine {
    fn push(&mut self, label: String, depth: usize) -> usize {
        self.nodes.push(Node {
            label,
            depth,
            templates: Vec::new(),
            bounds: RankBounds::unknown(),
        });
        self.nodes.len() - 1
    }

    fn add(&mut self, f: &FilterExpr, depth: usize, hints: &RankHints) -> Result<usize, RankError> {
        let id = self.push(f.to_string(), depth);
        let mut t = Vec::new();
        if let Ok(free) = f.is_free() {
            t.push(Template::Fixed(Rule::R0, if free { "free" } else { "not-free" }.into()));
        }
        if let Some(n) = katetov_level(f) {
            t.push(Template::Fixed(Rule::RKat, format!("n={n}")));
        }
        if let CtBound::Level(n) = ct_bound(f) {
            t.push(Template::Fixed(Rule::RCt, format!("level={n}")));
        }
        match f {
            FilterExpr::Principal(_) | FilterExpr::Frechet(_) => {}
            FilterExpr::Product { outer, inner } => {
                let b = self.add(outer, depth + 1, hints)?;
                let m = self.add(inner, depth + 1, hints)?;
                if outer.is_proper()? {
                    let choices = vec![Choice {
                        label: "J=cofin{}".into(),
                        members: vec![m],
                    }];
                    self.fubini_templates(&mut t, outer, b, choices);
                }
            }
            FilterExpr::FubiniSum { base, family } => {
                let b = self.add(base, depth + 1, hints)?;
                let choices = self.table_choices(base, family, false, depth, hints)?;
                self.fubini_templates(&mut t, base, b, choices);
            }
            FilterExpr::Limit { base, family } => {
                let b = self.add(base, depth + 1, hints)?;
                let repeated = matches!(family, FilterFamily::Repeated(_));
                let table = family.base_table();
                let choices = self.table_choices(base, table, repeated, depth, hints)?;
                let constant = table.exceptions.is_empty()
                    && match family {
                        FilterFamily::Table(_) => true,
                        FilterFamily::Repeated(inner) => matches!(**inner, FilterFamily::Table(_)),
                        FilterFamily::Lifted { .. } => false,
                    };
                if !choices.is_empty() {
                    if constant {
                        let tail = *choices[0].members.last().unwrap();
                        t.push(Template::Up(Rule::RLimConst, vec![tail], String::new()));
                    }
                    for rule in [Rule::RLimHi, Rule::RLimLo] {
                        t.push(Template::Over {
                            rule,
                            base: b,
                            choices: choices.clone(),
                        });
                    }
                    if syntactically_borel(base) {
                        t.push(Template::Over {
                            rule: Rule::RLimHi1,
                            base: b,
                            choices,
                        });
                    }
                }
            }
            FilterExpr::Intersection(x, y) => {
                let a = self.add(x, depth + 1, hints)?;
                let c = self.add(y, depth + 1, hints)?;
                t.push(Template::Up(Rule::RMono, vec![a, c], String::new()));
                for child in [a, c] {
                    self.nodes[child].templates.push(Template::Down(Rule::RMonoLo, id));
                }
            }
            FilterExpr::Pushforward { sigma, inner } => {
                let i = self.add(inner, depth + 1, hints)?;
                t.push(Template::Up(Rule::RIso, vec![i], format!("sigma={sigma}")));
            }
        }
        for h in hints.quasi_homs.iter().filter(|h| h.target == *f) {
            let samples = qh_samples(f)?;
            let report = verify_quasi_homomorphism(&h.witness, &h.source, f, &samples)?;
            if !report.passed() {
                return Err(RankError::RejectedWitness(format!(
                    "quasi-homomorphism {} from {}: {report}",
                    describe_map(&h.witness.map),
                    h.source
                )));
            }
            let s = self.add(&h.source, depth + 1, &RankHints::default())?;
            let arg = format!(
                "map={} on={} samples={}",
                describe_map(&h.witness.map),
                h.witness.domain_member,
                report.count(&crate::filter::witness::SampleVerdict::Pass)
            );
            t.push(Template::Up(Rule::RQH, vec![s], arg));
        }
        self.nodes[id].templates.extend(t);
        Ok(id)
    }

    /// Adds member nodes of a table and the admissible `J` choices for it.
    fn table_choices(
        &mut self,
        base: &FilterExpr,
        table: &FilterTable,
        repeated: bool,
        depth: usize,
        hints: &RankHints,
    ) -> Result<Vec<Choice>, RankError> {
        let keys: Vec<u64> = table.exceptions.keys().copied().collect();
        let mut ids = Vec::new();
        for f in table.members() {
            ids.push(self.add(f, depth + 1, hints)?);
        }
        if !base.is_proper()? {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (j, picked) in index_sets(&keys, repeated) {
            if base.member(&j).unwrap_or(false) {
                out.push(Choice {
                    label: format!("J={j}"),
                    members: picked.into_iter().map(|p| ids[p]).collect(),
                });
            }
        }
        Ok(out)
    }

    fn fubini_templates(&self, t: &mut Vec<Template>, base: &FilterExpr, b: usize, choices: Vec<Choice>) {
        if choices.is_empty() {
            return;
        }
        let mut rules = vec![Rule::RFubLo, Rule::RFubHi];
        if matches!(base, FilterExpr::Frechet(_)) {
            rules.push(Rule::RFubFr);
        }
        if syntactically_borel(base) {
            rules.push(Rule::RFubExact);
        }
        for rule in rules {
            t.push(Template::Over {
                rule,
                base: b,
                choices: choices.clone(),
            });
        }
    }

    fn apps(&self, id: usize) -> Vec<RuleApp> {
        let bounds = |i: usize| self.nodes[i].bounds.clone();
        let mut out = Vec::new();
        for t in &self.nodes[id].templates {
            let (rule, candidates): (Rule, Vec<(Vec<RankBounds>, String)>) = match t {
                Template::Fixed(r, arg) => (*r, vec![(Vec::new(), arg.clone())]),
                Template::Up(r, ids, arg) => (*r, vec![(ids.iter().map(|&i| bounds(i)).collect(), arg.clone())]),
                Template::Down(r, p) => (*r, vec![(vec![bounds(*p)], String::new())]),
                Template::Over { rule, base, choices } => (
                    *rule,
                    choices
                        .iter()
                        .map(|c| {
                            let mut ins = vec![bounds(*base)];
                            ins.extend(c.members.iter().map(|&m| bounds(m)));
                            (ins, c.label.clone())
                        })
                        .collect(),
                ),
            };
            let mut best: Option<RuleApp> = None;
            for (ins, arg) in candidates {
                let Ok(res) = rule.eval(&ins, &arg) else { continue };
                if res == RankBounds::unknown() {
                    continue;
                }
                if best.as_ref().is_none_or(|b| tighter(&res, &b.out)) {
                    best = Some(RuleApp {
                        rule,
                        cite: rule.cite().into(),
                        ins,
                        arg,
                        out: res,
                    });
                }
            }
            out.extend(best);
        }
        out
    }

    fn settle(&mut self, id: usize) -> Result<bool, RankError> {
        let mut acc = self.nodes[id].bounds.clone();
        for app in self.apps(id) {
            acc = acc.intersect(&app.out)?;
        }
        let changed = acc != self.nodes[id].bounds;
        self.nodes[id].bounds = acc;
        Ok(changed)
    }

    fn run(&mut self) -> Result<(), RankError> {
        loop {
            self.iterations += 1;
            let mut changed = false;
            for id in (0..self.nodes.len()).rev() {
                changed |= self.settle(id)?;
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn certificate(&self) -> Result<RankCertificate, RankError> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (id, n) in self.nodes.iter().enumerate() {
            let rules = self.apps(id);
            let mut acc = RankBounds::unknown();
            for a in &rules {
                acc = acc.intersect(&a.out)?;
            }
            if acc != n.bounds {
                return Err(RankError::Internal(format!(
                    "node {} settled at {} but its rules give {acc}",
                    n.label, n.bounds
                )));
            }
            nodes.push(CertNode {
                label: n.label.clone(),
                depth: n.depth,
                bounds: n.bounds.clone(),
                rules,
            });
        }
        Ok(RankCertificate { nodes })
    }
}

fn qh_samples(f: &FilterExpr) -> Result<Vec<SetExpr>, RankError> {
    let d = f.domain()?;
    let mut r = rng(0x5eed);
    let mut out = vec![SetExpr::full(&d)];
    for i in 0..QH_SAMPLES {
        out.push(if i % 2 == 0 {
            random_member(&mut r, f)
        } else {
            random_set(&mut r, &d)
        });
    }
    Ok(out)
}

/// Outcome of a derivation, with the number of sweeps the fixpoint took.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub bounds: RankBounds,
    pub certificate: RankCertificate,
    pub sweeps: usize,
    pub tree_size: usize,
}

pub fn derive(f: &FilterExpr, hints: &RankHints) -> Result<Derivation, RankError> {
    f.domain()?;
    let mut e = Engine::default();
    e.add(f, 0, hints)?;
    e.run()?;
    let certificate = e.certificate()?;
    Ok(Derivation {
        bounds: e.nodes[0].bounds.clone(),
        certificate,
        sweeps: e.iterations,
        tree_size: e.nodes.len(),
    })
}

/// The tightest interval the rule catalog yields for `f`, with its certificate.
pub fn rank_bounds(f: &FilterExpr) -> Result<(RankBounds, RankCertificate), RankError> {
    rank_bounds_with(f, &RankHints::default())
}

pub fn rank_bounds_with(f: &FilterExpr, hints: &RankHints) -> Result<(RankBounds, RankCertificate), RankError> {
    let d = derive(f, hints)?;
    Ok((d.bounds, d.certificate))
}

/// A single-node certificate for bounds established outside the rule catalog.
pub fn certified_bounds(
    label: &str,
    bounds: &RankBounds,
    provenance: &str,
) -> Result<(RankBounds, RankCertificate), RankError> {
    if !bounds.is_consistent() {
        return Err(RankError::Inconsistent {
            left: bounds.clone(),
            right: bounds.clone(),
        });
    }
    let arg = format!("bounds={bounds}");
    let out = Rule::RCert.eval(&[], &arg)?;
    let cert = RankCertificate {
        nodes: vec![CertNode {
            label: label.to_string(),
            depth: 0,
            bounds: out.clone(),
            rules: vec![RuleApp {
                rule: Rule::RCert,
                cite: format!("{}: {}", Rule::RCert.cite(), provenance.replace('"', "'")),
                ins: Vec::new(),
                arg,
                out: out.clone(),
            }],
        }],
    };
    Ok((out, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::FilterTable;

    fn fr() -> FilterExpr {
        FilterExpr::Frechet(DomainExpr::Nat)
    }

    fn kat(n: usize) -> FilterExpr {
        (0..n).fold(FilterExpr::Principal(SetExpr::full(&DomainExpr::Unit)), |f, _| {
            FilterExpr::product(fr(), f).unwrap()
        })
    }

    #[test]
    fn katetov_exact() {
        for n in 0..=4 {
            let (b, cert) = rank_bounds(&kat(n)).unwrap();
            assert_eq!(b, RankBounds::finite(n as u64, n as u64));
            assert_eq!(cert.replay().unwrap(), b);
        }
    }

    #[test]
    fn principal_point_is_rank_zero() {
        let (b, _) = rank_bounds(&FilterExpr::Principal(SetExpr::nat_fin([5]))).unwrap();
        assert_eq!(b, RankBounds::finite(0, 0));
    }

    #[test]
    fn fubini_exact() {
        let g = FilterExpr::fubini(fr(), FilterTable::constant(kat(2))).unwrap();
        let (b, cert) = rank_bounds(&g).unwrap();
        assert_eq!(b, RankBounds::finite(3, 3));
        assert!(cert.uses(Rule::RFubExact));
    }

    #[test]
    fn limit_upper_bounds() {
        let lim = FilterExpr::limit(
            fr(),
            FilterFamily::table(
                [(0, FilterExpr::Principal(SetExpr::full(&DomainExpr::katetov(2))))]
                    .into_iter()
                    .collect(),
                kat(2),
            ),
        )
        .unwrap();
        let d = derive(&lim, &RankHints::default()).unwrap();
        let root = d.certificate.root_rules();
        let hi = |r: Rule| root.iter().find(|a| a.rule == r).unwrap().out.hi.clone();
        assert_eq!(hi(Rule::RLimHi), Hi::Finite(4.into()));
        assert_eq!(hi(Rule::RLimHi1), Hi::Finite(3.into()));
        assert_eq!(d.bounds, RankBounds::finite(1, 3));
        assert!(d.sweeps <= Rule::ALL.len() * d.tree_size);
    }
}
