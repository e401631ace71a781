//! Named property suites with one pass/fail line per check.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::constructions::{
    collapse_limit, collapse_limit_of, katetov, omega_times_frechet, selector_shadow, Answer, CertifiedFilter,
    IndexSet, InterleavedPair, Query,
};
use crate::domain::{DomainExpr, Point};
use crate::filter::witness::Diagonal;
use crate::filter::{fubini_as_limit, BijectionSpec, FilterExpr, FilterFamily, FilterTable};
use crate::game::{
    column_bound_violation, play, player_one, player_two, replay, separator_verdict, validate_transcript,
    SeparatorFamily, UniversalFamily, Verdict,
};
use crate::gen::{random_domain, random_filter, random_filter_of_kind, random_member, random_set, rng, FilterKind};
use crate::rank::{derive, rank_bounds, Hi, Ordinal, RankBounds, RankHints, Rule};
use crate::reference::reference_member;
use crate::set::SetExpr;

pub const SUITES: [&str; 11] = [
    "katetov",
    "rank-bounds",
    "ordinals",
    "oracle",
    "filter-laws",
    "fubini-limit",
    "games",
    "separator",
    "lemma43",
    "thm44",
    "example53",
];

pub const DEFAULT_TRUNC: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Runs one check; `Ok` carries the detail of a pass, `Err` of a failure.
    fn check(&mut self, label: &str, f: impl FnOnce() -> Result<String, String>) {
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            label: label.to_string(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}/{}: {}", self.suite, c.label, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub trunc: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { trunc: DEFAULT_TRUNC }
    }
}

/// Runs a suite from [`SUITES`]; `None` for an unknown name.
pub fn run_suite(name: &str, opts: &CheckOptions) -> Option<SuiteReport> {
    Some(match name {
        "katetov" => katetov_suite(),
        "rank-bounds" => rank_bounds_suite(),
        "ordinals" => ordinals_suite(),
        "oracle" => oracle_suite(),
        "filter-laws" => filter_laws_suite(),
        "fubini-limit" => fubini_limit_suite(),
        "games" => games_suite(),
        "separator" => separator_suite(),
        "lemma43" => interleaving_suite(opts.trunc),
        "thm44" => collapse_limit_suite(),
        "example53" => omega_frechet_suite(),
        _ => return None,
    })
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn expect<T: PartialEq + fmt::Display>(what: &str, got: T, want: T) -> Result<String, String> {
    if got == want {
        Ok(format!("{what} = {got}"))
    } else {
        Err(format!("{what} = {got}, expected {want}"))
    }
}

fn fr() -> FilterExpr {
    FilterExpr::Frechet(DomainExpr::Nat)
}

fn katetov_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("katetov");
    for n in 0..=4usize {
        rep.check(&format!("N_{n}"), || {
            let (b, cert) = rank_bounds(&katetov(n).map_err(err)?).map_err(err)?;
            let replayed = cert.replay().map_err(err)?;
            if replayed != b {
                return Err(format!("replay gives {replayed}, derivation {b}"));
            }
            expect("bounds", b, RankBounds::finite(n as u64, n as u64))
        });
    }
    rep
}

fn rank_bounds_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("rank-bounds");
    for (n, want) in [(2usize, 3u64), (1, 2)] {
        rep.check(&format!("fubini over N_{n}"), || {
            let g = FilterExpr::fubini(fr(), FilterTable::constant(katetov(n).map_err(err)?)).map_err(err)?;
            let (b, cert) = rank_bounds(&g).map_err(err)?;
            cert.replay().map_err(err)?;
            expect("bounds", b, RankBounds::finite(want, want))
        });
    }
    rep.check("limit of N_2 over Frechet", || {
        let k2 = katetov(2).map_err(err)?;
        let full = FilterExpr::Principal(SetExpr::full(&DomainExpr::katetov(2)));
        let lim = FilterExpr::limit(fr(), FilterFamily::table([(0, full)].into_iter().collect(), k2)).map_err(err)?;
        let d = derive(&lim, &RankHints::default()).map_err(err)?;
        d.certificate.replay().map_err(err)?;
        let root = d.certificate.root_rules();
        let hi = |r: Rule| root.iter().find(|a| a.rule == r).map(|a| a.out.hi.clone());
        let generic = hi(Rule::RLimHi).ok_or("RLimHi not applied")?;
        let sharp = hi(Rule::RLimHi1).ok_or("RLimHi1 not applied")?;
        let three = Hi::Finite(Ordinal::finite(3));
        if generic != Hi::Finite(Ordinal::finite(4)) || sharp != three || d.bounds.hi != three {
            return Err(format!("RLimHi {generic}, RLimHi1 {sharp}, fixpoint {}", d.bounds));
        }
        Ok(format!("RLimHi {generic}, RLimHi1 {sharp}, fixpoint {}", d.bounds))
    });
    rep
}

/// Ordinals below `ω²` as `ω·a + m`, added by hand.
fn small_add((a, m): (u64, u64), (b, n): (u64, u64)) -> (u64, u64) {
    if b > 0 {
        (a + b, n)
    } else {
        (a, m + n)
    }
}

fn small(a: u64, m: u64) -> Ordinal {
    let mut terms = Vec::new();
    if a > 0 {
        terms.push((1, a));
    }
    if m > 0 {
        terms.push((0, m));
    }
    Ordinal::from_terms(terms)
}

fn random_ordinal(r: &mut impl Rng) -> Ordinal {
    let n = r.gen_range(0..4);
    Ordinal::from_terms((0..n).map(|_| (r.gen_range(0..4), r.gen_range(1..5))).collect())
}

fn ordinals_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("ordinals");
    let w = Ordinal::omega();
    rep.check("1+w", || expect("1+w", Ordinal::finite(1).add(&w), w.clone()));
    rep.check("w+1", || {
        expect("w+1", w.add(&Ordinal::finite(1)).to_string(), "w+1".to_string())
    });
    rep.check("(w*2+3)+w^2", || {
        let lhs = Ordinal::from_terms(vec![(1, 2), (0, 3)]);
        let w2 = Ordinal::from_terms(vec![(2, 1)]);
        expect("sum", lhs.add(&w2), w2.clone())
    });
    rep.check("randomized associativity and absorption", || {
        let mut r = rng(12);
        for _ in 0..1000 {
            let (a, b, c) = (random_ordinal(&mut r), random_ordinal(&mut r), random_ordinal(&mut r));
            if a.add(&b).add(&c) != a.add(&b.add(&c)) {
                return Err(format!("({a}+{b})+{c} differs from {a}+({b}+{c})"));
            }
            let lead = |o: &Ordinal| o.terms().first().map(|t| t.0);
            if let (Some(x), Some(y)) = (lead(&a), lead(&b)) {
                if x < y && a.add(&b) != b {
                    return Err(format!("{a}+{b} does not absorb"));
                }
            }
        }
        Ok("1000 triples".into())
    });
    rep.check("xi+1+alpha below w*2", || {
        let mut vals: Vec<(u64, u64)> = (0..6).map(|m| (0, m)).collect();
        vals.extend((0..6).map(|m| (1, m)));
        vals.push((2, 0));
        for &x in &vals {
            for &y in &vals {
                let want = small_add(small_add(x, (0, 1)), y);
                let got = small(x.0, x.1).add(&Ordinal::finite(1)).add(&small(y.0, y.1));
                if got != small(want.0, want.1) {
                    return Err(format!("{}+1+{} = {got}", small(x.0, x.1), small(y.0, y.1)));
                }
            }
        }
        Ok(format!("{} pairs", vals.len() * vals.len()))
    });
    rep
}

fn oracle_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("oracle");
    rep.check("membership vs definitional evaluator", || {
        let mut r = rng(2024);
        for i in 0..1000 {
            let d = random_domain(&mut r, 2);
            let f = random_filter(&mut r, &d, 3);
            let a = if r.gen_bool(0.5) {
                random_member(&mut r, &f)
            } else {
                random_set(&mut r, &d)
            };
            let fast = f.member(&a).map_err(err)?;
            let slow = reference_member(&f, &a).ok_or_else(|| format!("pair {i}: evaluator declined {f}"))?;
            if fast != slow {
                return Err(format!("pair {i}: {f} on {a}: oracle {fast}, evaluator {slow}"));
            }
        }
        Ok("1000 pairs, 0 mismatches".into())
    });
    rep
}

fn filter_laws_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("filter-laws");
    for (k, kind) in FilterKind::ALL.into_iter().enumerate() {
        rep.check(&format!("{kind:?}"), || {
            let mut r = rng(600 + k as u64);
            for _ in 0..500 {
                let f = random_filter_of_kind(&mut r, kind, 3);
                let d = f.domain().map_err(err)?;
                let pick = |r: &mut rand_chacha::ChaCha8Rng| {
                    if r.gen_bool(0.6) {
                        random_member(r, &f)
                    } else {
                        random_set(r, &d)
                    }
                };
                let (a, b) = (pick(&mut r), pick(&mut r));
                let m = |s: &SetExpr| f.member(s).map_err(err);
                if m(&SetExpr::empty(&d))? {
                    return Err(format!("{f} contains the empty set"));
                }
                let (ina, inb) = (m(&a)?, m(&b)?);
                if ina && !m(&a.union(&b).map_err(err)?)? {
                    return Err(format!("{f}: not upward closed at {a}"));
                }
                if ina && inb && !m(&a.intersect(&b).map_err(err)?)? {
                    return Err(format!("{f}: {a} and {b} in, intersection out"));
                }
            }
            Ok("500 triples".into())
        });
    }
    rep
}

fn fubini_limit_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("fubini-limit");
    let shapes = [("Frechet", 1usize), ("N_2", 2)];
    for (i, (name, n)) in shapes.into_iter().enumerate() {
        rep.check(&format!("Frechet base, {name} family"), || {
            let table = FilterTable::constant(katetov(n).map_err(err)?);
            let fub = FilterExpr::fubini(fr(), table.clone()).map_err(err)?;
            let lim = fubini_as_limit(fr(), table).map_err(err)?;
            let d = fub.domain().map_err(err)?;
            let mut r = rng(17 + i as u64);
            for k in 0..200 {
                let a = if k % 2 == 0 {
                    random_set(&mut r, &d)
                } else {
                    random_member(&mut r, &fub)
                };
                if fub.member(&a).map_err(err)? != lim.member(&a).map_err(err)? {
                    return Err(format!("mismatch on {a}"));
                }
            }
            Ok("200 sets, 0 mismatches".into())
        });
    }
    rep
}

fn games_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("games");
    rep.check("Frechet, universal singletons, 10 rounds", || {
        let mut one = player_one("avoid", &fr()).map_err(err)?;
        let mut two = player_two("universal", &fr()).map_err(err)?;
        let t = play(&fr(), one.as_mut(), two.as_mut(), 10, 0).map_err(err)?;
        validate_transcript(&t).map_err(err)?;
        expect("|U|", t.union().len(), 10)
    });
    rep.check("N_2 copy strategy vs 50 random opponents", || {
        let n2 = FilterExpr::product(fr(), fr()).map_err(err)?;
        let sigma = BijectionSpec::patch(DomainExpr::prod(DomainExpr::Nat), Default::default()).map_err(err)?;
        for seed in 0..50 {
            let mut one = player_one("copy", &n2).map_err(err)?;
            let mut two = player_two("random", &n2).map_err(err)?;
            let t = play(&n2, one.as_mut(), two.as_mut(), 50, seed).map_err(err)?;
            validate_transcript(&t).map_err(err)?;
            if let Some((n, col)) = column_bound_violation(&t, &sigma).map_err(err)? {
                return Err(format!("seed {seed}: column {col} over budget in round {n}"));
            }
            if replay(&t).map_err(err)? != t {
                return Err(format!("seed {seed}: replay differs"));
            }
        }
        Ok("50 games of 50 rounds, legal, bounded, replayed".into())
    });
    rep
}

fn separator_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("separator");
    rep.check("Frechet limit of lifted Frechet", || {
        let omega2 = DomainExpr::prod(DomainExpr::Nat);
        let family = FilterFamily::Lifted {
            table: FilterTable::constant(fr()),
            target: omega2.clone(),
        };
        let lim = FilterExpr::limit(fr(), family.clone()).map_err(err)?;
        let sep = SeparatorFamily::Filters(family);
        let u = UniversalFamily::Singletons {
            domain: DomainExpr::Nat,
        };
        let mut r = rng(8);
        let (mut ins, mut outs, mut unknown) = (0, 0, 0);
        let mut draws = 0;
        while ins < 100 || outs < 100 {
            draws += 1;
            if draws > 100_000 {
                return Err(format!("only {ins} members and {outs} duals drawn"));
            }
            let a = if r.gen_bool(0.5) {
                random_member(&mut r, &lim)
            } else {
                random_set(&mut r, &omega2)
            };
            let (member, dual) = (lim.member(&a).map_err(err)?, lim.dual_member(&a).map_err(err)?);
            if !(member && ins < 100 || dual && outs < 100) {
                continue;
            }
            let v = separator_verdict(&lim, &u, &sep, &a).map_err(err)?;
            match v {
                Verdict::Unknown(_) => unknown += 1,
                Verdict::In if member => ins += 1,
                Verdict::Out if dual => outs += 1,
                other => return Err(format!("{a}: verdict {other}, member {member}, dual {dual}")),
            }
        }
        if unknown > 0 {
            return Err(format!("{unknown} unknown verdicts"));
        }
        Ok(format!("{ins} In, {outs} Out, 0 Unknown"))
    });
    rep
}

fn interleaving_suite(trunc: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("lemma43");
    let alpha = 2;
    let mut pair = match InterleavedPair::new(alpha) {
        Ok(p) => p,
        Err(e) => {
            rep.check("interleaving", || Err(err(e)));
            return rep;
        }
    };
    let bounds = [trunc / 10, trunc, trunc * 10];
    rep.check("pairwise intersections, i,j < 10", || {
        let mut tables = Vec::new();
        for b in bounds {
            tables.push(pair.joint_table(10, b).map_err(err)?);
        }
        for i in 0..10 {
            for j in 0..10 {
                let counts: Vec<u64> = tables.iter().map(|t| t[i][j]).collect();
                if counts[1] == 0 || !(counts[0] < counts[1] && counts[1] < counts[2]) {
                    return Err(format!("({i},{j}) counts {counts:?} at {bounds:?}"));
                }
            }
        }
        let least = tables[1].iter().flatten().min().copied().unwrap_or(0);
        Ok(format!(
            "nonempty at {trunc}, strictly growing over {bounds:?}, least {least}"
        ))
    });
    rep.check("injective prefixes", || {
        for side in 0..2 {
            let pts: BTreeSet<&Point> = pair.prefix(side, trunc).map_err(err)?.iter().collect();
            if pts.len() as u64 != trunc {
                return Err(format!("pi_{side} repeats a point below {trunc}"));
            }
        }
        Ok(format!("pi_0, pi_1 injective on [0,{trunc})"))
    });
    rep.check("selector bound |E_j & U S_i| <= j, j < 20", || {
        let s = selector_shadow(&mut pair, trunc, 20).map_err(err)?;
        if let Some(j) = s.bound_violation() {
            return Err(format!("block {j} holds {} selected points", s.block_hits[j]));
        }
        for (i, sel) in s.selectors.iter().enumerate() {
            if sel.len() < s.available[i].min(5) {
                return Err(format!("S_{i} has {} of {} available", sel.len(), s.available[i]));
            }
        }
        Ok(format!("block hits {:?}", s.block_hits))
    });
    rep
}

fn mock(p: u64) -> Result<CertifiedFilter, String> {
    CertifiedFilter::new(
        format!("mock{p}"),
        DomainExpr::Nat,
        RankBounds::finite(0, 0),
        "mock",
        move |q| {
            Ok(match q {
                Query::Set(s) => Answer::from_bool(s.contains(&Point::Nat(p))?),
                _ => Answer::Unknown,
            })
        },
    )
    .map_err(err)
}

fn collapse_limit_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("thm44");
    rep.check("Frechet base, H = evens", || {
        let lim = collapse_limit(2, fr(), IndexSet::even()).map_err(err)?;
        let (b, cert) = lim.filter.rank_bounds().map_err(err)?;
        cert.replay().map_err(err)?;
        expect("bounds", b, RankBounds::finite(1, 1))
    });
    rep.check("precondition", || {
        let base = FilterExpr::Principal(SetExpr::nat_fin([0]));
        match collapse_limit(2, base, IndexSet::Symbolic(SetExpr::nat_fin([0]))) {
            Err(e) => Ok(e.to_string()),
            Ok(_) => Err("H containing the generator was accepted".into()),
        }
    });
    rep.check("limit equals G0 & G1 on mock oracles", || {
        let mut r = rng(44);
        let mut combos = BTreeSet::new();
        for k in 0..100 {
            let (base, h) = if k % 2 == 0 {
                (fr(), IndexSet::even())
            } else {
                (
                    FilterExpr::Principal(SetExpr::nat_fin([0, 1])),
                    IndexSet::Symbolic(SetExpr::nat_fin([1])),
                )
            };
            let lim = collapse_limit_of(base, h, mock(r.gen_range(0..5))?, mock(r.gen_range(0..5))?).map_err(err)?;
            for _ in 0..8 {
                let a = Query::Set(random_set(&mut r, &DomainExpr::Nat));
                let g = (lim.g0.member(&a).map_err(err)?, lim.g1.member(&a).map_err(err)?);
                combos.insert((g.0.to_string(), g.1.to_string()));
                let (def, installed) = (
                    lim.member_by_definition(&a).map_err(err)?,
                    lim.filter.member(&a).map_err(err)?,
                );
                if def != installed {
                    return Err(format!("{a}: definition {def}, installed {installed}"));
                }
            }
        }
        if combos.len() < 4 {
            return Err(format!("only {} membership combinations exercised", combos.len()));
        }
        Ok("100 mock pairs, all four combinations".into())
    });
    rep
}

fn omega_frechet_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("example53");
    let ex = match omega_times_frechet() {
        Ok(ex) => ex,
        Err(e) => {
            rep.check("construction", || Err(err(e)));
            return rep;
        }
    };
    rep.check("rank", || {
        ex.certificate.replay().map_err(err)?;
        if !ex.certificate.uses(Rule::RQH) || !ex.witness_report.passed() {
            return Err("no verified quasi-homomorphism in the certificate".into());
        }
        expect("bounds", ex.bounds.clone(), RankBounds::finite(1, 1))
    });
    rep.check("countable type", || match ex.ct.level() {
        Some(n) if n <= 2 => Ok(format!("ct <= {n} via {}", ex.limit_form)),
        _ => Err(format!("ct bound {}", ex.ct)),
    });
    rep.check("diagonalization", || match &ex.diagonal {
        Diagonal::Yes(a) => Ok(format!("witness {a}")),
        other => Err(format!("{other:?}")),
    });
    rep
}
