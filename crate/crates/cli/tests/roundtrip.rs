use std::collections::BTreeMap;

use filterlab::gen::rng;
use filterlab_cli::dsl::{parse, Binding, FamilyAst, FilterAst, PointLit, Program, SeqAst, SetAst, Sort, Term};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::Rng;

/// Random trees over the full grammar; names refer only to earlier bindings of the right sort.
struct Gen<R: Rng> {
    r: R,
    names: Vec<(String, Sort)>,
}

impl<R: Rng> Gen<R> {
    fn var(&mut self, sort: Sort) -> Option<String> {
        let pool: Vec<&String> = self.names.iter().filter(|(_, s)| *s == sort).map(|(n, _)| n).collect();
        if pool.is_empty() || !self.r.gen_bool(0.2) {
            return None;
        }
        Some(pool[self.r.gen_range(0..pool.len())].clone())
    }

    fn table<T>(&mut self, depth: u32, mut item: impl FnMut(&mut Self, u32) -> T) -> BTreeMap<u64, T> {
        let n = self.r.gen_range(0..3);
        (0..n).map(|_| (self.r.gen_range(0..6), item(self, depth))).collect()
    }

    fn point(&mut self) -> PointLit {
        let k = self.r.gen_range(0..4);
        PointLit((0..k).map(|_| self.r.gen_range(0..20)).collect())
    }

    fn set(&mut self, depth: u32) -> SetAst {
        if let Some(v) = self.var(Sort::Set) {
            return SetAst::Var(v);
        }
        match self.r.gen_range(0..if depth == 0 { 2 } else { 3 }) {
            0 => SetAst::Fin((0..self.r.gen_range(0..4)).map(|_| self.point()).collect()),
            1 => SetAst::Cofin((0..self.r.gen_range(0..4)).map(|_| self.point()).collect()),
            _ => SetAst::Sections(self.table(depth - 1, Self::set), Box::new(self.set(depth - 1))),
        }
    }

    fn family(&mut self, depth: u32) -> FamilyAst {
        if let Some(v) = self.var(Sort::Family) {
            return FamilyAst::Var(v);
        }
        FamilyAst::Table(self.table(depth, Self::filter), Box::new(self.filter(depth)))
    }

    fn filter(&mut self, depth: u32) -> FilterAst {
        if let Some(v) = self.var(Sort::Filter) {
            return FilterAst::Var(v);
        }
        let d = depth.saturating_sub(1);
        match self.r.gen_range(0..if depth == 0 { 3 } else { 7 }) {
            0 => FilterAst::Frechet,
            1 => FilterAst::Katetov(self.r.gen_range(0..9)),
            2 => FilterAst::Principal(self.set(2)),
            3 => FilterAst::Prod(Box::new(self.filter(d)), Box::new(self.filter(d))),
            4 => FilterAst::Meet(Box::new(self.filter(d)), Box::new(self.filter(d))),
            5 => FilterAst::Fubini(Box::new(self.filter(d)), self.family(d)),
            _ => FilterAst::Limit(Box::new(self.filter(d)), self.family(d)),
        }
    }

    fn seq(&mut self, depth: u32) -> SeqAst {
        if let Some(v) = self.var(Sort::Seq) {
            return SeqAst::Var(v);
        }
        if depth == 0 || self.r.gen_bool(0.4) {
            let num = self.r.gen_range(-50i64..50);
            return SeqAst::Const(Rational64::new(num, self.r.gen_range(1..7)));
        }
        SeqAst::Table(self.table(depth - 1, Self::seq), Box::new(self.seq(depth - 1)))
    }

    fn term(&mut self) -> Term {
        match self.r.gen_range(0..4) {
            0 => Term::Filter(self.filter(3)),
            1 => Term::Set(self.set(3)),
            2 => Term::Family(self.family(2)),
            _ => Term::Seq(self.seq(3)),
        }
    }

    fn program(&mut self) -> Program {
        let mut bindings = Vec::new();
        for i in 0..self.r.gen_range(0..4) {
            let term = self.term();
            let name = format!("x{i}");
            self.names.push((name.clone(), term.sort()));
            bindings.push(Binding { name, term });
        }
        let body = if self.r.gen_bool(0.9) { Some(self.term()) } else { None };
        Program { bindings, body }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut g = Gen { r: rng(seed), names: Vec::new() };
        let p = g.program();
        let text = p.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e} in\n{text}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn reparsing_normalises_layout() {
    let src = "let  a=fin{ (1, 2) ,3 }; # comment\n  meet( principal(a),\n frechet )";
    let p = parse(src).unwrap();
    assert_eq!(p.to_string(), "let a = fin{(1,2),3};\nmeet(principal(a), frechet)");
    assert_eq!(parse(&p.to_string()).unwrap(), p);
}

#[test]
fn positioned_errors() {
    let cases = [
        ("fin{1,2,}", 1, 8, "trailing comma"),
        ("prod(frechet)", 1, 13, "expected `,`"),
        ("katetov(x)", 1, 9, "expected a natural number"),
        ("let f = frechet;\nfin{f}", 2, 5, "expected `(`"),
        ("frechet frechet", 1, 9, "expected end of input"),
        ("principal(fin{1} ", 1, 18, "expected `)`"),
        ("let fin = 3; fin", 1, 5, "reserved"),
        ("family({}, fin{})", 1, 12, "expected a filter"),
        ("sections({0 fin{}}, fin{})", 1, 13, "expected `:`"),
        ("limit(frechet, $)", 1, 16, "unexpected character"),
    ];
    for (src, line, col, msg) in cases {
        let e = parse(src).unwrap_err();
        assert_eq!((e.line, e.col), (line, col), "{src}: {e}");
        assert!(e.message.contains(msg), "{src}: {e}");
    }
}
