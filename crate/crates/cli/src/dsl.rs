//! The expression language: lexer, typed syntax tree, parser, and printer.
//!
//! ```text
//! program := { "let" ident "=" term ";" } term
//! filter  := "frechet" | "principal" "(" set ")" | "prod" "(" filter "," filter ")"
//!          | "fubini" "(" filter "," family ")" | "limit" "(" filter "," family ")"
//!          | "meet" "(" filter "," filter ")" | "katetov" "(" nat ")" | ident
//! set     := "fin" "{" points "}" | "cofin" "{" points "}" | "sections" "(" table "," set ")" | ident
//! family  := "family" "(" table "," filter ")" | ident
//! seq     := rational | "seq" "(" table "," seq ")" | ident
//! table   := "{" [ nat ":" term { "," nat ":" term } ] "}"
//! point   := nat | "(" [ nat { "," nat } ] ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Filter,
    Set,
    Family,
    Seq,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Filter => "filter",
            Sort::Set => "set",
            Sort::Family => "family",
            Sort::Seq => "sequence",
        })
    }
}

/// A point literal as its coordinate tuple; `()` is the point of the one-point domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PointLit(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterAst {
    Frechet,
    Principal(SetAst),
    Prod(Box<FilterAst>, Box<FilterAst>),
    Fubini(Box<FilterAst>, FamilyAst),
    Limit(Box<FilterAst>, FamilyAst),
    Meet(Box<FilterAst>, Box<FilterAst>),
    Katetov(u64),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetAst {
    Fin(Vec<PointLit>),
    Cofin(Vec<PointLit>),
    Sections(BTreeMap<u64, SetAst>, Box<SetAst>),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyAst {
    Table(BTreeMap<u64, FilterAst>, Box<FilterAst>),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqAst {
    Const(Rational64),
    Table(BTreeMap<u64, SeqAst>, Box<SeqAst>),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Filter(FilterAst),
    Set(SetAst),
    Family(FamilyAst),
    Seq(SeqAst),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Filter(_) => Sort::Filter,
            Term::Set(_) => Sort::Set,
            Term::Family(_) => Sort::Family,
            Term::Seq(_) => Sort::Seq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub term: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub bindings: Vec<Binding>,
    /// `None` for a definitions-only file.
    pub body: Option<Term>,
}

pub const KEYWORDS: [&str; 14] = [
    "let",
    "frechet",
    "principal",
    "prod",
    "fubini",
    "limit",
    "meet",
    "katetov",
    "fin",
    "cofin",
    "sections",
    "family",
    "seq",
    "_",
];

const FILTER_HEADS: [&str; 7] = ["frechet", "principal", "prod", "fubini", "limit", "meet", "katetov"];
const SET_HEADS: [&str; 3] = ["fin", "cofin", "sections"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(bump(&mut chars));
            }
            let n = s.parse().map_err(|_| ParseError {
                line: l0,
                col: c0,
                message: format!("number {s} out of range"),
            })?;
            out.push(Token {
                tok: Tok::Nat(n),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars.peek().is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_') {
                s.push(bump(&mut chars));
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
        } else if "(){},:;=-/".contains(c) {
            bump(&mut chars);
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
        } else {
            return Err(ParseError {
                line: l0,
                col: c0,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Sorts of names already in scope, e.g. from a definitions file.
pub type Scope = HashMap<String, Sort>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            Err(Self::error_at(&t, format!("expected `{c}`, found {}", t.tok)))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Nat(n) => Ok(n),
            _ => Err(Self::error_at(
                &t,
                format!("expected a natural number, found {}", t.tok),
            )),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut bindings = Vec::new();
        while self.peek().tok == Tok::Ident("let".into()) {
            self.next();
            let t = self.next();
            let name = match t.tok {
                Tok::Ident(ref s) if !KEYWORDS.contains(&s.as_str()) => s.clone(),
                Tok::Ident(ref s) => return Err(Self::error_at(&t, format!("`{s}` is reserved"))),
                _ => return Err(Self::error_at(&t, format!("expected a name, found {}", t.tok))),
            };
            self.expect_sym('=')?;
            let term = self.term()?;
            self.expect_sym(';')?;
            self.scope.insert(name.clone(), term.sort());
            bindings.push(Binding { name, term });
        }
        let body = if self.peek().tok == Tok::Eof {
            None
        } else {
            Some(self.term()?)
        };
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            return Err(Self::error_at(&t, format!("expected end of input, found {}", t.tok)));
        }
        Ok(Program { bindings, body })
    }

    /// A term of any sort, chosen by its leading token.
    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.peek().clone();
        let sort = match &t.tok {
            Tok::Nat(_) | Tok::Sym('-') => Sort::Seq,
            Tok::Ident(s) if FILTER_HEADS.contains(&s.as_str()) => Sort::Filter,
            Tok::Ident(s) if SET_HEADS.contains(&s.as_str()) => Sort::Set,
            Tok::Ident(s) if s == "family" => Sort::Family,
            Tok::Ident(s) if s == "seq" => Sort::Seq,
            Tok::Ident(s) => self.lookup(&t, s)?,
            _ => return Err(Self::error_at(&t, format!("expected a term, found {}", t.tok))),
        };
        self.of_sort(sort)
    }

    fn of_sort(&mut self, sort: Sort) -> Result<Term, ParseError> {
        Ok(match sort {
            Sort::Filter => Term::Filter(self.filter()?),
            Sort::Set => Term::Set(self.set()?),
            Sort::Family => Term::Family(self.family()?),
            Sort::Seq => Term::Seq(self.seq()?),
        })
    }

    fn lookup(&self, t: &Token, name: &str) -> Result<Sort, ParseError> {
        self.scope
            .get(name)
            .copied()
            .ok_or_else(|| Self::error_at(t, format!("unbound name `{name}`")))
    }

    /// A name of the expected sort, or `None` if the next token is not a plain name.
    fn var(&mut self, want: Sort) -> Result<Option<String>, ParseError> {
        let t = self.peek().clone();
        let Tok::Ident(s) = &t.tok else {
            return Ok(None);
        };
        if KEYWORDS.contains(&s.as_str()) {
            return Ok(None);
        }
        let sort = self.lookup(&t, s)?;
        if sort != want {
            return Err(Self::error_at(&t, format!("`{s}` is a {sort}, expected a {want}")));
        }
        self.next();
        Ok(Some(s.clone()))
    }

    fn head(&mut self, want: Sort, heads: &[&str]) -> Result<String, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if heads.contains(&s.as_str()) => Ok(s.clone()),
            _ => Err(Self::error_at(&t, format!("expected a {want}, found {}", t.tok))),
        }
    }

    fn filter(&mut self) -> Result<FilterAst, ParseError> {
        if let Some(v) = self.var(Sort::Filter)? {
            return Ok(FilterAst::Var(v));
        }
        let head = self.head(Sort::Filter, &FILTER_HEADS)?;
        if head == "frechet" {
            return Ok(FilterAst::Frechet);
        }
        self.expect_sym('(')?;
        let f = match head.as_str() {
            "principal" => FilterAst::Principal(self.set()?),
            "katetov" => FilterAst::Katetov(self.nat()?),
            "prod" | "meet" => {
                let a = Box::new(self.filter()?);
                self.expect_sym(',')?;
                let b = Box::new(self.filter()?);
                if head == "prod" {
                    FilterAst::Prod(a, b)
                } else {
                    FilterAst::Meet(a, b)
                }
            }
            _ => {
                let base = Box::new(self.filter()?);
                self.expect_sym(',')?;
                let fam = self.family()?;
                if head == "fubini" {
                    FilterAst::Fubini(base, fam)
                } else {
                    FilterAst::Limit(base, fam)
                }
            }
        };
        self.expect_sym(')')?;
        Ok(f)
    }

    fn set(&mut self) -> Result<SetAst, ParseError> {
        if let Some(v) = self.var(Sort::Set)? {
            return Ok(SetAst::Var(v));
        }
        let head = self.head(Sort::Set, &SET_HEADS)?;
        if head == "sections" {
            self.expect_sym('(')?;
            let table = self.table(Self::set)?;
            self.expect_sym(',')?;
            let tail = self.set()?;
            self.expect_sym(')')?;
            return Ok(SetAst::Sections(table, Box::new(tail)));
        }
        self.expect_sym('{')?;
        let pts = self.list('}', Self::point)?;
        Ok(if head == "fin" {
            SetAst::Fin(pts)
        } else {
            SetAst::Cofin(pts)
        })
    }

    fn family(&mut self) -> Result<FamilyAst, ParseError> {
        if let Some(v) = self.var(Sort::Family)? {
            return Ok(FamilyAst::Var(v));
        }
        self.head(Sort::Family, &["family"])?;
        self.expect_sym('(')?;
        let table = self.table(Self::filter)?;
        self.expect_sym(',')?;
        let tail = self.filter()?;
        self.expect_sym(')')?;
        Ok(FamilyAst::Table(table, Box::new(tail)))
    }

    fn seq(&mut self) -> Result<SeqAst, ParseError> {
        if let Some(v) = self.var(Sort::Seq)? {
            return Ok(SeqAst::Var(v));
        }
        if matches!(self.peek_at(0), Tok::Nat(_) | Tok::Sym('-')) {
            return Ok(SeqAst::Const(self.rational()?));
        }
        self.head(Sort::Seq, &["seq"])?;
        self.expect_sym('(')?;
        let table = self.table(Self::seq)?;
        self.expect_sym(',')?;
        let tail = self.seq()?;
        self.expect_sym(')')?;
        Ok(SeqAst::Table(table, Box::new(tail)))
    }

    fn rational(&mut self) -> Result<Rational64, ParseError> {
        let start = self.peek().clone();
        let neg = self.eat_sym('-');
        let num = self.nat()?;
        let den = if self.eat_sym('/') {
            let t = self.peek().clone();
            let d = self.nat()?;
            if d == 0 {
                return Err(Self::error_at(&t, "zero denominator"));
            }
            d
        } else {
            1
        };
        let range = || Self::error_at(&start, "rational out of range");
        let num = i64::try_from(num).map_err(|_| range())?;
        let den = i64::try_from(den).map_err(|_| range())?;
        Ok(Rational64::new(if neg { -num } else { num }, den))
    }

    fn point(&mut self) -> Result<PointLit, ParseError> {
        if matches!(self.peek_at(0), Tok::Nat(_)) {
            return Ok(PointLit(vec![self.nat()?]));
        }
        self.expect_sym('(')?;
        Ok(PointLit(self.list(')', Self::nat)?))
    }

    /// Comma-separated items up to and including `close`; trailing commas are rejected.
    fn list<T>(
        &mut self,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            let t = self.next();
            match t.tok {
                Tok::Sym(c) if c == close => return Ok(out),
                Tok::Sym(',') => {
                    if self.peek().tok == Tok::Sym(close) {
                        return Err(Self::error_at(&t, "trailing comma"));
                    }
                }
                _ => {
                    return Err(Self::error_at(
                        &t,
                        format!("expected `,` or `{close}`, found {}", t.tok),
                    ))
                }
            }
        }
    }

    fn table<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<BTreeMap<u64, T>, ParseError> {
        self.expect_sym('{')?;
        let mut out = BTreeMap::new();
        let entries = self.list('}', |p| {
            let t = p.peek().clone();
            let k = p.nat()?;
            p.expect_sym(':')?;
            Ok((t, k, item(p)?))
        })?;
        for (t, k, v) in entries {
            if out.insert(k, v).is_some() {
                return Err(Self::error_at(&t, format!("duplicate key {k}")));
            }
        }
        Ok(out)
    }
}

pub fn parse(src: &str) -> Result<Program, ParseError> {
    parse_in(src, &Scope::new())
}

/// Parses with extra names in scope.
pub fn parse_in(src: &str, scope: &Scope) -> Result<Program, ParseError> {
    Parser {
        toks: lex(src)?,
        pos: 0,
        scope: scope.clone(),
    }
    .program()
}

/// Parses a program whose body must be a term of the given sort.
pub fn parse_term(src: &str, scope: &Scope, want: Sort) -> Result<Program, ParseError> {
    let p = parse_in(src, scope)?;
    match &p.body {
        Some(t) if t.sort() == want => Ok(p),
        Some(t) => Err(ParseError {
            line: 1,
            col: 1,
            message: format!("expected a {want}, found a {}", t.sort()),
        }),
        None => Err(ParseError {
            line: 1,
            col: 1,
            message: format!("expected a {want}, found only definitions"),
        }),
    }
}

impl Program {
    /// Sorts of the names this program binds.
    pub fn scope(&self) -> Scope {
        self.bindings.iter().map(|b| (b.name.clone(), b.term.sort())).collect()
    }
}

fn write_table<T: fmt::Display>(f: &mut fmt::Formatter<'_>, t: &BTreeMap<u64, T>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, (k, v)) in t.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{k}: {v}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for PointLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [n] = self.0[..] {
            return write!(f, "{n}");
        }
        let items: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", items.join(","))
    }
}

impl fmt::Display for FilterAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterAst::Frechet => write!(f, "frechet"),
            FilterAst::Principal(s) => write!(f, "principal({s})"),
            FilterAst::Prod(a, b) => write!(f, "prod({a}, {b})"),
            FilterAst::Fubini(a, fam) => write!(f, "fubini({a}, {fam})"),
            FilterAst::Limit(a, fam) => write!(f, "limit({a}, {fam})"),
            FilterAst::Meet(a, b) => write!(f, "meet({a}, {b})"),
            FilterAst::Katetov(n) => write!(f, "katetov({n})"),
            FilterAst::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for SetAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let points = |f: &mut fmt::Formatter<'_>, pts: &[PointLit]| {
            let items: Vec<String> = pts.iter().map(PointLit::to_string).collect();
            write!(f, "{{{}}}", items.join(","))
        };
        match self {
            SetAst::Fin(p) => {
                write!(f, "fin")?;
                points(f, p)
            }
            SetAst::Cofin(p) => {
                write!(f, "cofin")?;
                points(f, p)
            }
            SetAst::Sections(t, tail) => {
                write!(f, "sections(")?;
                write_table(f, t)?;
                write!(f, ", {tail})")
            }
            SetAst::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for FamilyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyAst::Table(t, tail) => {
                write!(f, "family(")?;
                write_table(f, t)?;
                write!(f, ", {tail})")
            }
            FamilyAst::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for SeqAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqAst::Const(r) => write!(f, "{r}"),
            SeqAst::Table(t, tail) => {
                write!(f, "seq(")?;
                write_table(f, t)?;
                write!(f, ", {tail})")
            }
            SeqAst::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Filter(x) => write!(f, "{x}"),
            Term::Set(x) => write!(f, "{x}"),
            Term::Family(x) => write!(f, "{x}"),
            Term::Seq(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bindings {
            writeln!(f, "let {} = {};", b.name, b.term)?;
        }
        if let Some(t) = &self.body {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn katetov_two() {
        let p = parse("katetov(2)").unwrap();
        assert_eq!(p.body, Some(Term::Filter(FilterAst::Katetov(2))));
    }

    #[test]
    fn trailing_comma_is_located() {
        let e = parse("fin{1,2,}").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
        assert!(e.message.contains("trailing comma"));
        let e = parse("let a = fin{1};\nprincipal(fin{(0,1),})").unwrap_err();
        assert_eq!((e.line, e.col), (2, 20));
    }

    #[test]
    fn names_resolve_with_sorts() {
        let p = parse("let a = cofin{0}; let f = principal(a); meet(f, frechet)").unwrap();
        assert_eq!(p.bindings.len(), 2);
        let e = parse("let a = cofin{0}; prod(a, frechet)").unwrap_err();
        assert_eq!(e.col, 24);
        assert!(e.message.contains("is a set"));
        let e = parse("principal(b)").unwrap_err();
        assert!(e.message.contains("unbound"));
    }

    #[test]
    fn rationals_and_sequences() {
        let p = parse("seq({0: -3/2}, 5)").unwrap();
        let Some(Term::Seq(SeqAst::Table(t, tail))) = &p.body else {
            panic!()
        };
        assert_eq!(t[&0], SeqAst::Const(Rational64::new(-3, 2)));
        assert_eq!(**tail, SeqAst::Const(Rational64::from_integer(5)));
        assert_eq!(parse("1/0").unwrap_err().col, 3);
    }

    #[test]
    fn duplicate_keys_rejected() {
        let e = parse("sections({0: fin{}, 0: cofin{}}, fin{})").unwrap_err();
        assert_eq!(e.col, 21);
    }

    #[test]
    fn printer_reparses() {
        let src = "let s = sections({0: fin{()}}, cofin{});\nfubini(frechet, family({1: principal(s)}, katetov(2)))";
        let p = parse(src).unwrap();
        assert_eq!(p.to_string(), src);
        assert_eq!(parse(&p.to_string()).unwrap(), p);
    }
}
