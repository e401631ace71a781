//! Subcommands and their reports.
//!
//! Exit codes: 0 success (or a true membership verdict), 1 a false verdict, a
//! failed check, or an illegal game move, 2 usage, parse, or elaboration
//! errors, 3 an inconsistent rank derivation.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use filterlab::checks::{run_suite, CheckOptions, DEFAULT_TRUNC, SUITES};
use filterlab::constructions::{collapse_limit, collapse_pair, omega_times_frechet, z_family, IndexSet};
use filterlab::domain::DomainExpr;
use filterlab::filter::sequence::flim;
use filterlab::filter::witness::Diagonal;
use filterlab::filter::FilterExpr;
use filterlab::game::{self, player_one, player_two, GameError};
use filterlab::rank::{
    borel_class_bound, ct_bound, rank_bounds, render_report, ClassBound, CtBound, RankBounds, RankCertificate,
};
use filterlab::set::SetExpr;

use crate::dsl::{parse_in, parse_term, ParseError, Program, Scope, Sort, Term};
use crate::elab::Env;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

pub const TRUNC_VAR: &str = "FILTERLAB_TRUNC";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "filterlab",
    version,
    about = "Filters on structured countable sets: membership, rank bounds, games, constructions"
)]
pub struct Cli {
    /// Output style; `structured` prints `format=1` followed by `key=value` lines.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// File of `let` bindings visible to every expression argument.
    #[arg(long, global = true)]
    pub defs: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether set A belongs to filter F (exit 0 if it does, 1 if not).
    Member { filter: String, set: String },
    /// Certified rank bounds of F with the derivation.
    Rank { filter: String },
    /// The F-limit of a sequence, or `divergent`.
    Flim { seq: String, filter: String },
    /// Play the diagonalization game on F.
    Game {
        filter: String,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long = "pI", default_value = "full")]
        player_one: String,
        #[arg(long = "pII", default_value = "universal")]
        player_two: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build one of the bundled constructions.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Run a property suite, or `all` of them (exit 0 iff every check passes).
    Check {
        suite: String,
        #[arg(long)]
        trunc: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Two interleaved copies of N_alpha whose meet has rank 1.
    CollapsePair {
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// Stages of the interleaving to list.
        #[arg(long, default_value_t = 12)]
        stages: u64,
        /// Lines per side in the joint-count table.
        #[arg(long, default_value_t = 5)]
        lines: u64,
        #[arg(long)]
        trunc: Option<u64>,
    },
    /// The limit along BASE of the collapse pair split by an index set H.
    CollapseLimit {
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value = "frechet")]
        base: String,
        /// H as a set expression over ω; overrides --period/--residues.
        #[arg(long)]
        h: Option<String>,
        #[arg(long, default_value_t = 2)]
        period: u64,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        residues: Vec<u64>,
    },
    /// Lines Z_i of the family every N_gamma member misses infinitely often.
    Zfamily {
        #[arg(long, default_value_t = 2)]
        gamma: usize,
        #[arg(long, default_value_t = 5)]
        lines: u64,
        #[arg(long, default_value_t = 5)]
        per_line: u64,
    },
    /// {ω} × Fr on ω × ω: rank 1, countable type at most 2.
    #[command(name = "example-5-3")]
    OmegaTimesFrechet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Collected output: free text plus the structured key set.
#[derive(Default)]
struct Report {
    text: String,
    fields: Vec<(String, String)>,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn field(&mut self, k: impl Into<String>, v: impl ToString) {
        self.fields.push((k.into(), v.to_string()));
    }

    /// One field per line of `block`, keyed `prefix.0`, `prefix.1`, ...
    fn block(&mut self, prefix: &str, block: &str) {
        for (i, l) in block.lines().enumerate() {
            self.field(format!("{prefix}.{i}"), l);
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = format!("format={FORMAT_VERSION}\n");
                for (k, v) in &self.fields {
                    writeln!(s, "{k}={v}").unwrap();
                }
                s
            }
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

/// A parse error with the offending source line and a caret under the column.
fn describe_parse_error(what: &str, src: &str, e: &ParseError) -> String {
    let line = src.lines().nth(e.line - 1).unwrap_or("");
    format!("{what}:{e}\n  {line}\n  {}^", " ".repeat(e.col.saturating_sub(1)))
}

struct Session {
    scope: Scope,
    env: Env,
}

impl Session {
    fn new(defs: Option<&PathBuf>) -> Result<Self, Failure> {
        let mut env = Env::new();
        let mut scope = Scope::new();
        if let Some(path) = defs {
            let src = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let what = path.display().to_string();
            let p = parse_in(&src, &scope).map_err(|e| Failure::usage(describe_parse_error(&what, &src, &e)))?;
            if p.body.is_some() {
                return Err(Failure::usage(format!(
                    "{what}: a definitions file holds only `let` bindings"
                )));
            }
            env.extend(&p);
            scope = p.scope();
        }
        Ok(Session { scope, env })
    }

    fn parse(&mut self, what: &str, src: &str, sort: Sort) -> Result<Term, Failure> {
        let p: Program =
            parse_term(src, &self.scope, sort).map_err(|e| Failure::usage(describe_parse_error(what, src, &e)))?;
        self.env.extend(&p);
        Ok(p.body.expect("checked by parse_term"))
    }

    fn filter(&mut self, src: &str, expect: Option<&DomainExpr>) -> Result<FilterExpr, Failure> {
        let Term::Filter(f) = self.parse("F", src, Sort::Filter)? else {
            unreachable!()
        };
        self.env
            .filter(&f, expect)
            .map_err(|e| Failure::usage(format!("F: {e}")))
    }

    fn set(&mut self, src: &str, d: &DomainExpr) -> Result<SetExpr, Failure> {
        let Term::Set(s) = self.parse("A", src, Sort::Set)? else {
            unreachable!()
        };
        self.env.set(&s, d).map_err(|e| Failure::usage(format!("A: {e}")))
    }
}

fn trunc_from(flag: Option<u64>, env: Option<&str>) -> Result<u64, Failure> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match env {
        None => Ok(DEFAULT_TRUNC),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{TRUNC_VAR}={v} is not a natural number"))),
    }
}

/// Runs one invocation; `args` includes the program name. `trunc_env` is the
/// value of `FILTERLAB_TRUNC`, if set.
pub fn run_with<I, T>(args: I, trunc_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let msg = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), msg)
            } else {
                (msg, String::new())
            };
            return Outcome { code, stdout, stderr };
        }
    };
    let mut report = Report::default();
    match execute(&cli, trunc_env, &mut report) {
        Ok(code) => Outcome {
            code,
            stdout: report.render(cli.format),
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

/// [`run_with`] reading `FILTERLAB_TRUNC` from the environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(TRUNC_VAR).ok();
    run_with(args, env.as_deref())
}

fn execute(cli: &Cli, trunc_env: Option<&str>, r: &mut Report) -> Result<i32, Failure> {
    let mut s = Session::new(cli.defs.as_ref())?;
    match &cli.command {
        Command::Member { filter, set } => member(&mut s, filter, set, r),
        Command::Rank { filter } => rank(&mut s, filter, r),
        Command::Flim { seq, filter } => limit(&mut s, seq, filter, r),
        Command::Game {
            filter,
            rounds,
            player_one,
            player_two,
            seed,
        } => play(&mut s, filter, *rounds, player_one, player_two, *seed, r),
        Command::Construct { what } => construct(&mut s, what, trunc_env, r),
        Command::Check { suite, trunc } => check(suite, trunc_from(*trunc, trunc_env)?, r),
    }
}

fn member(s: &mut Session, filter: &str, set: &str, r: &mut Report) -> Result<i32, Failure> {
    let f = s.filter(filter, None)?;
    let d = f.domain().map_err(Failure::usage)?;
    let a = s.set(set, &d)?;
    let verdict = f.member(&a).map_err(Failure::usage)?;
    r.line(verdict.to_string());
    r.field("command", "member");
    r.field("filter", &f);
    r.field("domain", &d);
    r.field("set", &a);
    r.field("result", verdict);
    Ok(if verdict { EXIT_OK } else { EXIT_FALSE })
}

fn rank_fields(r: &mut Report, b: &RankBounds, cert: &RankCertificate) {
    r.field("bounds", b);
    r.field("lo", &b.lo);
    r.field("hi", &b.hi);
    r.field("exact", b.is_exact().is_some());
    let mut rules: Vec<&str> = cert.applications().map(|a| a.rule.name()).collect();
    rules.sort_unstable();
    rules.dedup();
    r.field("rules", rules.join(","));
    r.block("certificate", &cert.to_string());
}

fn rank(s: &mut Session, filter: &str, r: &mut Report) -> Result<i32, Failure> {
    let f = s.filter(filter, None)?;
    let inconsistent = |m: String| Failure {
        code: EXIT_INCONSISTENT,
        message: m,
    };
    let (b, cert) = rank_bounds(&f).map_err(|e| inconsistent(e.to_string()))?;
    let replayed = cert
        .replay()
        .map_err(|e| inconsistent(format!("certificate does not replay: {e}")))?;
    if replayed != b || !b.is_consistent() {
        return Err(inconsistent(format!(
            "derived {b} but the certificate replays to {replayed}"
        )));
    }
    let ct = ct_bound(&f);
    r.text.push_str(&render_report(&b, &cert, ct));
    let class = borel_class_bound(&f);
    if let ClassBound::Tag(c) = &class {
        r.line(format!("class in {c}"));
    }
    r.field("command", "rank");
    r.field("filter", &f);
    r.field("ct", ct);
    r.field("class", class);
    rank_fields(r, &b, &cert);
    Ok(EXIT_OK)
}

fn limit(s: &mut Session, seq: &str, filter: &str, r: &mut Report) -> Result<i32, Failure> {
    let f = s.filter(filter, None)?;
    let d = f.domain().map_err(Failure::usage)?;
    let Term::Seq(q) = s.parse("SEQ", seq, Sort::Seq)? else {
        unreachable!()
    };
    let spec = s
        .env
        .sequence(&q, &d)
        .map_err(|e| Failure::usage(format!("SEQ: {e}")))?;
    let v = flim(&spec, &f).map_err(Failure::usage)?;
    r.line(v.to_string());
    r.field("command", "flim");
    r.field("filter", &f);
    r.field("result", &v);
    Ok(EXIT_OK)
}

fn play(
    s: &mut Session,
    filter: &str,
    rounds: usize,
    one: &str,
    two: &str,
    seed: u64,
    r: &mut Report,
) -> Result<i32, Failure> {
    let f = s.filter(filter, None)?;
    let mut p1 = player_one(one, &f).map_err(Failure::usage)?;
    let mut p2 = player_two(two, &f).map_err(Failure::usage)?;
    let t = match game::play(&f, p1.as_mut(), p2.as_mut(), rounds, seed) {
        Ok(t) => t,
        Err(e @ GameError::IllegalMove { .. }) => {
            return Err(Failure {
                code: EXIT_FALSE,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(Failure::usage(e)),
    };
    let transcript = t.to_string();
    r.text.push_str(&transcript);
    r.line(format!(
        "I={} II={} seed={seed} rounds={rounds} union_in_dual={}",
        t.player_one, t.player_two, t.union_in_dual
    ));
    r.field("command", "game");
    r.field("filter", &f);
    r.field("player_one", &t.player_one);
    r.field("player_two", &t.player_two);
    r.field("seed", seed);
    r.field("rounds", rounds);
    r.field("union_size", t.union().len());
    r.field("union_in_dual", t.union_in_dual);
    r.block("round", &transcript);
    Ok(EXIT_OK)
}

fn construct(s: &mut Session, what: &Construct, trunc_env: Option<&str>, r: &mut Report) -> Result<i32, Failure> {
    match what {
        Construct::CollapsePair {
            alpha,
            stages,
            lines,
            trunc,
        } => {
            let bound = trunc_from(*trunc, trunc_env)?;
            let cp = collapse_pair(*alpha).map_err(Failure::usage)?;
            let (grid, table) = {
                let mut p = cp.interleaving.lock().expect("interleaving lock");
                (
                    p.grid(*stages).map_err(Failure::usage)?,
                    p.joint_table(*lines, bound).map_err(Failure::usage)?,
                )
            };
            r.line(format!("collapse pair on dom(N_{alpha})"));
            r.line("stage: pi_0 pi_1");
            r.text.push_str(&grid);
            r.line(format!(
                "joint counts below {bound} (row i: pi_0 in Z_i, column j: pi_1 in Z_j)"
            ));
            for (i, row) in table.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                r.line(format!("{i}: {}", cells.join(" ")));
                for (j, c) in row.iter().enumerate() {
                    r.field(format!("joint.{i}.{j}"), c);
                }
            }
            for g in [&cp.g0, &cp.g1, &cp.meet] {
                r.line(format!("{} bounds {}", g.label, g.bounds));
                r.field(format!("bounds.{}", g.label), &g.bounds);
            }
            r.field("command", "construct collapse-pair");
            r.field("alpha", alpha);
            r.field("trunc", bound);
            r.block("stage", &grid);
        }
        Construct::CollapseLimit {
            alpha,
            base,
            h,
            period,
            residues,
        } => {
            let nat = DomainExpr::Nat;
            let base = s.filter(base, Some(&nat))?;
            let h = match h {
                Some(src) => IndexSet::Symbolic(s.set(src, &nat)?),
                None => IndexSet::periodic(*period, residues.iter().copied()).map_err(Failure::usage)?,
            };
            let lim = collapse_limit(*alpha, base, h).map_err(Failure::usage)?;
            let (b, cert) = lim.filter.rank_bounds().map_err(Failure::usage)?;
            r.line(format!("base {} with bounds {}", lim.base, lim.base_bounds));
            r.line(format!("H = {}", lim.h));
            r.line(format!(
                "{} bounds {}, {} bounds {}",
                lim.g0.label, lim.g0.bounds, lim.g1.label, lim.g1.bounds
            ));
            r.text.push_str(&render_report(&b, &cert, CtBound::Unknown));
            r.field("command", "construct collapse-limit");
            r.field("alpha", alpha);
            r.field("base", &lim.base);
            r.field("base_bounds", &lim.base_bounds);
            r.field("h", &lim.h);
            rank_fields(r, &b, &cert);
        }
        Construct::Zfamily { gamma, lines, per_line } => {
            let z = z_family(*gamma).map_err(Failure::usage)?;
            let grid = z.grid(*lines, *per_line).map_err(Failure::usage)?;
            r.text.push_str(&grid);
            r.field("command", "construct zfamily");
            r.field("gamma", gamma);
            r.field("domain", z.domain());
            r.block("line", &grid);
        }
        Construct::OmegaTimesFrechet => {
            let ex = omega_times_frechet().map_err(Failure::usage)?;
            let diagonal = match &ex.diagonal {
                Diagonal::Yes(a) => a.to_string(),
                Diagonal::No => "no".into(),
                Diagonal::Unknown => "unknown".into(),
            };
            r.line(format!("filter {}", ex.filter));
            r.line(format!("limit form {}", ex.limit_form));
            r.line(format!("limit form agreement {}", ex.limit_form_agreement));
            r.line(format!(
                "quasi-homomorphism witness {}",
                if ex.witness_report.passed() {
                    "verified"
                } else {
                    "rejected"
                }
            ));
            r.line(format!("diagonal {diagonal}"));
            r.text.push_str(&render_report(&ex.bounds, &ex.certificate, ex.ct));
            r.field("command", "construct example-5-3");
            r.field("filter", &ex.filter);
            r.field("ct", ex.ct);
            r.field("witness_verified", ex.witness_report.passed());
            r.field("limit_form_agreement", ex.limit_form_agreement);
            r.field("diagonal", diagonal);
            rank_fields(r, &ex.bounds, &ex.certificate);
        }
    }
    Ok(EXIT_OK)
}

fn check(suite: &str, trunc: u64, r: &mut Report) -> Result<i32, Failure> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Failure::usage(format!(
            "unknown suite `{suite}`; expected `all` or one of {}",
            SUITES.join(", ")
        )));
    };
    let opts = CheckOptions { trunc };
    r.field("command", "check");
    r.field("trunc", trunc);
    let (mut passed, mut total) = (0, 0);
    for name in names {
        let report = run_suite(name, &opts).expect("listed suite");
        r.text.push_str(&report.to_string());
        for c in &report.checks {
            total += 1;
            passed += usize::from(c.passed);
            r.field(
                format!("check.{}/{}", report.suite, c.label),
                if c.passed { "pass" } else { "fail" },
            );
        }
    }
    r.line(format!("{passed}/{total} checks passed"));
    r.field("passed", passed);
    r.field("total", total);
    Ok(if passed == total { EXIT_OK } else { EXIT_FALSE })
}
