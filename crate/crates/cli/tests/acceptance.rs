//! The twelve acceptance criteria, each driven through the command-line front end.
//! Prints one `[PASS]`/`[FAIL]` line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use filterlab_cli::run_with;

fn fl(args: &[&str]) -> filterlab_cli::Outcome {
    run_with(std::iter::once("filterlab").chain(args.iter().copied()), None)
}

fn field<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

/// Exact bounds from `rank`, with the certificate replayed by the command itself.
fn rank_bounds(filter: &str) -> Result<String, String> {
    let o = fl(&["--format", "structured", "rank", filter]);
    if o.code != 0 {
        return Err(format!("rank {filter}: exit {} {}", o.code, o.stderr.trim()));
    }
    field(&o.stdout, "bounds")
        .map(str::to_string)
        .ok_or_else(|| format!("rank {filter}: no bounds"))
}

/// The `out=` bounds of a rule applied at the root node of a structured certificate.
fn root_rule_out(out: &str, rule: &str) -> Option<String> {
    let prefix = format!("  RULE {rule} ");
    out.lines()
        .filter(|l| l.starts_with("certificate."))
        .filter_map(|l| l.split_once('=').map(|(_, v)| v))
        .find(|v| v.starts_with(&prefix))
        .and_then(|v| v.rsplit_once("out=").map(|(_, b)| b.to_string()))
}

fn katetov_ranks() -> Result<String, String> {
    for n in 0..=4 {
        let b = rank_bounds(&format!("katetov({n})"))?;
        if b != format!("[{n},{n}]") {
            return Err(format!("katetov({n}) has bounds {b}"));
        }
    }
    Ok("katetov(0..=4) exact, certificates replay".into())
}

fn fubini_exact() -> Result<String, String> {
    for (tail, want) in [("katetov(2)", "[3,3]"), ("katetov(1)", "[2,2]")] {
        let b = rank_bounds(&format!("fubini(frechet, family({{}}, {tail}))"))?;
        if b != want {
            return Err(format!("tail {tail}: {b}, expected {want}"));
        }
    }
    Ok("fubini over N_2 is [3,3], over N_1 is [2,2]".into())
}

fn limit_bounds() -> Result<String, String> {
    let f = "limit(frechet, family({0: principal(cofin{})}, katetov(2)))";
    let o = fl(&["--format", "structured", "rank", f]);
    if o.code != 0 {
        return Err(o.stderr);
    }
    let generic = root_rule_out(&o.stdout, "RLimHi").ok_or("RLimHi not applied")?;
    let sharp = root_rule_out(&o.stdout, "RLimHi1").ok_or("RLimHi1 not applied")?;
    let hi = field(&o.stdout, "hi").unwrap_or("?");
    let msg = format!("RLimHi {generic}, RLimHi1 {sharp}, fixpoint hi {hi}");
    if generic == "[0,4]" && sharp == "[0,3]" && hi == "3" {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn suite(name: &'static str, trunc: Option<&'static str>) -> impl Fn() -> Result<String, String> {
    move || {
        let mut args = vec!["check", name];
        if let Some(t) = trunc {
            args.extend(["--trunc", t]);
        }
        let o = fl(&args);
        let summary = o.stdout.lines().last().unwrap_or("").to_string();
        if o.code == 0 {
            Ok(format!("suite {name}: {summary}"))
        } else {
            let failed: Vec<&str> = o.stdout.lines().filter(|l| l.starts_with("[FAIL]")).collect();
            Err(format!(
                "suite {name}: {summary} {}{}",
                failed.join("; "),
                o.stderr.trim()
            ))
        }
    }
}

type Criterion = (
    u32,
    &'static str,
    Option<Duration>,
    Box<dyn Fn() -> Result<String, String>>,
);

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<Criterion> = vec![
        (1, "Katetov ranks", secs(1), Box::new(katetov_ranks)),
        (2, "Fubini sums of rank alpha+1", secs(1), Box::new(fubini_exact)),
        (3, "limit upper bounds", None, Box::new(limit_bounds)),
        (4, "oracle soundness", secs(30), Box::new(suite("oracle", None))),
        (5, "Fubini sum as a limit", None, Box::new(suite("fubini-limit", None))),
        (6, "filter laws", None, Box::new(suite("filter-laws", None))),
        (7, "game suite", secs(10), Box::new(suite("games", None))),
        (8, "separator verdicts", None, Box::new(suite("separator", None))),
        (
            9,
            "interleaving shadows",
            secs(60),
            Box::new(suite("lemma43", Some("10000"))),
        ),
        (10, "collapse limit", None, Box::new(suite("thm44", None))),
        (
            11,
            "rank 1 with countable type 2",
            None,
            Box::new(suite("example53", None)),
        ),
        (12, "ordinal engine", None, Box::new(suite("ordinals", None))),
    ];
    let mut failures = 0;
    for (n, title, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {n} ({title}): {detail} [{took:.2?}]");
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
