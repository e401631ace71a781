use std::process::Command;

use filterlab_cli::run::{EXIT_FALSE, EXIT_OK, EXIT_USAGE};
use filterlab_cli::{run_with, Outcome};

fn fl(args: &[&str]) -> Outcome {
    run_with(std::iter::once("filterlab").chain(args.iter().copied()), None)
}

#[test]
fn rank_of_katetov_three() {
    let o = fl(&["rank", "katetov(3)"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("bounds [3,3]\n"));
    assert!(o.stdout.lines().any(|l| l.trim_start().starts_with("RULE RKat")));
}

#[test]
fn member_exit_codes() {
    let yes = fl(&["member", "frechet", "cofin{0}"]);
    assert_eq!((yes.code, yes.stdout.as_str()), (EXIT_OK, "true\n"));
    let no = fl(&["member", "frechet", "fin{0}"]);
    assert_eq!((no.code, no.stdout.as_str()), (EXIT_FALSE, "false\n"));
    let n2 = fl(&["member", "katetov(2)", "sections({0: fin{}}, cofin{})"]);
    assert_eq!(n2.code, EXIT_OK);
    let meet = fl(&["member", "meet(principal(fin{2}), frechet)", "cofin{2}"]);
    assert_eq!(meet.code, EXIT_FALSE);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let o = fl(&["member", "frechet", "fin{1,2,}"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("A:1:8: trailing comma"), "{}", o.stderr);
    let caret = o.stderr.lines().last().unwrap();
    assert_eq!(caret.find('^'), Some(2 + 7));
}

#[test]
fn elaboration_errors_exit_two() {
    let shape = fl(&["member", "katetov(2)", "fin{(1,2,3)}"]);
    assert_eq!(shape.code, EXIT_USAGE);
    assert!(shape.stderr.contains("does not fit"), "{}", shape.stderr);
    let level = fl(&["rank", "katetov(99)"]);
    assert_eq!(level.code, EXIT_USAGE);
    let sorts = fl(&["rank", "fin{1}"]);
    assert_eq!(sorts.code, EXIT_USAGE);
    assert!(sorts.stderr.contains("expected a filter"));
    assert_eq!(fl(&["bogus"]).code, EXIT_USAGE);
    assert_eq!(fl(&["check", "nope"]).code, EXIT_USAGE);
}

#[test]
fn bindings_inside_arguments() {
    let o = fl(&[
        "member",
        "let k = katetov(1); let f = fubini(frechet, family({}, k)); f",
        "let t = cofin{}; sections({}, t)",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
}

#[test]
fn definitions_file() {
    let dir = std::env::temp_dir().join(format!("filterlab-defs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("defs.fl");
    std::fs::write(
        &path,
        "let n2 = katetov(2);\nlet col = sections({0: cofin{}}, fin{});\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = fl(&["--defs", p, "member", "n2", "col"]);
    assert_eq!(o.code, EXIT_FALSE, "{}", o.stderr);
    let o = fl(&["--defs", p, "member", "prod(principal(fin{0}), frechet)", "col"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    std::fs::write(&path, "frechet").unwrap();
    assert_eq!(fl(&["--defs", p, "rank", "frechet"]).code, EXIT_USAGE);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fubini_and_limit_ranks() {
    let o = fl(&["rank", "fubini(frechet, family({}, katetov(2)))"]);
    assert!(o.stdout.starts_with("bounds [3,3]\n"));
    let o = fl(&["rank", "fubini(frechet, family({}, katetov(1)))"]);
    assert!(o.stdout.starts_with("bounds [2,2]\n"));
    let o = fl(&[
        "--format",
        "structured",
        "rank",
        "limit(frechet, family({0: principal(cofin{})}, katetov(2)))",
    ]);
    assert!(o.stdout.starts_with("format=1\n"));
    assert!(o.stdout.contains("\nhi=3\n"), "{}", o.stdout);
    assert!(o
        .stdout
        .lines()
        .any(|l| l.starts_with("rules=") && l.contains("RLimHi1")));
}

#[test]
fn flim_values() {
    let o = fl(&["flim", "seq({0: 3}, 5)", "katetov(2)"]);
    assert_eq!(o.stdout, "5\n");
    let o = fl(&["flim", "seq({0: 2}, 1)", "principal(fin{0,1})"]);
    assert_eq!(o.stdout, "divergent\n");
    let o = fl(&["flim", "seq({0: -1/2}, 7)", "principal(fin{0})"]);
    assert_eq!(o.stdout, "-1/2\n");
}

#[test]
fn game_transcript_is_reproducible() {
    let args = [
        "game",
        "prod(frechet, frechet)",
        "--rounds",
        "8",
        "--pI",
        "copy",
        "--pII",
        "random",
        "--seed",
        "5",
    ];
    let a = fl(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a, fl(&args));
    assert_eq!(a.stdout.lines().count(), 9);
    let o = fl(&[
        "game",
        "frechet",
        "--rounds",
        "10",
        "--pI",
        "avoid",
        "--pII",
        "universal",
    ]);
    assert!(o.stdout.lines().nth(9).unwrap().ends_with("|U|=10"), "{}", o.stdout);
    assert_eq!(fl(&["game", "frechet", "--pI", "nobody"]).code, EXIT_USAGE);
}

#[test]
fn structured_member() {
    let o = fl(&["--format", "structured", "member", "frechet", "cofin{0}"]);
    assert_eq!(
        o.stdout,
        "format=1\ncommand=member\nfilter=frechet\ndomain=w\nset=cofin{0}\nresult=true\n"
    );
}

#[test]
fn constructions() {
    let z = fl(&[
        "construct",
        "zfamily",
        "--gamma",
        "2",
        "--lines",
        "3",
        "--per-line",
        "3",
    ]);
    assert_eq!(
        z.stdout,
        "Z_0: (0,0) (0,1) (0,2)\nZ_1: (1,0) (1,1) (1,2)\nZ_2: (2,0) (2,1) (2,2)\n"
    );
    let cp = fl(&[
        "--format",
        "structured",
        "construct",
        "collapse-pair",
        "--trunc",
        "2000",
    ]);
    assert_eq!(cp.code, EXIT_OK, "{}", cp.stderr);
    for i in 0..5 {
        for j in 0..5 {
            let key = format!("joint.{i}.{j}=");
            let v: u64 = cp
                .stdout
                .lines()
                .find_map(|l| l.strip_prefix(&key))
                .unwrap()
                .parse()
                .unwrap();
            assert!(v > 0, "{key}");
        }
    }
    let lim = fl(&["construct", "collapse-limit", "--alpha", "2"]);
    assert!(lim.stdout.contains("bounds [1,1]"), "{}", lim.stdout);
    assert!(lim.stdout.contains("RCert"));
    let bad = fl(&[
        "construct",
        "collapse-limit",
        "--base",
        "principal(fin{0})",
        "--h",
        "fin{0,2}",
    ]);
    assert_eq!(bad.code, EXIT_USAGE);
    let ex = fl(&["construct", "example-5-3"]);
    assert!(
        ex.stdout.contains("bounds [1,1]") && ex.stdout.contains("ct <= 2"),
        "{}",
        ex.stdout
    );
}

#[test]
fn check_suites_report() {
    let o = fl(&["check", "ordinals"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(o
        .stdout
        .lines()
        .all(|l| l.starts_with("[PASS]") || l.ends_with("checks passed")));
    let s = run_with(
        ["filterlab", "--format", "structured", "check", "lemma43"],
        Some("1000"),
    );
    assert!(s.stdout.contains("\ntrunc=1000\n"), "{}", s.stdout);
    let bad = run_with(["filterlab", "check", "lemma43"], Some("lots"));
    assert_eq!(bad.code, EXIT_USAGE);
}

#[test]
fn binary_end_to_end() {
    let bin = env!("CARGO_BIN_EXE_filterlab");
    let out = Command::new(bin)
        .args(["member", "frechet", "cofin{0}"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "true\n");
    let out = Command::new(bin)
        .args(["member", "frechet", "fin{1,2,}"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .args(["check", "lemma43", "--trunc", "10000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = Command::new(bin).args(["rank", "katetov(4)"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("bounds [4,4]"));
}
