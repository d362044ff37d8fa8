use std::process::{Command, Output};

use serde_json::Value;

fn lscnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lscnorm"))
        .args(args)
        .env_remove("LSCNORM_FUEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

/// r_0 = y x x, r_{n+1} = y r_n r_n, written out independently of the library.
fn exploded(n: usize) -> String {
    let mut r = "y x x".to_string();
    for _ in 0..n {
        r = format!("y ({r}) ({r})");
    }
    r
}

fn tower(n: usize) -> String {
    let mut t = "y x x".to_string();
    for _ in 0..n {
        t = format!("(\\x. {t}) (y x x)");
    }
    t
}

#[test]
fn normalize_identity_application() {
    let o = lscnorm(&["normalize", "--strategy", "lsc-lou", "(\\x. x) y", "--unfold-result"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("final: x[x <- y]"), "{out}");
    assert!(out.contains("unfold: y"), "{out}");
    assert!(out.contains("steps: 1 (dB 1, ls 0)"), "{out}");

    let o = lscnorm(&["normalize", "(\\x. x) y", "--unfold-result", "--json"]);
    let v = json(&o);
    assert_eq!(v["final"], "x[x <- y]");
    assert_eq!(v["unfold"], "y");
    assert_eq!(
        (v["steps"].as_u64(), v["db_count"].as_u64(), v["ls_count"].as_u64()),
        (Some(1), Some(1), Some(0))
    );
}

#[test]
fn normalize_size_explosion_with_beta() {
    let o = lscnorm(&[
        "normalize",
        "--strategy",
        "lo-beta",
        "--family",
        "size-explosion:5",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["steps"], 5);
    assert_eq!(v["final_size"], 253);
    assert_eq!(v["final"], exploded(5));
}

#[test]
fn divergence_exhausts_fuel() {
    let omega = "(\\x. x x)(\\x. x x)";
    for strategy in ["lo-beta", "lsc-lo", "lsc-lou"] {
        let o = lscnorm(&["normalize", "--strategy", strategy, omega, "--fuel", "20"]);
        assert_eq!(o.status.code(), Some(2), "{strategy}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_lscnorm"))
        .args(["normalize", omega])
        .env("LSCNORM_FUEL", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("fuel exhausted after 7 steps"));
}

#[test]
fn parse_errors_exit_one() {
    for args in [&["normalize", "(\\x. "][..], &["analyze", ")"], &["equal", "x", "(y"]] {
        let o = lscnorm(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    }
}

#[test]
fn unfold_cap_exit_three() {
    let o = lscnorm(&[
        "normalize",
        "--family",
        "size-explosion:8",
        "--unfold-result",
        "--unfold-cap",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = lscnorm(&["normalize", "--family", "size-explosion:8", "--unfold-result", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["unfold"], exploded(8));
}

#[test]
fn family_members() {
    let o = lscnorm(&["family", "size-explosion", "0"]);
    assert_eq!(stdout(&o).trim(), "y x x");
    let o = lscnorm(&["family", "size-explosion", "1"]);
    assert_eq!(stdout(&o).trim(), "(\\x. y x x) (y x x)");
    let o = lscnorm(&["family", "size-explosion", "2", "--json"]);
    assert_eq!(json(&o)["size"], 19);
    let o = lscnorm(&["family", "blowup", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn equality_of_normal_forms() {
    let o = lscnorm(&["equal", "(\\x. x) y", "y"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "equal");

    let (t6, r6) = (tower(6), exploded(6));
    let o = lscnorm(&["equal", &t6, &r6]);
    assert_eq!(o.status.code(), Some(0));
    let o = lscnorm(&["equal", &t6, &exploded(5)]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout(&o).trim(), "different");

    let o = lscnorm(&["equal", "\\a. \\b. a", "\\b. \\a. b"]);
    assert_eq!(o.status.code(), Some(0));

    let o = lscnorm(&["equal", "(\\x. x x)(\\x. x x)", "y", "--fuel", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_whole_term_and_position() {
    let o = lscnorm(&["analyze", "(x x)[x <- \\y. y]", "--json"]);
    let v = json(&o);
    assert_eq!(v["nature"], "app");
    assert_eq!(v["has_redex"], true);

    let o = lscnorm(&["analyze", "(t x)[x <- z w][z <- \\y. y]", "--at", "[b]"]);
    let out = stdout(&o);
    assert!(out.contains("has_redex: true"), "{out}");
    assert!(out.contains("freevars: {t, w}"), "{out}");

    let o = lscnorm(&["analyze", "x y", "--at", "λ"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trace_json_matches_the_schema() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/trace.schema.json")).expect("schema parses");
    let schema = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    for (term, strategy) in [
        ("(\\x. x x)(\\y. y)", "lsc-lou"),
        ("(\\x. x x)(\\y. y)", "lsc-lo"),
        ("(\\f. \\a. f (f a)) (\\z. z) w", "lsc-lou"),
        ("(\\x. x x)(\\x. x x)", "lsc-lou"),
    ] {
        let o = lscnorm(&[
            "normalize",
            "--strategy",
            strategy,
            term,
            "--trace",
            "--json",
            "--fuel",
            "30",
        ]);
        let v = json(&o);
        let trace = &v["trace"];
        assert!(schema.is_valid(trace), "{term}: {trace}");
        assert_eq!(
            trace["steps"].as_array().unwrap().len(),
            v["steps"].as_u64().unwrap() as usize
        );
    }
    let bad = serde_json::json!({"initial": "x", "final": "x", "steps": [{"kind": "ls", "position": "ε", "size": 1, "es_count": 0}], "db_count": 0, "ls_count": 1, "exhausted": false});
    assert!(!schema.is_valid(&bad), "ls steps must carry the duplicated copy");
}

#[test]
fn verify_reports_every_check() {
    let o = lscnorm(&["normalize", "(\\x. x x)(\\y. y)", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for name in [
        "replay",
        "subterm",
        "no-size-explosion",
        "trace",
        "syntactic-bound",
        "nestedness",
        "quadratic",
        "shallow",
    ] {
        assert!(out.contains(&format!("{name}: pass")), "{name} in {out}");
    }
}

#[test]
fn check_is_reproducible() {
    let args = [
        "check",
        "projection",
        "--cases",
        "40",
        "--max-size",
        "30",
        "--seed",
        "7",
    ];
    let a = lscnorm(&args);
    let b = lscnorm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("result: PASS"));

    let o = lscnorm(&["check", "no-such-property"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_json_report() {
    let o = lscnorm(&["check", "compact-equal", "--cases", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["property"], "compact-equal");
    assert_eq!(v["passed"].as_u64().unwrap() + v["skipped"].as_u64().unwrap(), 20);
}
