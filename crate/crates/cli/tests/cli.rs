use std::process::{Command, Output};

fn ramsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsum"))
        .args(args)
        .env_remove("RAMSUM_SIEVE_LIMIT")
        .output()
        .expect("run ramsum")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[track_caller]
fn ok(args: &[&str]) -> String {
    let o = ramsum(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

#[track_caller]
fn exit_code(args: &[&str]) -> i32 {
    ramsum(args).status.code().unwrap()
}

#[test]
fn eval_values() {
    assert_eq!(
        ok(&["eval", "csum", "--k", "6", "--j", "3", "--s", "1"]),
        "-2\n"
    );
    assert_eq!(ok(&["eval", "jordan", "--n", "6", "--s", "2"]), "24\n");
    assert_eq!(ok(&["eval", "bernoulli", "--m", "1"]), "-1/2\n");
    assert_eq!(ok(&["eval", "bernoulli", "--m", "12"]), "-691/2730\n");
    assert_eq!(
        ok(&["eval", "gengcd", "--j", "72", "--k", "12", "--s", "2"]),
        "6\n"
    );
    assert_eq!(ok(&["eval", "theta", "--k", "4", "--n", "2"]), "0\n");
    assert_eq!(
        ok(&["eval", "theta", "--k", "2", "--n", "1", "--s", "2"]),
        "1\n"
    );
}

#[test]
fn eval_methods_agree() {
    for method in ["direct", "moebius", "hoelder"] {
        assert_eq!(
            ok(&["eval", "csum", "--k", "2", "--j", "-4", "--s", "2", "--method", method]),
            "3\n"
        );
        assert_eq!(
            ok(&["eval", "csum", "--k", "12", "--j", "8", "--method", method]),
            "-2\n"
        );
    }
}

#[test]
fn table_formats() {
    assert_eq!(
        ok(&["table", "--k", "2", "--s", "1", "--format", "csv"]),
        "j,c\n0,1\n1,-1\n"
    );
    assert_eq!(ok(&["table", "--k", "1", "--s", "2"]), "j,c\n0,1\n");
    assert_eq!(
        ok(&["table", "--k", "4", "--s", "1", "--format", "json"]),
        "[2,0,-2,0]\n"
    );
    let a = ok(&["table", "--k", "30", "--s", "2"]);
    assert_eq!(a, ok(&["table", "--k", "30", "--s", "2"]));
    assert_eq!(a.lines().count(), 901);
}

#[test]
fn verify_success() {
    let out = ok(&[
        "verify", "alkan", "--k-max", "50", "--s", "1", "--r-max", "4",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["pass"], 200);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["results"].as_array().unwrap().len(), 200);

    let out = ok(&[
        "verify",
        "mu-log-lemma",
        "--k-max",
        "300",
        "--s-max",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.lines().count(), 1201);
    assert!(out
        .lines()
        .skip(1)
        .all(|l| l.contains(",exact,true,verified,")));

    let out = ok(&[
        "verify",
        "gauss-product",
        "--n-max",
        "10",
        "--format",
        "human",
    ]);
    assert!(out.contains("pass=10 fail=0 findings=0 skipped=0"));
}

#[test]
fn findings_are_non_fatal_unless_strict() {
    let args = ["verify", "log-weight", "--k-max", "10", "--s", "2"];
    let out = ok(&args);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["summary"]["findings"].as_u64().unwrap() > 0);
    let mut strict = args.to_vec();
    strict.push("--strict-findings");
    assert_eq!(exit_code(&strict), 2);
}

#[test]
fn hard_failure_exits_two() {
    // floating checks cannot land within a tolerance this small
    let o = ramsum(&[
        "verify",
        "gamma-weight",
        "--k-max",
        "12",
        "--tolerance",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["summary"]["fail"].as_u64().unwrap() > 0);
    assert_eq!(exit_code(&["verify", "all", "--tolerance", "1e-300"]), 2);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["verify", "nonsense"][..],
        &["bogus"],
        &["eval", "csum", "--k", "6"],
        &["eval", "csum", "--k", "6", "--j", "1", "--method", "fft"],
        &["table", "--k", "2", "--format", "xml"],
        &["verify", "alkan", "--k-min", "9", "--k-max", "3"],
        &["verify", "alkan", "--s", "0"],
        &["verify", "alkan", "--s", "1", "--s-max", "2"],
        &["verify", "alkan", "--jobs", "0"],
        &["verify", "gamma-weight", "--tolerance", "-1"],
    ] {
        let o = ramsum(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
}

#[test]
fn domain_and_resource_errors_exit_one() {
    let o = ramsum(&[
        "eval", "csum", "--k", "1000", "--j", "1", "--s", "3", "--method", "direct",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds cap"));
    assert_eq!(exit_code(&["table", "--k", "100", "--s", "4"]), 1);
    assert_eq!(
        exit_code(&["table", "--k", "10", "--s", "2", "--cap", "99"]),
        1
    );
    assert_eq!(exit_code(&["eval", "jordan", "--n", "0"]), 1);
    assert_eq!(exit_code(&["eval", "csum", "--k", "0", "--j", "1"]), 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert!(ok(&["--help"]).contains("verify"));
    assert!(ok(&["verify", "--help"]).contains("--strict-findings"));
    assert!(ok(&["--version"]).starts_with("ramsum "));
}

#[test]
fn sieve_limit_does_not_change_values() {
    let big = ok(&["eval", "csum", "--k", "9240", "--j", "30"]);
    let small = ok(&[
        "--sieve-limit",
        "100",
        "eval",
        "csum",
        "--k",
        "9240",
        "--j",
        "30",
    ]);
    assert_eq!(big, small);
    let o = Command::new(env!("CARGO_BIN_EXE_ramsum"))
        .args(["verify", "mu-log-lemma", "--k-max", "40"])
        .env("RAMSUM_SIEVE_LIMIT", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), ok(&["verify", "mu-log-lemma", "--k-max", "40"]));
}

#[test]
fn jobs_do_not_change_report_bytes() {
    for format in ["json", "csv", "human"] {
        let a = ok(&["verify", "all", "--jobs", "1", "--format", format]);
        let b = ok(&["verify", "all", "--jobs", "4", "--format", format]);
        assert_eq!(a, b, "{format}");
    }
}
