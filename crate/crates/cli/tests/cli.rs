use std::process::{Command, Output};

fn bmparab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmparab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, index: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(index).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn zeroth_moment_prints_one() {
    let out = bmparab(&["moment", "--c", "0.5", "--k", "0", "--side", "two"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "c,side,k,moment\n0.5,two,0,1.0\n");
}

#[test]
fn cdf_values_have_twelve_digits() {
    let out = bmparab(&["cdf", "--c", "0.5", "--x", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "c,side,x,cdf\n0.5,one,1.0,0.752924173251\n");
}

#[test]
fn two_sided_columns() {
    let out = bmparab(&["two-sided", "--x", "1.0"]);
    let text = stdout(&out);
    assert!(text.starts_with("c,x,cdf,pdf\n"));
    let cdf = column(&text, 2)[0];
    assert!((cdf - 0.7529241732513557f64.powi(2)).abs() < 1e-11);
}

#[test]
fn json_output_is_an_array_of_records() {
    let out = bmparab(&["pdf", "--grid", "0.5:1:0.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[1]["x"], 1.0);
    assert!((records[1]["pdf"].as_f64().unwrap() - 0.43791054094949877).abs() < 1e-11);
}

#[test]
fn quantile_round_trips() {
    let out = bmparab(&["quantile", "--p", "0.7529241732513557"]);
    let q = column(&stdout(&out), 3)[0];
    assert!((q - 1.0).abs() < 1e-6);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chernoff.csv");
    let to_file = bmparab(&["chernoff", "--x", "-1,0,1", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let direct = bmparab(&["chernoff", "--x", "-1,0,1"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&direct));
}

#[test]
fn same_invocation_same_bytes() {
    let args = ["mc-check", "--c", "1", "--paths", "400", "--step", "0.005", "--seed", "9", "--x", "0.5"];
    let a = bmparab(&args);
    let b = bmparab(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn mc_check_writes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let out = bmparab(&[
        "mc-check", "--paths", "300", "--step", "0.005", "--side", "one", "--x", "1",
        "--samples-out", path.to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("max,argmax\n"));
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["cdf", "--c", "-1", "--x", "1"],
        vec!["cdf", "--c", "0", "--x", "1"],
        vec!["cdf", "--x", "-0.5"],
        vec!["quantile", "--p", "1.5"],
        vec!["moment", "--k", "9"],
        vec!["pdf", "--grid", "1:0:0.1"],
        vec!["pdf"],
        vec!["figure", "--which", "5"],
        vec!["figure", "--which", "4", "--c", "2"],
        vec!["mc-check", "--paths", "100000000", "--step", "0.0001"],
        vec!["mc-check", "--step", "0.5"],
        vec!["cdf", "--x", "1", "--abs-tol", "-1"],
        vec!["frobnicate"],
    ] {
        let out = bmparab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn failing_mc_check_exits_one() {
    // A coarse plain grid maximum with many paths is visibly biased.
    let out = bmparab(&[
        "mc-check", "--paths", "20000", "--step", "0.01", "--side", "one", "--x", "0.5",
        "--no-bridge",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn figures_have_expected_headers() {
    for (which, header) in [("1", "x,cdf"), ("2", "x,pdf"), ("3", "x,pdf"), ("4", "x,density")] {
        let out = bmparab(&["figure", "--which", which, "--grid", "0:0.1:0.05"]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).lines().next(), Some(header));
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_bmparab"))
            .args(["figure", "--which", "4", "--grid", "-1:1:0.25"])
            .env("BMPARAB_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("1").stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
