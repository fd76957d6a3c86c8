use std::fs;
use std::process::{Command, Output};

use ramify_core::ExtensionReport;

fn ramify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramify")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(args: &[&str]) -> (ExtensionReport, i32) {
    let o = ramify(args);
    (serde_json::from_str(stdout(&o).trim()).unwrap(), o.status.code().unwrap())
}

#[test]
fn fierce_example_for_p2() {
    let (r, code) = report(&["analyze", "-p", "2", "pi^-2 * t", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(r.kind.to_string(), "Fierce");
    assert_eq!(r.break_a.to_string(), "i:1");
    assert!(r.certified);
}

#[test]
fn root_adjunction_example() {
    let (r, _) = report(&["analyze", "-p", "2", "pi^-1 * t^2", "--json"]);
    assert_eq!(r.break_a.to_string(), "i:1/4");
    assert_eq!(r.adjoined_root_exponent, 2);
}

#[test]
fn integral_and_unit_inputs_are_unramified_level() {
    let (t, code) = report(&["analyze", "-p", "3", "t", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(t.break_a.to_string(), "-1");
    let (u, _) = report(&["analyze", "-p", "3", "t^-1", "--json"]);
    assert_eq!(u.kind.to_string(), "Unramified");
    assert_eq!(u.break_a.to_string(), "-1");
}

#[test]
fn table_output_lists_the_trace() {
    let o = ramify(&["analyze", "-p", "2", "pi^-1 * t^2"]);
    let s = stdout(&o);
    assert!(s.contains("kind      = Fierce"));
    assert!(s.contains("adjoin pi^(1/2)"));
}

#[test]
fn mixed_input_exits_uncertified() {
    let o = ramify(&["analyze", "-p", "3", "pi^-1 + pi^-6*t"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_input_exits_with_error_on_stderr() {
    let o = ramify(&["analyze", "-p", "3", "pi^^2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    assert_eq!(ramify(&["analyze", "-p", "4", "t"]).status.code(), Some(1));
    assert_eq!(ramify(&["analyze", "--prec-pi", "0", "t"]).status.code(), Some(1));
}

#[test]
fn caps_are_accepted() {
    let o = ramify(&["analyze", "-p", "3", "--prec-t", "80", "--prec-pi", "20", "--adjunction-cap", "4", "pi^-3*t"]);
    assert_eq!(o.status.code(), Some(0));
    let capped = ramify(&["analyze", "-p", "2", "--adjunction-cap", "1", "pi^-1*t^2"]);
    assert_eq!(capped.status.code(), Some(1));
}

#[test]
fn batch_writes_one_json_object_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let out = dir.path().join("out.jsonl");
    fs::write(&input, "# examples\npi^-1\n\npi^-3*t\npi^-1*t\n").unwrap();
    let o = ramify(&[
        "analyze",
        "-p",
        "3",
        "--json",
        "--batch",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let breaks: Vec<String> = text
        .lines()
        .map(|l| serde_json::from_str::<ExtensionReport>(l).unwrap().break_a.to_string())
        .collect();
    assert_eq!(breaks, ["c:1", "i:1", "i:1/3"]);
}

#[test]
fn json_report_round_trips() {
    let o = ramify(&["analyze", "-p", "5", "pi^-7*t^2 + pi^-3", "--json"]);
    let text = stdout(&o);
    let r: ExtensionReport = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), text.trim());
}

#[test]
fn herbrand_one_jump_segments() {
    let s = stdout(&ramify(&["herbrand", "--jump", "i:1,order=2"]));
    assert!(s.contains("(0, 1]  slope 2"));
    assert!(s.contains("(1, inf]  slope 1"));
    assert!(s.contains("Phi(i:1) = i:2"));
}

#[test]
fn herbrand_json_round_trips() {
    let o = ramify(&["herbrand", "--jump", "i:1,order=4;i:3,order=2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let phi: ramify_core::herbrand::HerbrandJson = serde_json::from_value(v["phi"].clone()).unwrap();
    let f = ramify_core::HerbrandFn::from_json(&phi).unwrap();
    assert_eq!(f.to_json(), phi);
    assert_eq!(phi.i_branch.iter().map(|s| s.slope.as_str()).collect::<Vec<_>>(), ["4", "2", "1"]);
}

#[test]
fn tower_single_fierce_step() {
    let o = ramify(&["tower", "--steps", "fierce:p=2,h=(0,1)", "--alpha", "(0,1)", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["target"], "(0,2)");
    assert_eq!(v["index_exponent"], 1);
    let table = stdout(&ramify(&["tower", "--steps", "fierce:p=2,h=(0,1)", "--alpha", "(0,1)"]));
    assert!(table.contains("index 2^1"));
    assert!(table.contains("cross-check: PASS"));
}

#[test]
fn tower_rejects_malformed_steps() {
    let o = ramify(&["tower", "--steps", "fierce:p=4,h=(0,1)", "--alpha", "(0,1)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn group_quotient_check_passes() {
    for p in ["2", "3"] {
        let o = ramify(&["group", "-p", p, "--cyclic", "p^2", "--jumps", "i:1=G;i:3=pG", "--quotient", "pG"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("(G/H)^alpha = G^alpha H/H: PASS"));
    }
    let o = ramify(&["group", "--cyclic", "p^2,p", "--jumps", "c:1=G;i:2=pG", "--quotient", "pG", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["quotient_check"], true);
    assert_eq!(v["group"]["cyclic_factors"], serde_json::json!([4, 2]));
}
