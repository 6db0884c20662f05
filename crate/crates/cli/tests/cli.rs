use std::process::{Command, Output};

use serde_json::Value;

fn cvtx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtx"))
        .args(args)
        .env("CVTX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let v: Value = serde_json::from_str(&stdout(&cvtx(args))).unwrap();
    assert_eq!(v["format_version"], "1");
    assert!(v["timestamp"].is_u64());
    v
}

/// The report minus its timestamp.
fn stable(args: &[&str]) -> String {
    let mut v = json(args);
    v.as_object_mut().unwrap().remove("timestamp");
    v.to_string()
}

#[test]
fn transform_ternary_text_golden() {
    let out = stdout(&cvtx(&["--format", "text", "transform", "17", "8", "11", "8", "4", "8", "--base", "3"]));
    let want = "\
# cvtx report v1 :: --format text transform 17 8 11 8 4 8 --base 3
x1 17 3:122
x2 8 3:22
x3 11 3:102
x4 8 3:22
x5 4 3:11
x6 8 3:22
cvt 36 3:[0,3,3,0]
xor 20 3:202
identity 56=36+20
";
    assert_eq!(out, want);
}

#[test]
fn transform_binary_pair_json() {
    let v = json(&["transform", "11", "13"]);
    let p = &v["payload"];
    assert_eq!(p["cvt"]["value"], "18");
    assert_eq!(p["cvt"]["digits"], "2:10010");
    assert_eq!(p["xor"]["value"], "6");
    assert_eq!(p["identity"]["lhs"], "24");
}

#[test]
fn ivt_rule_tables() {
    for (rule, want) in [("5", "12"), ("16", "25")] {
        let v = json(&["transform", "14", "--base", "3", "--op", "ivt", "--rule", rule]);
        assert_eq!(v["payload"]["ivt"]["value"], want, "rule {rule}: {v}");
    }
}

#[test]
fn add_trace_golden() {
    let out = stdout(&cvtx(&["--format", "text", "add", "11", "13", "--trace"]));
    let want = "\
# cvtx report v1 :: --format text add 11 13 --trace
result 24
reduced cvt=18 xor=6
iterations 4
step 1 cvt=18 xor=6
step 2 cvt=4 xor=20
step 3 cvt=8 xor=16
step 4 cvt=0 xor=24
";
    assert_eq!(out, want);
}

#[test]
fn add_many_operands() {
    let v = json(&["add", "5", "4", "6", "7", "13", "9", "9", "13"]);
    assert_eq!(v["payload"]["result"], "66");
}

#[test]
fn props_exhaustive_base_three_finds_the_copy_rule_failure() {
    let v = json(&["props", "--base", "3", "--properties", "P1", "--trials", "exhaustive", "--width", "2", "--k", "2"]);
    let text = v["payload"].to_string();
    assert!(text.contains("\"claimed\":\"4\""), "{text}");
    assert!(text.contains("\"actual\":\"3\""), "{text}");
}

#[test]
fn props_explicit_concat_counterexample() {
    let out = stdout(&cvtx(&["--format", "text", "props", "--properties", "P3", "--xs", "1,0", "--ys", "1,0"]));
    assert!(out.contains("cex xs=[1,0] ys=[1,0]: claimed 0 actual 2"), "{out}");
}

#[test]
fn cam_pair() {
    let out = stdout(&cvtx(&["--format", "text", "cam", "--k", "2", "--n", "4", "11", "13"]));
    assert!(out.contains("result 24\n"));
    assert!(out.contains("measured_delay 4\n"));
}

#[test]
fn cam_random_tree() {
    let v = json(&["cam", "--k", "16", "--n", "4", "--random", "--seed", "7"]);
    let sim = &v["payload"]["simulation"];
    assert_eq!(sim["paper_model_delay"], 16);
    assert_eq!(sim["cam_count"], 15);
    let inputs: u64 = sim["inputs"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(sim["result"], inputs.to_string());
}

#[test]
fn equal_seeds_give_identical_reports() {
    let props = ["props", "--base", "3", "--trials", "2000", "--seed", "11"];
    assert_eq!(stable(&props), stable(&props));
    let cam = ["cam", "--k", "8", "--n", "5", "--random", "--seed", "3", "--trace"];
    assert_eq!(stable(&cam), stable(&cam));
    let text = ["--format", "text", "props", "--trials", "500", "--seed", "4"];
    assert_eq!(stdout(&cvtx(&text)), stdout(&cvtx(&text)));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["add", "2:101", "3:12"],
        &["add", "12x"],
        &["transform", "5", "--base", "1"],
        &["cam", "--k", "3", "--n", "4", "1", "2", "3"],
        &["cam", "--k", "2", "--n", "2", "9", "1"],
        &["props", "--properties", "P9"],
        &["props", "--trials", "many"],
        &["bogus"],
    ];
    for args in cases {
        let out = cvtx(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn bad_thread_cap_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cvtx"))
        .args(["add", "1", "2"])
        .env("CVTX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
