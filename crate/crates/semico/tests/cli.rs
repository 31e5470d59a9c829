use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semico"))
        .args(args)
        .env_remove("SEMICO_THREADS")
        .output()
        .expect("binary runs")
}

#[test]
fn cohomology_table_for_cyclic_module() {
    let out = run(&["cohomology", "--input", &fixture("c2_z2.json"), "--n", "0..2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for n in 0..=2 {
        assert!(text.contains(&format!("n={n}:")), "missing row {n} in:\n{text}");
    }
    // both class monoids are Z/2 in every degree
    assert_eq!(text.matches("Z/2").count(), 6, "{text}");
}

#[test]
fn classify_counts_match_expected_output() {
    let out = run(&["extensions", "classify", "--input", &fixture("c2_bool.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("congruence classes: 2; similarity classes: 1"), "{text}");
}

#[test]
fn json_output_is_deterministic() {
    let args = [
        "extensions", "classify", "--input", &fixture("c2_bool.json"), "--format", "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same invocation must print identical bytes");
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn completion_of_structured_carrier() {
    let out = run(&["completion", "--input", &fixture("d3.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Z x Z/3"), "{text}");
}

#[test]
fn budget_overflow_exits_2() {
    let out = run(&[
        "cohomology", "--input", &fixture("c2_z2.json"), "--n", "3", "--budget", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn malformed_input_exits_1() {
    let out = run(&["validate", "--input", &fixture("does_not_exist.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_thread_env_exits_1() {
    let out = Command::new(env!("CARGO_BIN_EXE_semico"))
        .args(["validate", "--input", &fixture("d3.json")])
        .env("SEMICO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn separating_family_report() {
    let out = run(&["cyclic", "--example-310", "--m", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Z/2"), "{text}");
}
