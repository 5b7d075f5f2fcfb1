//! End-to-end tests of the binary: exit codes, verdicts, and report output.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use fibra::Report;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn fibra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibra"))
        .args(args)
        .env_remove("FIBRA_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_report(output: &Output) -> Report {
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON report")
}

#[test]
fn validate_rejects_shift_transitions() {
    let out = fibra(&["validate", &fixture("z5_cycle.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("U0"));
    assert!(text.contains("U1"));
    assert!(text.contains("homomorphism"));
}

#[test]
fn validate_accepts_automorphism_transitions() {
    let out = fibra(&["validate", &fixture("z5_cycle_mul2.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn holonomy_classifies_the_cycle() {
    let out = fibra(&["holonomy", &fixture("z5_cycle.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_report(&out);
    assert_eq!(report.verdict, "anholonomic");
    assert_eq!(report.payload["group_order"], 5);

    let out = fibra(&["holonomy", &fixture("z5_cycle_mul2.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    assert_eq!(report.verdict, "holonomic");
    assert_eq!(report.payload["group_order"], 4);
}

#[test]
fn holonomy_verdict_is_chart_independent() {
    for chart in ["U0", "U1", "U2"] {
        let out = fibra(&[
            "holonomy",
            &fixture("z5_cycle.json"),
            "--base-chart",
            chart,
            "--format",
            "json",
        ]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(stdout_report(&out).verdict, "anholonomic");
    }
}

#[test]
fn identity_transition_cycle_is_holonomic_with_trivial_group() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity_cycle.json");
    std::fs::write(
        &path,
        r#"{
            "signature": [{"name": "+", "arity": 2}],
            "fiber": {"size": 3, "tables": {"+": [[0,1,2],[1,2,0],[2,0,1]]}},
            "base": {"points": ["a", "b", "c"], "charts": [
                {"name": "U0", "points": ["a", "b"]},
                {"name": "U1", "points": ["b", "c"]},
                {"name": "U2", "points": ["c", "a"]}
            ]},
            "transitions": [
                {"from": "U0", "to": "U1", "map": [0, 1, 2]},
                {"from": "U1", "to": "U2", "map": [0, 1, 2]},
                {"from": "U2", "to": "U0", "map": [0, 1, 2]}
            ]
        }"#,
    )
    .unwrap();
    let out = fibra(&["holonomy", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    assert_eq!(report.verdict, "holonomic");
    assert_eq!(report.payload["group_order"], 1);
}

#[test]
fn unknown_base_chart_is_usage_error() {
    let out = fibra(&[
        "holonomy",
        &fixture("z5_cycle.json"),
        "--base-chart",
        "U9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orbits_of_left_regular_z3() {
    let out = fibra(&["orbits", &fixture("z3_left_regular.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    assert_eq!(report.payload["orbit_count"], 1);
    assert_eq!(report.payload["orbit_sizes"], serde_json::json!([9]));
    assert_eq!(report.payload["single_transitive"], true);
}

#[test]
fn coords_divide_pointwise() {
    let out = fibra(&[
        "coords",
        &fixture("z3_left_regular.json"),
        "--reference",
        "zero",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    assert_eq!(report.payload["coordinates"]["w"], serde_json::json!([1, 2]));
    assert_eq!(report.payload["coordinates"]["zero"], serde_json::json!([0, 0]));
}

#[test]
fn coords_requires_reference_flag() {
    let out = fibra(&["coords", &fixture("z3_left_regular.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coords_on_non_torsor_fails() {
    let out = fibra(&[
        "coords",
        &fixture("z4_mod2_shift.json"),
        "--reference",
        "zero",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn twin_of_abelian_regular_action_repeats_the_shift() {
    let out = fibra(&["twin", &fixture("z3_left_regular.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    // Z3 is abelian: the twin's tables equal the left shift's.
    assert_eq!(
        report.payload["action"]["p"]["1"],
        serde_json::json!([1, 2, 0])
    );
}

#[test]
fn kernel_sizes_match_the_fixtures() {
    let out = fibra(&["kernel", &fixture("z3_left_regular.json"), "--format", "json"]);
    let report = stdout_report(&out);
    assert_eq!(report.payload["kernel_size"], 1);
    assert_eq!(report.payload["effective"], true);

    let out = fibra(&["kernel", &fixture("z4_mod2_shift.json"), "--format", "json"]);
    let report = stdout_report(&out);
    assert_eq!(report.payload["kernel_size"], 4);
    assert_eq!(report.payload["effective"], false);
}

#[test]
fn missing_representation_block_is_usage_error() {
    let out = fibra(&["orbits", &fixture("z5_cycle.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("representation"));
}

#[test]
fn demo_runs_without_a_spec() {
    let out = fibra(&["demo"]);
    assert_eq!(out.status.code(), Some(0));

    let out = fibra(&["demo", "exp-shift", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    let defect = report.payload["one_parameter_defect"].as_f64().unwrap();
    assert!(defect <= 1e-9);

    let out = fibra(&["demo", "frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fibra(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fibra(&["validate"]).status.code(), Some(2));
    assert_eq!(fibra(&["validate", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn malformed_spec_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    let bad_json = dir.path().join("bad.json");
    writeln!(std::fs::File::create(&bad_json).unwrap(), "{{ not json").unwrap();
    let out = fibra(&["validate", bad_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let bad_ref = dir.path().join("bad_ref.json");
    std::fs::write(
        &bad_ref,
        r#"{
            "signature": [],
            "fiber": {"size": 2},
            "base": {"points": ["a"], "charts": [{"name": "U", "points": ["a"]}]},
            "transitions": [{"from": "U", "to": "V", "map": [0, 1]}]
        }"#,
    )
    .unwrap();
    let out = fibra(&["validate", bad_ref.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("V"));
}

#[test]
fn cap_override_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_fibra"))
        .args(["orbits", &fixture("z3_left_regular.json")])
        .env("FIBRA_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    let out = fibra(&["orbits", &fixture("z3_left_regular.json"), "--cap", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_round_trip_through_the_binary() {
    for args in [
        vec!["holonomy", &fixture("z5_cycle.json")],
        vec!["orbits", &fixture("z3_left_regular.json")],
        vec!["demo"],
    ] {
        let mut full = args.clone();
        full.extend(["--format", "json"]);
        let out = fibra(&full);
        let report = stdout_report(&out);
        let reparsed: Report = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(reparsed, report);
    }
}

#[test]
fn cli_verdicts_match_library_verdicts() {
    // The CLI must not recompute anything: its verdict on a fixture equals
    // the library's on the same parsed data.
    let doc = fibra::parse_spec_path(&PathBuf::from(fixture("z5_cycle.json"))).unwrap();
    let atlas = fibra_core::bundle::BundleAtlas::new(
        doc.base.clone(),
        doc.fiber.size(),
        doc.transitions.clone(),
    )
    .unwrap();
    let report =
        fibra_core::holonomy::classify_holonomic(&atlas, &doc.fiber, 0, &fibra_core::Caps::default())
            .unwrap();
    assert_eq!(report.verdict, fibra_core::holonomy::Verdict::Anholonomic);

    let out = fibra(&["holonomy", &fixture("z5_cycle.json"), "--format", "json"]);
    assert_eq!(stdout_report(&out).verdict, "anholonomic");
    assert_eq!(
        stdout_report(&out).payload["group_order"].as_u64().unwrap() as usize,
        report.group.elements.len()
    );
}
