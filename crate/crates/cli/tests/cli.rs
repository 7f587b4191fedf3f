use std::io::Write;
use std::process::{Command, Output};

use cone_audit::report::ReportDocument;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cone-audit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cone-audit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn sample_exit_codes() {
    assert_eq!(code(&run(&["qp", "--sample", "orthant-qp"])), 0);
    assert_eq!(code(&run(&["cones", "--sample", "orthant-qp"])), 0);
    assert_eq!(code(&run(&["second-order", "--sample", "ex31-second-order"])), 1);
    assert_eq!(code(&run(&["theorem41", "--sample", "ex41-theorem41"])), 1);
    assert_eq!(code(&run(&["ssd", "--sample", "ex41-theorem41"])), 0);
}

#[test]
fn second_order_on_first_fixture_point() {
    let out = run(&["second-order", "--sample", "ex31-second-order", "--format", "json"]);
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    let cone_audit::report::Section::SecondOrder(t) = &doc.sections[0] else {
        panic!("expected a second-order section");
    };
    assert!(t.classical.holds());
    assert!(t.curvature.fails());
    assert_eq!(t.curvature.margin.as_ref().unwrap().to_f64(), -2.0);
}

#[test]
fn kink_reports_violated_hypothesis() {
    let out = run(&["theorem41", "--sample", "ex41-theorem41"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hypothesis violated"), "{text}");
    assert!(text.contains("margin -1"), "{text}");
}

#[test]
fn json_reports_round_trip_and_are_reproducible() {
    for (command, sample) in [
        ("qp", "orthant-qp"),
        ("cones", "orthant-qp"),
        ("first-order", "orthant-qp"),
        ("second-order", "ex31-second-order"),
        ("theorem41", "ex41-theorem41"),
        ("ssd", "ex41-theorem41"),
    ] {
        let a = run(&[command, "--sample", sample, "--format", "json"]);
        let b = run(&[command, "--sample", sample, "--format", "json"]);
        assert_eq!(a.stdout, b.stdout, "{command} is not reproducible");
        let text = String::from_utf8(a.stdout).unwrap();
        let doc: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&doc).unwrap(), text.trim_end());

        let path = write_temp(&format!("{command}-{sample}.json"), &text);
        let verified = run(&["verify", "--input", path.to_str().unwrap()]);
        assert_eq!(code(&verified), 0, "{}", String::from_utf8_lossy(&verified.stdout));
    }
}

#[test]
fn tampered_witness_is_caught() {
    let out = run(&["second-order", "--sample", "ex31-second-order", "--format", "json"]);
    let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let witness = &mut doc["sections"][0]["body"]["curvature"]["witness"]["vector"]["float"];
    *witness = serde_json::json!([0.0, 0.0]);
    let path = write_temp("tampered.json", &doc.to_string());
    let verified = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&verified), 1);
}

#[test]
fn schema_errors_are_listed_together() {
    let path = write_temp(
        "bad.json",
        r#"{ "version": 1,
             "objective": { "quadratic": { "m": [["1/0"]] } },
             "constraint": { "fixture": "nope" },
             "query": { "regime": "exact", "point": ["0"], "extra": 1 } }"#,
    );
    let out = run(&["first-order", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("invalid rational"), "{err}");
    assert!(err.contains("unknown fixture"), "{err}");
    assert!(err.contains("$.query.extra"), "{err}");
}

#[test]
fn command_mismatch_has_a_hint() {
    let out = run(&["qp", "--sample", "ex31-second-order"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("hint:"));
}

#[test]
fn analysis_errors_exit_above_two() {
    let text = cone_audit::sample("orthant-qp")
        .unwrap()
        .replace(r#""point": ["0", "0"]"#, r#""point": ["-1", "0"]"#);
    let path = write_temp("outside.json", &text);
    let out = run(&["qp", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn bad_arguments_exit_above_two() {
    assert_eq!(code(&run(&["qp"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&["ssd", "--sample", "ex41-theorem41", "--mesh", "1:2"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn flags_reach_the_configuration() {
    let out = run(&[
        "theorem41",
        "--sample",
        "ex41-theorem41",
        "--format",
        "json",
        "--tolerance",
        "1e-6",
        "--mesh",
        "2:6:1:3",
        "--depth",
        "5",
    ]);
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.config.tolerance, Some(1e-6));
    assert_eq!(doc.config.mesh.tail_steps().len(), 4);
    assert_eq!(doc.config.copositivity.depth_limit, 5);
}
