//! End-to-end checks of the binary: output shapes, exit codes, and the
//! determinism contract of the data sections.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvchan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn data_of(out: &Output) -> Value {
    json_of(out)["data"].clone()
}

#[test]
fn classify_identity_channel() {
    let out = run(&["classify", "--t", "1,0,0,1", "--n", "0,0,0"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["class"], "B2(id)");
    assert_eq!(data["invariants"]["tau"], 1.0);
    assert_eq!(data["invariants"]["rank"], 0);
    assert_eq!(data["validity"]["complete_positivity"], true);
}

#[test]
fn classify_erasure_channel() {
    let out = run(&["classify", "--t", "0,0,0,0", "--n", "3,0,3"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["class"], "A1");
    assert_eq!(data["invariants"]["tau"], 0.0);
    assert_eq!(data["invariants"]["nbar"], 1.0);
}

#[test]
fn classify_negative_entries_parse() {
    let out = run(&["classify", "--t", "-1,0,0,-1", "--n", "0,0,0", "--d", "-1,2"]);
    assert!(out.status.success());
    // det T = 1 with zero noise: still the identity class.
    assert_eq!(data_of(&out)["class"], "B2(id)");
}

#[test]
fn classify_rejects_unphysical_noise() {
    let out = run(&["classify", "--t", "2,0,0,2", "--n", "0.1,0,0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json_of(&out);
    assert_eq!(doc["error"]["kind"], "invalid-channel");
}

#[test]
fn classify_rejects_malformed_matrix() {
    let out = run(&["classify", "--t", "1,0,0", "--n", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid-params");
}

#[test]
fn canonical_form_of_transmission_reversing_class() {
    let out = run(&["canonical-form", "--tau", "-1", "--rank", "2", "--nbar", "0"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["class"], "D");
    assert_eq!(data["regular"], true);
    assert_eq!(data["tc"][0][0], 1.0);
    assert_eq!(data["tc"][1][1], -1.0);
    assert_eq!(data["nc"][0][0], 2.0);
    assert_eq!(data["nc"][1][1], 2.0);
}

#[test]
fn canonical_form_rejects_invalid_invariants() {
    let out = run(&["canonical-form", "--tau", "0.5", "--rank", "1", "--nbar", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "invalid-invariants");
}

#[test]
fn dilation_of_balanced_attenuator() {
    let out = run(&["dilation", "--tau", "0.5", "--nbar", "1"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["class"], "C(att)");
    assert_eq!(data["purification"]["omega"], 3.0);
    assert_eq!(data["strongly_antidegradable"], true);
    assert_eq!(data["weakly_degradable"], true);
    let m = &data["interaction"];
    let root_half = 0.5_f64.sqrt();
    assert!((m[0][0].as_f64().unwrap() - root_half).abs() < 1e-12);
    assert!((m[0][2].as_f64().unwrap() - root_half).abs() < 1e-12);
    assert!((m[2][0].as_f64().unwrap() + root_half).abs() < 1e-12);
    assert_eq!(m[0][1], 0.0);
}

#[test]
fn dilation_rejects_fixed_points() {
    let out = run(&["dilation", "--tau", "1", "--nbar", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn keyrate_at_the_direct_reconciliation_threshold() {
    let out = run(&["keyrate", "--tau", "0.5", "--omega", "1"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["r_dr"], 0.0);
    assert_eq!(data["r_rr"], 0.5);
    assert_eq!(data["chi"], 1.0);
    assert_eq!(data["mu"], Value::Null);
    assert_eq!(data["i_ab"], Value::Null);
}

#[test]
fn keyrate_with_finite_modulation() {
    let out = run(&["keyrate", "--tau", "0.5", "--omega", "3", "--mu", "8"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["v_b"], 6.0);
    assert_eq!(data["epsilon"], 2.0);
    assert!(data["i_ab"].as_f64().unwrap() > 0.0);
}

#[test]
fn threshold_single_point_row() {
    let out = run(&["threshold", "--tau-min", "2", "--tau-max", "2", "--steps", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: "));
    assert_eq!(lines.next().unwrap(), "tau,eps_dr,eps_rr");
    assert_eq!(lines.next().unwrap(), "2,0.5,0");
}

#[test]
fn threshold_reverse_value_at_half() {
    let out = run(&["threshold", "--tau-min", "0.5", "--tau-max", "0.5", "--steps", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(2).unwrap();
    let eps_rr: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((eps_rr - (17.0_f64.sqrt() / 2.0 - 1.5)).abs() < 1e-12);
}

#[test]
fn threshold_grid_flags_the_singular_point() {
    let out = run(&["threshold", "--tau-min", "0.5", "--tau-max", "1.5", "--steps", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "1,excluded,excluded"));
}

#[test]
fn threshold_json_rows() {
    let out = run(&[
        "threshold",
        "--tau-min",
        "0.5",
        "--tau-max",
        "1.5",
        "--steps",
        "3",
        "--format",
        "json",
    ]);
    let rows = &data_of(&out)["rows"];
    assert_eq!(rows[0]["eps_dr"], 0.0);
    assert_eq!(rows[1]["excluded"], true);
    assert_eq!(rows[2]["eps_rr"], 0.0);
}

#[test]
fn threshold_svg_draws_two_curves() {
    let out = run(&[
        "threshold",
        "--tau-min",
        "0.1",
        "--tau-max",
        "0.9",
        "--steps",
        "9",
        "--format",
        "svg",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("<!-- manifest: "));
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(text.contains("stroke-width=\"1\""));
    assert!(text.contains("stroke-width=\"3\""));
}

#[test]
fn threshold_rejects_degenerate_ranges() {
    for args in [
        vec!["threshold", "--tau-min", "3", "--tau-max", "1", "--steps", "5"],
        vec!["threshold", "--tau-min", "1", "--tau-max", "2", "--steps", "0"],
        vec!["threshold", "--tau-min", "1", "--tau-max", "2", "--steps", "1"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn validate_single_point_passes_and_reruns_identically() {
    let args = [
        "validate", "--tau", "0.5", "--omega", "3", "--mu", "8", "--samples", "20000", "--seed",
        "7",
    ];
    let a = run(&args);
    assert!(a.status.success());
    let b = run(&args);
    let da = data_of(&a);
    let db = data_of(&b);
    assert_eq!(da["all_pass"], true);
    assert_eq!(da["rng_algorithm"], "ChaCha12");
    // Same parameters, byte-identical data section.
    assert_eq!(serde_json::to_string(&da).unwrap(), serde_json::to_string(&db).unwrap());
}

#[test]
fn validate_rejects_thin_runs() {
    let out = run(&["validate", "--tau", "0.5", "--omega", "3", "--mu", "8", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "insufficient-samples");
}

#[test]
fn validate_rejects_partial_point_specs() {
    let out = run(&["validate", "--tau", "0.5", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reads_a_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    std::fs::write(&path, r#"[{"tau": 0.5, "omega": 1.5, "mu": 4.0}]"#).unwrap();
    let out = run(&[
        "validate",
        "--grid-file",
        path.to_str().unwrap(),
        "--samples",
        "20000",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["runs"].as_array().unwrap().len(), 1);
    assert_eq!(data["all_pass"], true);
}

#[test]
fn cloner_equiv_reports_reciprocal_noises() {
    let out = run(&["cloner-equiv", "--tau", "0.5", "--omega", "3"]);
    assert!(out.status.success());
    let data = data_of(&out);
    assert_eq!(data["chi_b"], 3.0);
    assert!((data["chi_c"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((data["disturbance_product"].as_f64().unwrap() - 16.0 / 3.0).abs() < 1e-12);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "threshold",
        "--tau-min",
        "2",
        "--tau-max",
        "2",
        "--steps",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("2,0.5,0\n"));
}

#[test]
fn manifest_carries_command_and_version() {
    let out = run(&["keyrate", "--tau", "0.5", "--omega", "1"]);
    let doc = json_of(&out);
    assert_eq!(doc["manifest"]["command"], "keyrate");
    assert_eq!(doc["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["manifest"]["unix_time"].as_u64().unwrap() > 0);
}
