use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn gqm() -> Command {
    Command::cargo_bin("gqm").unwrap()
}

fn stdout_json(cmd: &mut Command) -> Value {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cl_finite_rotation_is_one() {
    let report = stdout_json(gqm().args(["--ctx", "d4-rotation", "cl", "r r"]));
    let res = &report["results"][0];
    assert_eq!(res["kind"], "exact");
    assert_eq!(res["value"], 1);
    assert_eq!(report["certificates"]["witness"].as_array().unwrap().len(), 1);
}

#[test]
fn cl_identity_is_zero() {
    let report = stdout_json(gqm().args(["--ctx", "d4-rotation", "cl", ""]));
    assert_eq!(report["results"][0]["value"], 0);
    assert_eq!(report["results"][0]["kind"], "exact");
}

#[test]
fn cl_plain_free_commutator() {
    let report = stdout_json(gqm().args(["--ctx", "free2", "cl", "[a,b]", "--plain"]));
    assert_eq!(report["results"][0]["value"], 1);
}

#[test]
fn cl_not_found_still_exits_zero() {
    // No decomposition of length ≤ 1 inside a radius-1 ball.
    let report = stdout_json(gqm().args([
        "--ctx",
        "free2",
        "cl",
        "[a,b] [b, a a]",
        "--max-factors",
        "1",
        "--ball-radius",
        "1",
    ]));
    assert_eq!(report["results"][0]["kind"], "not-found");
    assert_eq!(report["results"][0]["value"], Value::Null);
}

#[test]
fn parse_error_exits_two() {
    gqm()
        .args(["--ctx", "free2", "cl", "nosuchgen"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("error"));
}

#[test]
fn unknown_context_exits_two() {
    gqm().args(["--ctx", "nope", "cl", "a"]).assert().code(2);
}

#[test]
fn scl_with_qm_lower_bound() {
    let dir = tempdir();
    let qm_path = dir.join("qm.json");
    std::fs::write(
        &qm_path,
        r#"{"kind": "counting", "pattern": "a b", "homogenized": true, "defect_bound": "1"}"#,
    )
    .unwrap();
    let report = stdout_json(gqm().args([
        "--ctx",
        "free2",
        "scl",
        "[a,b]",
        "--qm-file",
        qm_path.to_str().unwrap(),
        "--support-radius",
        "2",
    ]));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["name"], "scl-lower");
    assert_eq!(results[0]["value"], "1/2");
    let upper: &str = results[1]["value"].as_str().unwrap();
    let parts: Vec<i64> = upper.split('/').map(|p| p.parse().unwrap()).collect();
    let (num, den) = (parts[0], *parts.get(1).unwrap_or(&1));
    assert!(num * 2 >= den, "upper {upper} below the certified lower bound");
}

#[test]
fn fill_finite_rotation_square() {
    let report = stdout_json(gqm().args([
        "--ctx",
        "d4-rotation",
        "fill",
        "r r",
        "--full-support",
        "--integral",
    ]));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["name"], "fill-norm-restricted");
    assert_eq!(results[0]["value"], "1");
    assert_eq!(results[1]["name"], "fill-norm-integral");
    assert_eq!(results[1]["value"], "3");
    assert!(!report["certificates"]["dual"].as_array().unwrap().is_empty());
}

#[test]
fn fill_reports_infeasible_without_failing() {
    let report = stdout_json(gqm().args(["--ctx", "f2-swap", "fill", "z"]));
    assert_eq!(report["results"][0]["status"], "infeasible");
    assert_eq!(report["results"][0]["value"], Value::Null);
}

#[test]
fn surface_from_decomposition_and_validate_roundtrip() {
    let report =
        stdout_json(gqm().args(["--ctx", "free2", "surface", "from-decomp", "[a,b]"]));
    assert_eq!(report["results"][0]["name"], "genus");
    assert_eq!(report["results"][0]["value"], 1);
    let census = &report["results"][1]["value"];
    assert_eq!(census["triangles"], 3);
    assert_eq!(census["boundary_edges"], 1);

    let dir = tempdir();
    let surf_path = dir.join("surface.json");
    std::fs::write(
        &surf_path,
        serde_json::to_string(&report["certificates"]["surface"]).unwrap(),
    )
    .unwrap();
    let report2 = stdout_json(gqm().args([
        "--ctx",
        "free2",
        "surface",
        "validate",
        "--surface",
        surf_path.to_str().unwrap(),
    ]));
    assert_eq!(report2["results"][0]["value"]["genus"], 1);
}

#[test]
fn surface_from_chain_file() {
    // First get an integral chain for [a,b] from the fill command.
    let dir = tempdir();
    let report = stdout_json(gqm().args([
        "--ctx",
        "free2",
        "fill",
        "[a,b]",
        "--integral",
    ]));
    let chain = &report["certificates"]["integral_chain"];
    let chain_path = dir.join("chain.json");
    std::fs::write(&chain_path, serde_json::to_string(chain).unwrap()).unwrap();
    let report2 = stdout_json(gqm().args([
        "--ctx",
        "free2",
        "surface",
        "from-chain",
        "[a,b]",
        "--chain",
        chain_path.to_str().unwrap(),
    ]));
    assert_eq!(report2["results"][0]["name"], "genus");
    assert_eq!(report2["results"][0]["value"], 1);
}

#[test]
fn qm_eval_defect_and_bavard() {
    let dir = tempdir();
    let qm_path = dir.join("qm.json");
    std::fs::write(
        &qm_path,
        r#"{"kind": "counting", "pattern": "a b", "homogenized": true, "defect_bound": "1"}"#,
    )
    .unwrap();
    let qm = qm_path.to_str().unwrap();

    let eval = stdout_json(gqm().args(["--ctx", "free2", "qm", "eval", "--qm", qm, "[a,b]"]));
    assert_eq!(eval["results"][0]["value"], "1");

    let defect = stdout_json(gqm().args(["--ctx", "free2", "qm", "defect", "--qm", qm]));
    let results = defect["results"].as_array().unwrap();
    assert_eq!(results[0]["kind"], "lower-bound");
    assert_eq!(results[1]["kind"], "upper-bound");
    assert_eq!(results[1]["value"], "1");

    let bavard =
        stdout_json(gqm().args(["--ctx", "free2", "qm", "bavard", "--qm", qm, "[a,b]"]));
    assert_eq!(bavard["results"][0]["name"], "scl-lower");
    assert_eq!(bavard["results"][0]["value"], "1/2");
}

#[test]
fn qm_extend_by_section_restricts_exactly() {
    let dir = tempdir();
    let qm_path = dir.join("ext.json");
    std::fs::write(
        &qm_path,
        r#"{
            "kind": "extended",
            "method": "section",
            "base": {"kind": "counting", "pattern": "a b", "homogenized": true,
                     "defect_bound": "1"},
            "transversal": [
                {"quotient": "", "representative": "", "value": "0"},
                {"quotient": "t", "representative": "z", "value": "0"}
            ]
        }"#,
    )
    .unwrap();
    let report = stdout_json(gqm().args([
        "--ctx",
        "f2-swap",
        "qm",
        "extend",
        "--qm",
        qm_path.to_str().unwrap(),
    ]));
    assert_eq!(report["results"][0]["name"], "restriction-exact");
    assert_eq!(report["results"][0]["value"], true);
}

#[test]
fn freeproduct_quotient_z4_z6() {
    let dir = tempdir();
    let a = dir.join("z4.json");
    let b = dir.join("z6.json");
    std::fs::write(&a, cyclic_spec(4)).unwrap();
    std::fs::write(&b, cyclic_spec(6)).unwrap();
    let report = stdout_json(gqm().args([
        "freeproduct-quotient",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
    ]));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["invariant_factors"], serde_json::json!(["2"]));
    assert_eq!(results[1]["invariant_factors"], serde_json::json!(["2"]));
    assert_eq!(results[2]["value"], true);
}

#[test]
fn section_constants_on_dihedral() {
    let report = stdout_json(gqm().args(["--ctx", "d4-rotation", "section-constants"]));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["name"], "ms");
    assert_eq!(results[0]["value"], 1);
    assert_eq!(results[1]["name"], "cs");
    assert_eq!(results[1]["value"], "0");
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempdir();
    let out = dir.join("report.json");
    let assert = gqm()
        .args(["--ctx", "d4-rotation", "--out", out.to_str().unwrap(), "cl", "r r"])
        .assert()
        .success();
    // Machine output goes to the file, not stdout.
    assert.stdout(predicate::str::is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["results"][0]["value"], 1);
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let strip = |report: Value| -> Value {
        let mut r = report;
        r.as_object_mut().unwrap().remove("timing_ms");
        r
    };
    let a = strip(stdout_json(gqm().args(["--ctx", "s3-alternating", "fill", "r", "--full-support"])));
    let b = strip(stdout_json(gqm().args(["--ctx", "s3-alternating", "fill", "r", "--full-support"])));
    assert_eq!(a, b);
}

#[test]
fn context_file_roundtrip() {
    let dir = tempdir();
    let ctx_path = dir.join("ctx.json");
    std::fs::write(
        &ctx_path,
        r#"{"group": {"kind": "free", "generators": ["x", "y"]}}"#,
    )
    .unwrap();
    let report = stdout_json(gqm().args([
        "--ctx",
        ctx_path.to_str().unwrap(),
        "cl",
        "[x,y]",
    ]));
    assert_eq!(report["results"][0]["value"], 1);
}

fn cyclic_spec(n: usize) -> String {
    let elements: Vec<String> = (0..n).map(|i| format!("\"g{i}\"")).collect();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let row: Vec<String> = (0..n).map(|j| ((i + j) % n).to_string()).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    format!(
        r#"{{"kind": "finite", "elements": [{}], "table": [{}]}}"#,
        elements.join(","),
        rows.join(",")
    )
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gqm-cli-test-{}", std::process::id()))
        .join(format!("{:x}", rand_suffix()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rand_suffix() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now().duration_since(UNIX_EPOCH).unwrap().as_nanos() as u64
}
