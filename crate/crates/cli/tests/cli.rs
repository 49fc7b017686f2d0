use std::path::{Path, PathBuf};

use assert_cmd::Command;
use serde_json::Value;

fn chromadapt() -> Command {
    Command::cargo_bin("chromadapt").unwrap()
}

fn here(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(rel)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(here("golden").join(name)).unwrap()
}

fn stdout_of(cmd: &mut Command) -> String {
    String::from_utf8(cmd.output().unwrap().stdout).unwrap()
}

fn parse_row(csv: &str, line: usize) -> Vec<String> {
    csv.lines().nth(line).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn symmetric_single_colour_a_to_d65() {
    let out = chromadapt()
        .args(["transform", "--method", "spectral-sym", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "0.2,0.3,0.1"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let out = String::from_utf8(out).unwrap();
    let row = parse_row(&out, 1);
    let xyz: Vec<f64> = row[1..4].iter().map(|s| s.parse().unwrap()).collect();
    assert!((xyz[0] - 0.1699).abs() < 0.005 && xyz[1] == 0.3 && (xyz[2] - 0.2415).abs() < 0.005, "{out}");
    assert_eq!(row[6], "ok");
}

#[test]
fn zero_adaptation_is_identity() {
    chromadapt()
        .args(["transform", "--method", "cat02", "--d", "0", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "0.2,0.3,0.1"])
        .assert()
        .success()
        .stdout("id,X,Y,Z,x,y,status\n1,0.2,0.3,0.1,0.333333,0.5,ok\n");
}

#[test]
fn hundred_scale_input_is_detected() {
    chromadapt()
        .args(["transform", "--method", "cat02", "--d", "0", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "20,30,10"])
        .assert()
        .success()
        .stdout("id,X,Y,Z,x,y,status\n1,20,30,10,0.333333,0.5,ok\n");
}

#[test]
fn batch_with_one_unreachable_row() {
    let assert = chromadapt()
        .args(["transform", "--src-wp", "A", "--dst-wp", "D65", "--input"])
        .arg(here("fixtures/batch100.csv"))
        .assert()
        .code(2);
    let out = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    assert_eq!(out, golden("transform_batch100.csv"));
    assert_eq!(out.lines().filter(|l| l.ends_with(",ok")).count(), 99);
    assert!(out.lines().any(|l| l.starts_with("57,,,,,,") && l.contains("did not converge")));
}

#[test]
fn transform_json_carries_meta_and_errors() {
    let out = stdout_of(
        chromadapt()
            .args(["--format", "json", "transform", "--src-wp", "A", "--dst-wp", "D65", "--input"])
            .arg(here("fixtures/batch100.csv")),
    );
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["command"], "transform");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows[56]["output"].is_null() && rows[56]["error"].is_string());
    assert!(rows[0]["error"].is_null());
}

#[test]
fn config_errors_exit_one() {
    chromadapt().args(["transform", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "1,2"]).assert().code(1);
    chromadapt().args(["transform", "--method", "bradford", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "0.2,0.3,0.1"]).assert().code(1);
    chromadapt().args(["transform", "--src-wp", "F2", "--dst-wp", "D65", "--xyz", "0.2,0.3,0.1"]).assert().code(1);
    chromadapt().args(["transform", "--d", "1.5", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "0.2,0.3,0.1"]).assert().code(1);
    chromadapt().args(["gamut-sweep", "--fraction", "1.5"]).assert().code(1);
    chromadapt().args(["--cmf", "/nonexistent.csv", "locus"]).assert().code(1);
    chromadapt().arg("--help").assert().success();
}

#[test]
fn reconstruct_flat_for_white_target() {
    let out = stdout_of(chromadapt().args(["reconstruct", "--illuminant-wp", "EE", "--xyz", "1,1,1"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 37);
    assert_eq!(lines[0], "wavelength_nm,value");
    for line in &lines[1..] {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{line}");
    }
}

#[test]
fn reconstruct_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rho.csv");
    chromadapt()
        .args(["reconstruct", "--illuminant-wp", "A", "--xyz", "0.2,0.3,0.1", "--out"])
        .arg(&out)
        .assert()
        .success();
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 0.0));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rho.csv.json")).unwrap()).unwrap();
    assert!(side["iterations"].as_u64().unwrap() <= 20);
    assert!(side["residual_norm"].as_f64().unwrap() < 1e-8);
}

#[test]
fn reconstruct_out_of_locus_exits_three() {
    let assert = chromadapt().args(["reconstruct", "--illuminant-wp", "EE", "--xyz", "0.9,0.1,0.9"]).assert().code(3);
    assert!(String::from_utf8_lossy(&assert.get_output().stderr).contains("did not converge"));
}

#[test]
fn eval_identity_fixture() {
    chromadapt()
        .args(["eval", "--methods", "spectral,spectral-sym,hpe,cat02,cat16", "--datasets"])
        .arg(here("fixtures/datasets"))
        .assert()
        .success()
        .stdout(golden("eval_identity.csv"));
}

#[test]
fn eval_json_report() {
    let out = stdout_of(
        chromadapt().args(["--format", "json", "eval", "--methods", "spectral", "--datasets"]).arg(here("fixtures/datasets")),
    );
    let doc: Value = serde_json::from_str(&out).unwrap();
    let report = &doc["reports"]["spectral"];
    assert_eq!(report["weighted_mean_all"], 0.0);
    assert_eq!(report["per_pair"].as_array().unwrap().len(), 4);
    assert_eq!(report["per_pair"][0]["sample_id"], "identity/1");
}

#[test]
fn eval_without_datasets_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    chromadapt().args(["eval", "--datasets"]).arg(dir.path()).assert().code(1);
}

#[test]
fn locus_golden() {
    chromadapt().arg("locus").assert().success().stdout(golden("locus.csv"));
}

#[test]
fn small_sweep_golden_and_deterministic() {
    let args = ["gamut-sweep", "--method", "spectral-sym", "--count", "3", "--samples", "12"];
    let first = chromadapt().args(args).assert().success().get_output().clone();
    let second = chromadapt().args(args).assert().success().get_output().clone();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(String::from_utf8(first.stdout).unwrap(), golden("sweep_small.csv"));
    let mut a: Value = serde_json::from_slice(&first.stderr).unwrap();
    let mut b: Value = serde_json::from_slice(&second.stderr).unwrap();
    a.as_object_mut().unwrap().remove("meta");
    b.as_object_mut().unwrap().remove("meta");
    assert_eq!(a, b);
}

fn sweep_summary(method: &str, fraction: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    chromadapt()
        .args(["gamut-sweep", "--method", method, "--fraction", fraction, "--out"])
        .arg(&out)
        .assert()
        .success();
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("angle_index,src_x,src_y,dst_x,dst_y,inside,negative\n"));
    serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.csv.summary.json")).unwrap()).unwrap()
}

#[test]
fn spectral_sweep_stays_inside() {
    let s = sweep_summary("spectral-sym", "0.9");
    assert_eq!(s["total_outside"], 0);
    assert_eq!(s["total_negative"], 0);
    assert_eq!(s["sweeps"].as_array().unwrap().len(), 9);
}

#[test]
fn cat16_sweep_leaves_locus_every_time() {
    let s = sweep_summary("cat16", "0.9");
    for sweep in s["sweeps"].as_array().unwrap() {
        assert!(sweep["outside"].as_u64().unwrap() >= 1);
    }
    let s = sweep_summary("cat16", "0");
    assert_eq!(s["total_outside"], 0);
}

#[test]
fn luminance_up_to_two_stays_unit_scale() {
    let out = stdout_of(chromadapt().args([
        "--format", "json", "transform", "--method", "cat02", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "1.2,1.8,0.9",
    ]));
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["parameters"]["scale_factor"], 1.0);
    let out = stdout_of(chromadapt().args([
        "--format", "json", "transform", "--method", "cat02", "--src-wp", "A", "--dst-wp", "D65", "--xyz", "1.2,2.1,0.9",
    ]));
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["parameters"]["scale_factor"], 0.01);
}
