use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn convlim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convlim")).args(args).output().expect("spawn convlim")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn verify_norms_passes() {
    let out = convlim(&["verify", "--suite", "norms", "--seed", "7", "--count", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    let props = report["suites"][0]["properties"].as_array().unwrap();
    let ratio = props.iter().find(|p| p["name"] == "sum-over-sup-ratio-in-[1,3]").unwrap();
    assert!(ratio["observed"]["max"].as_f64().unwrap() <= 3.0);
    assert_eq!(ratio["checked"], 1000);
}

#[test]
fn verify_all_covers_every_suite() {
    let out = convlim(&["verify", "--suite", "all", "--seed", "1", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let suites: Vec<_> = json(&out)["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap().to_string()).collect();
    assert_eq!(suites, ["norms", "riesz-half", "riesz-line", "lebesgue", "sequence", "sobolev", "hilbert", "convex"]);
}

#[test]
fn verify_is_byte_stable() {
    let args = ["verify", "--suite", "riesz-half", "--seed", "3", "--count", "50"];
    assert_eq!(convlim(&args).stdout, convlim(&args).stdout);
}

#[test]
fn injected_failure_exits_one_with_witness() {
    let out = convlim(&["verify", "--suite", "norms", "--count", "20", "--inject-failure"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let failed: Vec<_> = report["suites"][0]["properties"].as_array().unwrap().iter().filter(|p| p["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert!(!failed[0]["witness"].is_null());
}

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(convlim(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(convlim(&["verify"]).status.code(), Some(2));
}

#[test]
fn csv_and_out_file() {
    let dir = std::env::temp_dir().join(format!("convlim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("norms.csv");
    let out = convlim(&["verify", "--suite", "norms", "--count", "10", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("suite,property,kind,passed,checked,failures,max_error,tolerance\n"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("norms,")));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn degeneracy_table() {
    let out = convlim(&["degeneracy", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let n2 = &rows[1];
    assert_eq!(n2["n"], 2);
    assert!((n2["sup_dist"].as_f64().unwrap() - 0.4).abs() < 1e-15);
    assert!((n2["witness"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    let dists: Vec<f64> = rows.iter().map(|r| r["sup_dist"].as_f64().unwrap()).collect();
    assert!(dists.windows(2).all(|w| w[1] < w[0]));
    let cmp = &report["c0_vs_clim"];
    assert_eq!(cmp["c0_max_mass"], 0.0);
    assert_eq!(cmp["clim_total_variation"][0], 1.0);
}

#[test]
fn degeneracy_empty_table() {
    let out = convlim(&["degeneracy", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"].as_array().unwrap().len(), 0);
    let csv = convlim(&["degeneracy", "--n-max", "0", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "n,sup_dist,witness\n");
}

#[test]
fn dualnorm_l1_example() {
    let r = json(&convlim(&["dualnorm", &data("l1_pcomposite.json")]));
    assert_eq!(r["oracle"]["value"], 3.0);
    assert_eq!(r["sum_formula"], 5.0);
    assert_eq!(r["q_composite_formula"], 3.0);
    assert_eq!(r["matches"], serde_json::json!(["q-composite"]));

    let r = json(&convlim(&["dualnorm", &data("l1_max.json")]));
    assert_eq!(r["oracle"]["value"], 5.0);
    assert_eq!(r["sum_formula"], 5.0);
}

#[test]
fn dualnorm_zero_functional() {
    let r = json(&convlim(&["dualnorm", &data("zero.json")]));
    for key in ["sum_formula", "q_composite_formula"] {
        assert_eq!(r[key], 0.0);
    }
    assert_eq!(r["oracle"]["value"], 0.0);
}

#[test]
fn dualnorm_bad_input() {
    assert_eq!(convlim(&["dualnorm", "/nonexistent/spec.json"]).status.code(), Some(2));
}
