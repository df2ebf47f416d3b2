use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use addcomb::inverse::{planted_case_iii, ArcZ};
use serde_json::{json, Value};
use tempfile::TempDir;

fn addcomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(args)
        .env_remove("ADDCOMB_OUT_DIR")
        .output()
        .expect("spawn addcomb")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cauchy_davenport_exhaustive_p7() {
    let out = addcomb(&["direct-sweep", "--theorem", "cauchy-davenport", "--p", "7", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["results"]["tested"], 127 * 127);
    assert_eq!(r["results"]["passed"], 127 * 127);
    assert_eq!(r["counterexamples"], json!([]));
    assert_eq!(r["config_echo"]["subcommand"], "direct-sweep");
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "pair.json", "{\"A\": [1, 2");
    let out = addcomb(&["inverse-detect", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_exits_2() {
    let out = addcomb(&["sumset", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sumset_of_files() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", r#"{"Q": 10, "elements": [0, 1, 2]}"#);
    let b = write(dir.path(), "b.txt", "Q=10\n0\n5\n");
    let out = addcomb(&["sumset", "--a", s(&a), "--b", s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["results"]["size"], 6);
    assert_eq!(r["results"]["sumset"]["elements"], json!([0, 1, 2, 5, 6, 7]));
}

#[test]
fn inverse_detect_finds_planted_case_iii() {
    let arc = |start, len| ArcZ { start, len };
    let (a, b) = planted_case_iii(60, 60, 7, arc(0, 12), arc(0, 18), 3, 5).unwrap();
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "pair.json", &json!({ "A": a, "B": b }).to_string());
    let out = addcomb(&["inverse-detect", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["results"]["case"], "iii", "{}", r["results"]);

    // The emitted certificate verifies through the CLI as well.
    let cert = write(dir.path(), "cert.json", &r["results"]["certificate"].to_string());
    let out = addcomb(&["inverse-detect", "--input", s(&input), "--certificate", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["results"]["verified"], true);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let run = |seed: &str| {
        addcomb(&["--seed", seed, "direct-sweep", "--theorem", "kneser", "--q", "64", "--random", "300", "--eps", "0.1"])
    };
    let (x, y) = (run("11"), run("11"));
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    let c = addcomb(&["--seed", "11", "construct", "--kind", "two-scale", "--bound", "5000"]);
    let d = addcomb(&["--seed", "11", "construct", "--kind", "two-scale", "--bound", "5000"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn injected_failure_is_recorded_and_replayed() {
    let dir = TempDir::new().unwrap();
    // A = B = {0, 2} in Z/4 misses the odd coset, so only the unconditional
    // check applies, and |A+B| = 2 is not above |A| + |B| - Q/4.
    let pairs = json!([
        { "theorem": "kneser", "modulus": 4, "a": [0, 2], "b": [0, 2], "eps": 0.25 },
        { "theorem": "kneser", "modulus": 4, "a": [0, 1], "b": [0, 1, 2], "eps": 0.25 },
    ]);
    let file = write(dir.path(), "pairs.json", &pairs.to_string());
    let report = dir.path().join("out/report.json");

    let plain = addcomb(&["direct-sweep", "--theorem", "kneser", "--pairs", s(&file)]);
    assert_eq!(plain.status.code(), Some(0));

    let out = addcomb(&[
        "--out",
        s(&report),
        "direct-sweep",
        "--theorem",
        "kneser",
        "--pairs",
        s(&file),
        "--unconditional",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["results"]["failures"], 1);
    let cx = r["counterexamples"].as_array().unwrap();
    assert_eq!(cx.len(), 1);
    assert_eq!(cx[0]["kind"], "direct");
    assert_eq!(cx[0]["instance"]["a"], json!([0, 2]));

    let again = addcomb(&["replay", "--input", s(&report)]);
    assert_eq!(again.status.code(), Some(1));
    let rr = json_of(&again);
    assert_eq!(rr["results"]["replayed"][0]["still_fails"], true);
    assert_eq!(rr["counterexamples"].as_array().unwrap().len(), 1);
}

#[test]
fn wrong_certificate_is_a_counterexample() {
    let dir = TempDir::new().unwrap();
    let arc = |start, len| ArcZ { start, len };
    let (a, b) = planted_case_iii(60, 60, 7, arc(0, 12), arc(0, 18), 3, 5).unwrap();
    let input = write(dir.path(), "pair.json", &json!({ "A": a, "B": b }).to_string());
    let out = addcomb(&["inverse-detect", "--input", s(&input)]);
    let cert = json_of(&out)["results"]["certificate"].clone();

    // A well-formed certificate with the wrong frequency fails verification.
    let mut wrong_t = cert.clone();
    wrong_t["bohr"]["t"] = json!(11);
    let file = write(dir.path(), "wrong_t.json", &wrong_t.to_string());
    let out = addcomb(&["inverse-detect", "--input", s(&input), "--certificate", s(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["results"]["verified"], false);
    assert_eq!(r["counterexamples"][0]["kind"], "certificate");

    // An internally inconsistent certificate is an input error.
    let mut wrong_case = cert;
    wrong_case["case"] = json!("i");
    let file = write(dir.path(), "wrong_case.json", &wrong_case.to_string());
    let out = addcomb(&["inverse-detect", "--input", s(&input), "--certificate", s(&file)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_csv_has_header() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "set.txt", "1 2 4 6 8 10\n");
    let out = addcomb(&["--format", "csv", "density", "--set", s(&set), "--checkpoints", "2,5,10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,value");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "2,1");
}

#[test]
fn csv_unavailable_is_config_error() {
    let out = addcomb(&["--format", "csv", "discrepancy", "--theta", "1/7", "--N", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_variable_names_the_file() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(["discrepancy", "--theta", "0.6180339887498949", "--N", "200"])
        .env("ADDCOMB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("discrepancy.json")).unwrap()).unwrap();
    let d = r["results"]["discrepancy"]["value"].as_f64().unwrap();
    let et = r["results"]["erdos_turan"]["bound"].as_f64().unwrap();
    assert!(d > 0.0 && d <= et, "D = {d}, ET = {et}");
}

#[test]
fn empty_results_still_echo_config() {
    let out = addcomb(&["--seed", "5", "almost-period", "--alphas", "1/3", "--H", "100", "--x", "0.5", "--eps", "0.005"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["results"]["m"], Value::Null);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["config_echo"]["subcommand"], "almost-period");
    assert_eq!(r["config_echo"]["H"], 100);
    assert!(r["tool_version"].is_string());
}

#[test]
fn schnirelmann_union_holds_on_small_sets() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", "[1, 3, 5, 7, 9]");
    let b = write(dir.path(), "b.json", "[1, 2, 4]");
    let out = addcomb(&["schnirelmann", "--set", s(&a), "--N", "10", "--union-with", s(&b), "--delta", "0.2", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["results"]["sigma"], json!([1, 2]));
    assert_eq!(r["results"]["union"]["holds"], true);
}

#[test]
fn scale_norm_and_gowers_run() {
    let dir = TempDir::new().unwrap();
    let vals: Vec<f64> = (0..256).map(|n| if n % 3 == 0 { 1.0 } else { -0.5 }).collect();
    let sig = write(dir.path(), "sig.json", &json!(vals).to_string());
    let out = addcomb(&["--format", "csv", "scale-norm", "--signal", s(&sig), "--N", "64,200", "--H", "4,16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("N,H,value,ergodicity\n"));
    assert_eq!(text.lines().count(), 3);

    let out = addcomb(&["gowers", "--signal", s(&sig), "--Q", "300"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["results"]["chain"]["holds"], true);

    let density: Vec<f64> = vals.iter().map(|v| (v + 0.5) / 1.5).collect();
    let dsig = write(dir.path(), "density.json", &json!(density).to_string());
    let out = addcomb(&["regularity", "--signal", s(&dsig), "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bohr_and_construct_outputs() {
    let out = addcomb(&["--format", "csv", "bohr", "--theta", "1/5", "--interval", "0/5,1/5", "--range", "0,100", "--window", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x,window_density\n"));

    let dir = TempDir::new().unwrap();
    let report = dir.path().join("ctmn.json");
    let out = addcomb(&["--out", s(&report), "construct", "--kind", "ctmn", "--bound", "4000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = addcomb(&["density", "--set", s(&report), "--which", "B", "--checkpoints", "100,1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
