use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_abs-linf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name).to_string_lossy().into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("abs-linf-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn trees_enum_prints_bracket_notation() {
    let o = run(&["trees", "enum", "--arity", "3", "--weight", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "[(|||)]");
}

#[test]
fn bad_input_exits_2_with_usage() {
    let o = run(&["bch", "--weight", "3", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = run(&["model", "pi", "no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["trees", "symmetry", "(|)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bch_coefficients() {
    let o = run(&["bch", "--weight", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let coeffs: Vec<(&str, &str)> = v["terms"].as_array().unwrap().iter().map(|t| (t["basis"].as_str().unwrap(), t["coeff"].as_str().unwrap())).collect();
    assert_eq!(coeffs, vec![("x", "1"), ("y", "1"), ("[x,y]", "1/2"), ("[x,[x,y]]", "1/12"), ("[[x,y],y]", "1/12")]);
}

#[test]
fn output_is_deterministic() {
    let args = ["model", "build", "boundary:2", "--weight", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn horn_fill_then_simplex_check() {
    let o = run(&["horn", "fill", "--algebra", "lie:3", "--horn", &data("bch_horn.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["missing_face"], serde_json::json!([0, 2]));

    let o = run(&["simplex", "check", "--algebra", "lie:3", "--assignment", &data("bch_simplex.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["simplex"], Value::Bool(true));

    // drop the ½[x,y] term from the long edge: a failed check with a witness
    let mut s: Value = serde_json::from_str(&std::fs::read_to_string(data("bch_simplex.json")).unwrap()).unwrap();
    for f in s["faces"].as_array_mut().unwrap() {
        if f["face"] == serde_json::json!([0, 2]) {
            f["value"].as_array_mut().unwrap().retain(|t| t["label"] != "[x,y]");
        }
    }
    let dir = scratch("simplex");
    let path = dir.join("broken.json");
    std::fs::write(&path, s.to_string()).unwrap();
    let o = run(&["simplex", "check", "--algebra", "lie:3", "--assignment", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["residuals"].as_array().unwrap().is_empty());
}

#[test]
fn cache_dir_holds_tables() {
    let dir = scratch("cache");
    let args = ["transfer", "table", "--n", "2", "--tree", "(|(||))"];
    let a = bin().args(args).env("ABS_CACHE_DIR", &dir).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(files.len(), 1);
    let b = bin().args(args).env("ABS_CACHE_DIR", &dir).output().unwrap();
    let c = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn sphere_and_loop_homotopy() {
    let o = run(&["model", "pi", "sphere:2", "--degrees", "2..4", "--weight", "5"]);
    assert_eq!(json(&o)["dims"], serde_json::json!({"2": 1, "3": 1, "4": 0}));
    let o = run(&["map", "pi", "--source", "sphere:1", "--target", "sphere:2", "--degrees", "1..2"]);
    assert_eq!(json(&o)["dims"], serde_json::json!({"1": 1, "2": 2}));
}

#[test]
fn extension_grid() {
    let o = run(&["extend", "--algebra", "g_complex", "--with", "rational", "--grid", "-3..3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["grid"]["solutions"].as_array().unwrap().is_empty());
    assert_eq!(v["system"]["equations"][0]["equation"], "c0^2 + 1 = 0");
    let o = run(&["extend", "--algebra", "g_complex", "--with", "gaussian", "--candidate", &data("gaussian_candidate.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["candidate"]["maurer_cartan"], Value::Bool(true));
}

#[test]
fn checks_report_and_fail() {
    let o = run(&["check", "mc-algebra", "--n", "2", "--weight", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["check", "model", "boundary:3"]);
    assert_eq!(json(&o)["passed"], Value::Bool(true));
    let o = run(&["check", "mc", "--algebra", "g_complex", "--element", &data("not_mc.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!json(&o)["residual"].as_array().unwrap().is_empty());
}
