use std::path::Path;
use std::process::{Command, Output};

fn tapestry(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tapestry")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn small_free(dir: &Path, extra: &str) -> String {
    let path = dir.join("free.json");
    let text = format!(
        r#"{{"scenario": "free_particle",
            "lattice": {{"dt": 0.05, "dx": 0.1, "dims": 1, "extent": 120}},
            "process": {{"subprocesses": [{{"w_re": 1, "psi": "gaussian:{{1,0,1}}", "tag": 0}}]}},
            "steps": 3{extra}}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_slits(dir: &Path) -> String {
    let path = dir.join("slits.json");
    let text = r#"{"scenario": "two_slit",
        "lattice": {"dt": 0.2, "dx": 0.25, "dims": 2, "extent": 100},
        "process": {"subprocesses": [{"w_re": 1, "psi": "gaussian:{2,-10,4};{2,0,0}", "tag": 0}]},
        "geometry": {"a": 2.0, "b": 10.0, "c": 2.125, "d": 3.875},
        "trials": 500,
        "seed": 1}"#;
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn agreeing_demo_exits_zero_with_a_record() {
    let o = tapestry(&["demo", "bell", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["match"], true);
    assert_eq!(v["outputs"]["rhs"], "3/2");
}

#[test]
fn disagreeing_demo_exits_three() {
    let o = tapestry(&["demo", "lego"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("MISMATCH"));
    assert_eq!(code(&tapestry(&["interp-test"])), 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&tapestry(&[])), 1);
    assert_eq!(code(&tapestry(&["demo", "nope"])), 1);
    assert_eq!(code(&tapestry(&["census", "--day", "3"])), 1);
    assert_eq!(code(&tapestry(&["run"])), 1);
    assert_eq!(code(&tapestry(&["--help"])), 0);
}

#[test]
fn census_lists_day_one() {
    let o = tapestry(&["census", "--day", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("day 1: 4 values"), "{text}");
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = small_free(dir.path(), r#", "foo": 1"#);
    let o = tapestry(&["run", &unknown]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field `foo`"));

    let coarse = dir.path().join("coarse.json");
    std::fs::write(&coarse, std::fs::read_to_string(&unknown).unwrap().replace(r#", "foo": 1"#, "").replace("0.1", "0.2")).unwrap();
    let o = tapestry(&["run", coarse.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lattice.dx"));
    assert_eq!(code(&tapestry(&["run", "/nonexistent/config.json"])), 2);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_free(dir.path(), "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&tapestry(&["run", &cfg, "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&tapestry(&["run", &cfg, "--out", b.to_str().unwrap()])), 0);
    for f in ["report.json", "wave.csv", "tapestry_step1.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let wave = std::fs::read_to_string(a.join("wave.csv")).unwrap();
    assert!(wave.starts_with("step,t,x,re,im,abs2\n"));

    let j = dir.path().join("j");
    assert_eq!(code(&tapestry(&["run", &cfg, "--out", j.to_str().unwrap(), "--format", "json"])), 0);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(j.join("wave.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4 * 241);
}

#[test]
fn emitted_tapestry_validates_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_free(dir.path(), "");
    let out = dir.path().join("out");
    assert_eq!(code(&tapestry(&["run", &cfg, "--out", out.to_str().unwrap()])), 0);
    let doc = out.join("tapestry_step1.json");
    let o = tapestry(&["validate", doc.to_str().unwrap(), "--strict"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    let first = v["informons"][0]["id"].clone();
    v["informons"][1]["id"] = first;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = tapestry(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("axiom 3"));
}

#[test]
fn seed_flag_steers_detections() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_slits(dir.path());
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        assert_eq!(code(&tapestry(&["run", &cfg, "--seed", seed, "--out", out.to_str().unwrap()])), 0);
        std::fs::read_to_string(out.join("detections.jsonl")).unwrap()
    };
    let (a, b, c) = (run("5", "a"), run("5", "b"), run("6", "c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().count(), 500);
    assert!(a.starts_with("{\"seed\":5,\"trial\":0,"));
}
