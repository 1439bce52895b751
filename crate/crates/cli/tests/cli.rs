use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn minsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsurf")).args(args).output().expect("spawn minsurf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const KAWAKAMI: &str = r#"{"base": {"kind": "sphere", "punctures": [[0, 1], [0, -1], "inf"]},
  "g": {"kind": "rational", "num": [2, 0, 1], "den": [0, 0, 1], "scale": [0, 0.7745966692414834]},
  "h": {"kind": "rational", "num": [0, 0, 0, 0, 1], "den": [1, 0, 2, 0, 1]}}"#;

#[test]
fn analyze_file_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k.json", KAWAKAMI);
    let o = minsurf(&["analyze", &f, "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["d"], 2);
    assert_eq!(v["report"]["invR"], "1/4");
    assert_eq!(v["report"]["nu_g"], "5/2");

    let o = minsurf(&["analyze", "@costa"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("1/R = 1/2"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn broken_regularity_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // g has a pole at 1 but hdz does not vanish there
    let f = write(
        dir.path(),
        "bad.json",
        r#"{"base": {"kind": "sphere", "punctures": ["inf"]},
            "g": {"kind": "rational", "num": [1], "den": [-1, 1]},
            "h": {"kind": "rational", "num": [1]}}"#,
    );
    let o = minsurf(&["analyze", &f, "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["report"]["regularity"]["pass"], false);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&minsurf(&["analyze", "/nonexistent/surface.json"])), 2);
    assert_eq!(code(&minsurf(&["catalog", "show", "@nosuch"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.json", r#"{"base": {"kind": "plane"}, "g": {}, "h": {}}"#);
    assert_eq!(code(&minsurf(&["analyze", &f])), 2);
    let o = minsurf(&["catalog", "show", "@costa_type", "--case", "2", "--j", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn catalog_show_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let o = minsurf(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert!(names.len() >= 8);
    for name in names {
        let o = minsurf(&["catalog", "show", &name]);
        assert_eq!(code(&o), 0, "{name}");
        let shown = stdout_json(&o);
        let f = write(dir.path(), "s.json", &String::from_utf8_lossy(&o.stdout));
        let o = minsurf(&["analyze", &f, "--json"]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let rep = &stdout_json(&o)["report"];
        for key in ["d", "G", "k", "invR", "D_g", "nu_g", "l", "n_g"] {
            assert_eq!(rep[key], shown["golden"][key], "{name} {key}");
        }
    }
}

#[test]
fn mesh_writes_obj_and_ply() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("e.obj");
    let o = minsurf(&["mesh", "@enneper", "--rmin", "0.05", "--nr", "8", "--ntheta", "16", "--out", obj.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 128);
    assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 128);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 112);

    let ply = dir.path().join("c.ply");
    let o = minsurf(&["mesh", "@catenoid", "--rmin", "0.5", "--rmax", "2", "--out", ply.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(fs::read(&ply).unwrap().starts_with(b"ply"));
}

#[test]
fn mesh_too_close_to_puncture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.obj");
    let o = minsurf(&["mesh", "@catenoid", "--rmin", "0.001", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn periods_default_and_custom_cycle() {
    let o = minsurf(&["periods", "@voss3"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let real = v["periods"][0]["real"].as_array().unwrap();
    let max = real.iter().map(|x| x.as_f64().unwrap().abs()).fold(0.0, f64::max);
    assert!((max - std::f64::consts::PI).abs() < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.json", r#"{"circle": {"center": [0, 0], "radius": 1}}"#);
    let o = minsurf(&["periods", "@catenoid", "--cycle", &f]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let z = &v["periods"][0]["complex"][2];
    assert!((z[1].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-10);
}

#[test]
fn covering_specs() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.json", r#"{"m": 2, "fibers": [[2], [2], [1, 1]]}"#);
    let o = minsurf(&["covering", "@miyaoka_sato", "--spec", &good]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["cover"]["k"], 4);
    assert_eq!(v["cover"]["invR"], "1/4");
    let bad = write(dir.path(), "b.json", r#"{"m": 2, "fibers": [[2], [1, 1], [1, 1]]}"#);
    assert_eq!(code(&minsurf(&["covering", "@miyaoka_sato", "--spec", &bad])), 2);
}

#[test]
fn unicity_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"base": {"kind": "sphere", "punctures": [[0, 0], "inf"]},
            "g": {"kind": "rational", "num": [0, 1]}, "h": {"kind": "rational", "num": [1]}}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"base": {"kind": "sphere", "punctures": [[0, 0], "inf"]},
            "g": {"kind": "rational", "num": [1], "den": [0, 1]}, "h": {"kind": "rational", "num": [1]}}"#,
    );
    let o = minsurf(&["unicity", &a, &b]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["q"], 4);
    assert_eq!(code(&minsurf(&["unicity", &a, &a])), 1);
}

#[test]
fn nevanlinna_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = minsurf(&["nevanlinna", "voss3", "--r", "0.5,0.7", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,T,bound,slack,eta"));
    for l in lines {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[1] <= f[2], "{l}");
    }
    assert_eq!(stdout_json(&o)["areas"]["ratio"], "2");
}

#[test]
fn total_curvature_statuses() {
    let o = minsurf(&["totalcurv", "@catenoid"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "finite");
    assert!((v["value"].as_f64().unwrap() + 4.0 * std::f64::consts::PI).abs() < 1e-8);
    let v = stdout_json(&minsurf(&["totalcurv", "@voss3"]));
    assert_eq!(v["status"], "divergent");
    let v = stdout_json(&minsurf(&["totalcurv", "@voss3", "--truncate", "5"]));
    assert_eq!(v["status"], "finite");
}
