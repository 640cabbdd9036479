use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", &format!("{name}.json")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgeshift")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_edgeshift"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_spec(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("edgeshift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn perron_four_vertex_spec() {
    let v = json(&run(&["perron", "--spec", &fixture("avoid_010_triple_100")]));
    let p = &v["perron"];
    assert_eq!(p["labels"].as_array().unwrap().len(), 4);
    assert_eq!(p["theta"]["float"], 2.0);
    assert_eq!(p["theta"]["exact"], "2/1");
    assert_eq!(p["property_p"]["certified"], true);
    assert_eq!(v["command"], "perron");
    assert!(v["version"].is_string());
}

#[test]
fn genfun_general_system() {
    let v = json(&run(&["genfun", "--spec", &fixture("nonreduced_avoid_001_double_00"), "--max-n", "8"]));
    let g = &v["genfun"];
    assert_eq!(g["mode"], "general");
    assert!(g["R_of_z"].is_null());
    let s: Vec<&str> = g["series"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(s, ["1/1", "2/1", "5/1", "11/1", "24/1", "51/1", "107/1", "222/1", "457/1"]);
}

#[test]
fn measure_routes_agree() {
    let v = json(&run(&["measure", "--spec", &fixture("avoid_010_triple_100"), "--cylinder", "100"]));
    let vals = v["measure"]["values"].as_array().unwrap();
    assert_eq!(vals.len(), 3);
    for x in vals {
        assert_eq!(x["exact"], "3/22");
    }
    assert_eq!(v["measure"]["route_gap"], 0.0);
    let one = json(&run(&["measure", "--spec", &fixture("avoid_010_triple_100"), "--cylinder", "100", "--route", "shannon-parry"]));
    assert_eq!(one["measure"]["values"][0]["route"], "shannon_parry");
}

#[test]
fn verify_fixtures() {
    for name in ["full_binary", "avoid_010_double_000", "irrational_root", "golden_double_00"] {
        let out = run(&["verify", "--spec", &fixture(name)]);
        let v = json(&out);
        assert_eq!(v["verify"]["passed"], true, "{name}");
    }
    let out = run(&["verify", "--spec", &fixture("corrupted_avoid_010_000"), "--table"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("series mismatch"));
}

#[test]
fn empty_word_lists_verify() {
    let p = write_spec("empty.json", r#"{"alphabet":["a","b","c"],"forbidden":[],"repeated":[]}"#);
    let v = json(&run(&["verify", "--spec", &p]));
    assert_eq!(v["verify"]["passed"], true);
}

#[test]
fn enumerate_full_shift() {
    let v = json(&run(&["enumerate", "--spec", &fixture("full_binary"), "--max-n", "4"]));
    let f: Vec<&str> = v["enumerate"]["rows"].as_array().unwrap().iter().map(|r| r["f"].as_str().unwrap()).collect();
    assert_eq!(f, ["1", "2", "4", "8", "16"]);
    let v = json(&run(&["enumerate", "--spec", &fixture("full_binary"), "--max-n", "0"]));
    assert_eq!(v["enumerate"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn escape_counts() {
    let v = json(&run(&["escape", "--spec", &fixture("hole_double_01"), "--word", "01", "--max-n", "6"]));
    let h: Vec<&str> = v["escape"]["h"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(h, ["2", "3", "5", "8", "13", "21", "34"]);
}

#[test]
fn exit_codes() {
    let bad = write_spec("bad.json", r#"{"alphabet":["0","1"],"forbidden":["2"],"repeated":[]}"#);
    assert_eq!(run(&["perron", "--spec", &bad]).status.code(), Some(2));
    let junk = write_spec("junk.json", "not json");
    assert_eq!(run(&["genfun", "--spec", &junk]).status.code(), Some(2));
    let out = run(&["enumerate", "--spec", &fixture("full_binary"), "--max-n", "12", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["perron", "--spec", "/nonexistent/spec.json"]).status.code(), Some(5));
}

#[test]
fn output_is_deterministic() {
    let args = ["perron", "--spec", &fixture("irrational_root")];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn spec_from_stdin() {
    let text = std::fs::read_to_string(fixture("full_quaternary")).unwrap();
    let v = json(&run_stdin(&["perron", "--spec", "-"], &text));
    assert_eq!(v["perron"]["theta"]["float"], 4.0);
    let out = run_stdin(&["genfun", "--spec", "-", "--table", "--max-n", "2"], &text);
    assert!(String::from_utf8_lossy(&out.stdout).contains("series\t1/1, 4/1, 16/1"));
}
