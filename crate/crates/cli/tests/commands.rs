use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_k3degen"));
    c.env_remove("K3DEGEN_FIXTURES");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn tetrahedral_fiber_is_type_three() {
    let o = run(&["classify-fiber", data("tetrahedral_fiber.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["type"], "III");
    assert_eq!(r["grw"], json!([1, 0, 20, 0, 1]));
    assert_eq!(r["all_checks_passed"], true);
    assert_eq!(r["e1"]["euler_characteristic"], 24);
    assert!(r["summary"].is_string());
}

#[test]
fn payload_sources_agree() {
    let path = data("chain_fiber.json");
    let text = fs::read_to_string(&path).unwrap();
    let from_path = run(&["classify-fiber", path.to_str().unwrap()]);
    let from_stdin = run_stdin(&["classify-fiber", "-"], &text);
    let inline: Value = serde_json::from_str(&text).unwrap();
    let from_inline = run(&["classify-fiber", &inline.to_string()]);
    let tmp = tempfile::NamedTempFile::new().unwrap();
    fs::write(tmp.path(), &text).unwrap();
    let from_tmp = run(&["classify-fiber", tmp.path().to_str().unwrap()]);
    let strip = |o: &Output| {
        let mut r = report(o);
        r.as_object_mut().unwrap().remove("input");
        r
    };
    let base = strip(&from_path);
    assert_eq!(base["type"], "II");
    for o in [&from_stdin, &from_inline, &from_tmp] {
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(strip(o), base);
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["classify-fiber", "data"],
        vec!["orient", "data", "--vertex-map", "[1,2,0,3]"],
        vec!["orders", "--max-t", "21"],
        vec!["charpoly", "--m", "1", "--setting", "finite_height", "--p", "3", "--t-rank", "6"],
    ] {
        let file = if args[0] == "orient" { "tetrahedron.json" } else { "tetrahedral_fiber.json" };
        let p = data(file);
        let args: Vec<&str> = args.iter().map(|a| if *a == "data" { p.to_str().unwrap() } else { a }).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["allowed-types", "--m", "5"]).status.code(), Some(0));
    assert_eq!(run(&["allowed-types"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["orders", "--max-t", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["classify-fiber", "/nonexistent/fiber.json"]).status.code(), Some(1));
    assert_eq!(run(&["classify-fiber", "{not json"]).status.code(), Some(1));
    assert_eq!(run(&["orient", data("projective_plane.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["charpoly", "--factor", "[-2,0,1]"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn input_errors_are_reported_as_json() {
    let o = run(&["classify-fiber", "/nonexistent/fiber.json"]);
    let r = report(&o);
    assert_eq!(r["error"]["kind"], "input");
    assert!(r["summary"].is_string());
    assert!(!o.stderr.is_empty());
}

#[test]
fn allowed_types_for_order_five() {
    let r = report(&run(&["allowed-types", "--m", "5"]));
    assert_eq!(r["allowed"], json!(["I"]));
    assert_eq!(r["status"], "decided");
}

#[test]
fn wild_orders_up_to_rank_21() {
    let r = report(&run(&["orders", "--max-t", "21"]));
    assert_eq!(r["wild_prime_powers"], json!([2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 25, 27, 32]));
    assert_eq!(r["count"], 15);
}

#[test]
fn octahedron_orientation_action() {
    let p = data("octahedron.json");
    let r = report(&run(&["orient", p.to_str().unwrap(), "--vertex-map", "[1,0,3,2,5,4]"]));
    assert_eq!(r["orientation_action"], -1);
    assert_eq!(r["euler_characteristic"], 2);
}

#[test]
fn builtin_corpus_passes() {
    let o = run(&["fixtures"]);
    let r = report(&o);
    assert_eq!(o.status.code(), Some(0), "{}", r["summary"]);
    assert_eq!(r["failed"], 0);
    assert!(r["total"].as_u64().unwrap() > 50);
}

#[test]
fn empty_corpus_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixtures", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["summary"], "0 fixtures, all passed");
}

fn corrupted_corpus() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let good = json!([{"name": "order 5", "args": ["allowed-types", "--m", "5"], "expect": {"allowed": ["I"]}}]);
    let wrong = json!({"name": "wrong answer", "args": ["allowed-types", "--m", "5"], "expect": {"allowed": ["I", "II"]}});
    fs::write(dir.path().join("a_good.json"), good.to_string()).unwrap();
    fs::write(dir.path().join("b_wrong.json"), wrong.to_string()).unwrap();
    fs::write(dir.path().join("c_broken.json"), "[{\"name\": ").unwrap();
    dir
}

fn check_corrupted(o: &Output) {
    assert_eq!(o.status.code(), Some(2));
    let r = report(o);
    assert_eq!(r["total"], 3);
    assert_eq!(r["passed"], 1);
    let status: Vec<(String, bool)> = r["fixtures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["file"].as_str().unwrap().to_string(), f["passed"].as_bool().unwrap()))
        .collect();
    assert_eq!(
        status,
        vec![("a_good.json".into(), true), ("b_wrong.json".into(), false), ("c_broken.json".into(), false)]
    );
}

#[test]
fn corrupted_fixtures_are_isolated() {
    let dir = corrupted_corpus();
    check_corrupted(&run(&["fixtures", "--dir", dir.path().to_str().unwrap()]));
    check_corrupted(&bin().arg("fixtures").env("K3DEGEN_FIXTURES", dir.path()).output().unwrap());
}
