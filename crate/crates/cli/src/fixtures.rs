//! The fixture corpus: JSON files holding lists of
//! `{name, args, exit, expect}` records. `expect` is matched as a subset of
//! the command's report: objects by key, arrays element by element.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::{execute, CliError, Outcome, EXIT_OK};

pub const FIXTURES_ENV: &str = "K3DEGEN_FIXTURES";

const BUILTIN: &[(&str, &str)] = &[
    ("decision_engine.json", include_str!("../fixtures/decision_engine.json")),
    ("elliptic_families.json", include_str!("../fixtures/elliptic_families.json")),
    ("kulikov_types.json", include_str!("../fixtures/kulikov_types.json")),
    ("lattices.json", include_str!("../fixtures/lattices.json")),
    ("orders.json", include_str!("../fixtures/orders.json")),
    ("orientation.json", include_str!("../fixtures/orientation.json")),
    ("supersingular.json", include_str!("../fixtures/supersingular.json")),
    ("wild_lifts.json", include_str!("../fixtures/wild_lifts.json")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture {
    name: String,
    args: Vec<Value>,
    #[serde(default)]
    exit: i32,
    #[serde(default)]
    expect: Value,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FixtureFile {
    Many(Vec<Fixture>),
    One(Fixture),
}

/// Checks that every key and element of `want` occurs in `got`.
pub fn subset_match(want: &Value, got: &Value, path: &str) -> Result<(), String> {
    match (want, got) {
        (Value::Object(w), Value::Object(g)) => {
            for (k, wv) in w {
                let p = format!("{path}.{k}");
                let gv = g.get(k).ok_or_else(|| format!("{p} missing"))?;
                subset_match(wv, gv, &p)?;
            }
            Ok(())
        }
        (Value::Array(w), Value::Array(g)) => {
            if w.len() != g.len() {
                return Err(format!("{path}: expected {} elements, got {}", w.len(), g.len()));
            }
            for (i, (wv, gv)) in w.iter().zip(g).enumerate() {
                subset_match(wv, gv, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (Value::Null, _) => Ok(()),
        _ if want == got => Ok(()),
        _ => Err(format!("{path}: expected {want}, got {got}")),
    }
}

fn arg_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn run_fixture(f: &Fixture) -> Result<(), String> {
    let args: Vec<String> = f.args.iter().map(arg_string).collect();
    if args.first().map(String::as_str) == Some("fixtures") {
        return Err("fixtures may not run the corpus".into());
    }
    let Outcome { code, report } = execute(&args, &mut io::empty()).map_err(|e| format!("usage error: {e}"))?;
    if code != f.exit {
        let why = report.get("summary").and_then(Value::as_str).unwrap_or("");
        return Err(format!("exit {code}, expected {}: {why}", f.exit));
    }
    subset_match(&f.expect, &report, "$")
}

fn corpus_files(dir: Option<&Path>) -> Result<Vec<(String, String)>, CliError> {
    let Some(dir) = dir else {
        return Ok(BUILTIN.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect());
    };
    let read_err = |source| CliError::Read { path: dir.display().to_string(), source };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(read_err)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(|source| CliError::Read { path: p.display().to_string(), source })?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, text))
        })
        .collect()
}

pub(crate) fn run_corpus(dir: Option<PathBuf>) -> Result<Outcome, CliError> {
    let dir = dir.or_else(|| std::env::var_os(FIXTURES_ENV).map(PathBuf::from));
    let files = corpus_files(dir.as_deref())?;
    let mut results = Vec::new();
    for (file, text) in &files {
        match serde_json::from_str::<FixtureFile>(text) {
            Ok(parsed) => {
                let list = match parsed {
                    FixtureFile::Many(v) => v,
                    FixtureFile::One(f) => vec![f],
                };
                for f in list {
                    let r = run_fixture(&f);
                    let mut entry = json!({"file": file, "name": f.name, "passed": r.is_ok()});
                    if let Err(why) = r {
                        entry["detail"] = json!(why);
                    }
                    results.push(entry);
                }
            }
            Err(e) => results.push(json!({
                "file": file,
                "name": file,
                "passed": false,
                "detail": format!("unreadable fixture file: {e}"),
            })),
        }
    }
    let passed = results.iter().filter(|r| r["passed"] == json!(true)).count();
    let failed = results.len() - passed;
    let source = match &dir {
        Some(d) => d.display().to_string(),
        None => "builtin".to_string(),
    };
    let summary = if failed == 0 {
        format!("{} fixtures, all passed", results.len())
    } else {
        format!("{} fixtures, {failed} failed", results.len())
    };
    let report = json!({
        "input": {"source": source},
        "total": results.len(),
        "passed": passed,
        "failed": failed,
        "fixtures": results,
        "summary": summary,
    });
    Ok(Outcome { code: if failed == 0 { EXIT_OK } else { crate::EXIT_CONSTRAINT }, report })
}
