//! Golden corpus: every fixtures/**/NAME.json names the arguments, the
//! standard input and the exit code; NAME.out.json holds the exact stdout.
//! Set KTRI_BLESS=1 to rewrite the expected outputs.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::Value;

fn fixture_files(dir: &Path, out: &mut Vec<PathBuf>) {
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            fixture_files(&p, out);
        } else if p.extension().is_some_and(|x| x == "json") && !p.to_string_lossy().ends_with(".out.json") {
            out.push(p);
        }
    }
}

fn run(spec: &Value) -> (i32, String) {
    let args: Vec<&str> = spec["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
    let stdin = match &spec["input"] {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        v => v.to_string(),
    };
    let mut child = Command::new(env!("CARGO_BIN_EXE_ktri"))
        .args(&args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn golden_corpus() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut files = vec![];
    fixture_files(&root, &mut files);
    files.sort();
    let rows = files.iter().filter(|p| p.parent().unwrap() == root.as_path()).count();
    assert_eq!(rows, 20, "one fixture per row of the case table");

    let bless = std::env::var_os("KTRI_BLESS").is_some();
    let mut failures = vec![];
    for f in &files {
        let spec: Value = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
        let (code, stdout) = run(&spec);
        let expected_path = f.with_extension("out.json");
        if bless {
            std::fs::write(&expected_path, &stdout).unwrap();
        }
        let expected = std::fs::read_to_string(&expected_path).unwrap_or_default();
        if code != spec["expected_exit"].as_i64().unwrap() as i32 {
            failures.push(format!("{}: exit {code}", f.display()));
        }
        if stdout != expected {
            failures.push(format!("{}: output differs", f.display()));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
