#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_apekit");

pub fn apekit(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn apekit")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn json_file(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// Drops the run timestamp so reports from separate runs compare equal.
pub fn without_timestamp(mut v: Value) -> Value {
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.remove("timestamp");
    }
    v
}

pub fn write_lines(path: &Path, lines: &[String]) {
    let mut s = String::new();
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

pub fn jsonl(rows: &[(String, String, String, String)]) -> String {
    rows.iter()
        .map(|(id, s, m, p)| serde_json::json!({"id": id, "src": s, "mt": m, "pe": p}).to_string() + "\n")
        .collect()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
