//! Report envelope, text rendering and the JSON schema version.

use std::fmt;
use std::fmt::Write as _;
use std::time::Duration;

use polyhom::model::relfile::serialize_structure;
use polyhom::model::{FiniteStructure, PartialOpMap};
use serde::Serialize;
use serde_json::{json, Value};

use crate::Global;

/// Bumped on any incompatible change to report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Io { path: String, source: std::io::Error },
    Library(polyhom::Error),
    Usage(String),
    Report(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Report(m) => write!(f, "report: {m}"),
        }
    }
}

impl From<polyhom::Error> for CliError {
    fn from(e: polyhom::Error) -> Self {
        CliError::Library(e)
    }
}

/// What a command produced: a JSON result, its text rendering and the exit status.
pub struct Outcome {
    pub input: Option<Value>,
    pub result: Value,
    pub text: String,
    /// 1 when a budget stopped the command short of a verdict, 2 when a
    /// re-checked certificate failed.
    pub exit: u8,
    /// Raw output for `gen` in text mode.
    pub raw: bool,
}

impl Outcome {
    pub fn new(result: impl Serialize, text: String) -> Self {
        Outcome {
            input: None,
            result: serde_json::to_value(result).expect("report types serialize"),
            text,
            exit: 0,
            raw: false,
        }
    }

    pub fn input(mut self, path: &std::path::Path, a: &FiniteStructure) -> Self {
        self.input = Some(json!({
            "path": path.display().to_string(),
            "name": a.name(),
            "size": a.size(),
            "structure": serialize_structure(a),
        }));
        self
    }

    pub fn inconclusive(mut self, yes: bool) -> Self {
        if yes {
            self.exit = self.exit.max(1);
        }
        self
    }

    pub fn failed(mut self, yes: bool) -> Self {
        if yes {
            self.exit = 2;
        }
        self
    }
}

pub fn emit(command: &str, outcome: Outcome, g: &Global, elapsed: Duration) {
    if !g.json {
        print!("{}", outcome.text);
        if !outcome.raw && !outcome.text.ends_with('\n') {
            println!();
        }
        return;
    }
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "polyhom",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": command,
    });
    if let Some(input) = outcome.input {
        report["input"] = input;
    }
    report["result"] = outcome.result;
    if g.no_timing {
        strip_timing(&mut report);
    } else {
        report["timing"] = json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 });
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("values serialize"));
}

/// Removes every `elapsed` field, the only run-dependent values in a report.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed");
            map.remove("timing");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

pub fn tuple(t: &[usize]) -> String {
    let inner: Vec<String> = t.iter().map(|e| e.to_string()).collect();
    format!("({})", inner.join(","))
}

pub fn map_lines(f: &PartialOpMap) -> String {
    let mut out = String::new();
    for (args, v) in f.entries() {
        let _ = writeln!(out, "  {} -> {v}", tuple(args));
    }
    out
}
