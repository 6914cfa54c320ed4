use std::fmt::Write as _;

use serde_json::{Map, Value};

pub const SCHEMA: &str = "gmtkit/1";

/// Rows for `--format csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    /// Scatter in log–log coordinates with an optional fitted line
    /// `y = slope·x + intercept` in the same coordinates.
    LogLog { x: Vec<f64>, y: Vec<f64>, fit: Option<(f64, f64)>, x_label: String, y_label: String },
    /// `(t, value)` drawn as a step function.
    Levels { points: Vec<(f64, f64)>, x_label: String, y_label: String },
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub result: Map<String, Value>,
    pub table: Option<Table>,
    pub series: Option<Series>,
    /// Extra output files, `(name, contents)`.
    pub files: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, result: Map::new(), table: None, series: None, files: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.result.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self, seed: u64, timestamp: Option<u64>) -> String {
        let mut top = Map::new();
        top.insert("schema".into(), SCHEMA.into());
        top.insert("command".into(), self.command.into());
        top.insert("seed".into(), seed.into());
        if let Some(t) = timestamp {
            top.insert("timestamp".into(), t.into());
        }
        top.insert("result".into(), Value::Object(self.result.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("report serializes");
        s.push('\n');
        s
    }

    /// The table when the command has one, otherwise `key,value` lines with
    /// nested keys joined by dots.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(t) => {
                out.push_str(&t.columns.join(","));
                out.push('\n');
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(cell).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("key,value\n");
                flatten("", &Value::Object(self.result.clone()), &mut out);
            }
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix},{}", cell(other));
        }
    }
}
