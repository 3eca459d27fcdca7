//! Report schema and the json, csv and plain renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// One command's output: echoed inputs, result and notes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Every flag as given on the command line (or defaulted), keyed by its
    /// long name. Switches are booleans, everything else raw strings.
    pub params: BTreeMap<String, Value>,
    pub result: Value,
    pub diagnostics: Vec<String>,
    pub version: String,
}

impl Report {
    /// Arguments (without program name) that reproduce this report.
    pub fn argv(&self) -> Vec<String> {
        let mut out = vec![self.command.clone()];
        for (k, v) in &self.params {
            match v {
                Value::Bool(true) => out.push(format!("--{k}")),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => {
                    out.push(format!("--{k}"));
                    out.push(s.clone());
                }
                other => {
                    out.push(format!("--{k}"));
                    out.push(other.to_string());
                }
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
                s.push('\n');
                s
            }
            Format::Csv => render_csv(&self.result),
            Format::Plain => render_plain(&self.result),
        }
    }
}

/// Rounds every floating value to `digits` significant digits.
pub fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().expect("formatted float");
            if let Some(r) = Number::from_f64(r) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            // Whole numbers print without a trailing ".0"; everything else
            // in shortest round-trip form.
            if x.fract() == 0.0 && x.abs() < 1e15 {
                format!("{x}")
            } else {
                n.to_string()
            }
        }
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn rows(result: &Value) -> Option<&Vec<Value>> {
    result.get("rows").and_then(Value::as_array)
}

fn flat_fields(o: &Map<String, Value>) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, v) in o {
        match v {
            Value::Object(inner) => {
                out.extend(flat_fields(inner).into_iter().map(|(ik, iv)| (format!("{k}.{ik}"), iv)))
            }
            Value::Array(a) if a.iter().any(Value::is_array) => {
                out.push((k.clone(), a.iter().map(scalar).collect::<Vec<_>>().join("|")))
            }
            _ => out.push((k.clone(), scalar(v))),
        }
    }
    out
}

fn render_csv(result: &Value) -> String {
    let records: Vec<Vec<(String, String)>> = match (rows(result), result) {
        (Some(rs), _) => rs.iter().filter_map(Value::as_object).map(flat_fields).collect(),
        (None, Value::Object(o)) => vec![flat_fields(o)],
        (None, other) => vec![vec![("value".into(), scalar(other))]],
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.iter().map(|(k, _)| k)).expect("in-memory write");
    }
    for r in &records {
        w.write_record(r.iter().map(|(_, v)| v)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn render_plain(result: &Value) -> String {
    let Some(o) = result.as_object() else {
        return format!("{}\n", scalar(result));
    };
    if o.len() == 1 {
        if let Some(v) = o.values().next().filter(|v| !v.is_object() && !v.is_array()) {
            return format!("{}\n", scalar(v));
        }
    }
    let mut out = String::new();
    for (k, v) in o {
        if k == "rows" {
            continue;
        }
        match v {
            Value::Object(inner) => {
                for (ik, iv) in flat_fields(inner) {
                    out.push_str(&format!("{k}.{ik}: {iv}\n"));
                }
            }
            Value::Array(a) if a.iter().any(Value::is_array) => {
                out.push_str(&format!("{k}:\n"));
                for item in a {
                    out.push_str(&format!("  {}\n", scalar(item)));
                }
            }
            _ => out.push_str(&format!("{k}: {}\n", scalar(v))),
        }
    }
    if let Some(rs) = rows(result) {
        for r in rs.iter().filter_map(Value::as_object) {
            let line: Vec<String> = flat_fields(r).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}
