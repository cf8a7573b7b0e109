use std::io::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// One output record. The first ten fields are always present; the rest only
/// for the commands that produce them.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub command: &'static str,
    pub input: String,
    pub method: String,
    pub value: f64,
    pub error: f64,
    pub closed_form: Option<f64>,
    pub pass: Option<bool>,
    pub seed: u64,
    pub samples: u64,
    pub wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_expr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// `null` when the sup norm is infinite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_sup_norm: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<Vec<f64>>,
}

impl Row {
    pub fn new(command: &'static str, input: impl Into<String>, method: impl Into<String>, value: f64, error: f64, seed: u64) -> Self {
        Row {
            command,
            input: input.into(),
            method: method.into(),
            value,
            error,
            closed_form: None,
            pass: None,
            seed,
            samples: 0,
            wall_ms: 0,
            kind: None,
            tolerance: None,
            closed_expr: None,
            n: None,
            log_sup_norm: None,
            gap: None,
            argmax: None,
        }
    }
}

const BASE: [&str; 10] = ["command", "input", "method", "value", "error", "closed_form", "pass", "seed", "samples", "wall_ms"];

/// Extra CSV columns, fixed per command.
fn extras(command: &str) -> &'static [&'static str] {
    match command {
        "verify" | "relations" => &["tolerance", "closed_expr"],
        "list" => &["kind", "tolerance", "closed_expr"],
        "limit" => &["n", "log_sup_norm", "gap"],
        "supnorm" => &["log_sup_norm", "argmax"],
        _ => &[],
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(a)) => a.iter().map(|x| cell(Some(x))).collect::<Vec<_>>().join(";"),
        Some(other) => other.to_string(),
    }
}

fn table(command: &str, rows: &[Row]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let cols: Vec<&'static str> = BASE.iter().chain(extras(command)).copied().collect();
    let body = rows
        .iter()
        .map(|r| {
            let v = serde_json::to_value(r).expect("rows serialize");
            cols.iter().map(|c| cell(v.get(*c))).collect()
        })
        .collect();
    (cols, body)
}

pub fn render(format: Format, command: &str, rows: &[Row]) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows).expect("rows serialize");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let (cols, body) = table(command, rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&cols).expect("in-memory write");
            for r in body {
                w.write_record(&r).expect("in-memory write");
            }
            w.into_inner().expect("in-memory write")
        }
        Format::Plain => {
            let (cols, body) = table(command, rows);
            let keep: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] != "command").collect();
            let width = |i: usize| body.iter().map(|r| r[i].chars().count()).chain([cols[i].len()]).max().unwrap_or(0);
            let widths: Vec<usize> = keep.iter().map(|&i| width(i)).collect();
            let mut out = Vec::new();
            let mut line = |cells: Vec<&str>| {
                let s: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                writeln!(out, "{}", s.join("  ").trim_end()).expect("in-memory write");
            };
            line(keep.iter().map(|&i| cols[i]).collect());
            for r in &body {
                line(keep.iter().map(|&i| r[i].as_str()).collect());
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> Row {
        let mut r = Row::new("limit", "1mx", "order-stat", 0.5, 1e-14, 7);
        r.n = Some(3);
        r.log_sup_norm = Some(None);
        r.gap = Some(None);
        r
    }

    #[test]
    fn csv_columns_are_fixed() {
        let out = String::from_utf8(render(Format::Csv, "limit", &[row()])).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "command,input,method,value,error,closed_form,pass,seed,samples,wall_ms,n,log_sup_norm,gap");
        assert_eq!(lines.next().unwrap(), "limit,1mx,order-stat,0.5,1e-14,,,7,0,0,3,,");
    }

    #[test]
    fn infinite_norm_is_null() {
        let v: Value = serde_json::from_slice(&render(Format::Json, "limit", &[row()])).unwrap();
        assert_eq!(v[0]["log_sup_norm"], Value::Null);
        assert!(v[0].get("kind").is_none());
    }

    #[test]
    fn plain_drops_command() {
        let out = String::from_utf8(render(Format::Plain, "eval", &[Row::new("eval", "x-2", "exact", 0.25, 0.0, 0)])).unwrap();
        assert!(out.starts_with("input"));
        assert!(out.lines().nth(1).unwrap().starts_with("x-2"));
    }
}
