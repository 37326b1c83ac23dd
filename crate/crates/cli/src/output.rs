//! Output sinks and table formatting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};
use whichpath_core::sweep::{Cell, Row, SweepSpec};

use crate::config::RunConfig;

pub const TRUNCATION_MARKER: &str = "# truncated: interrupted before all rows were written";

/// Opens the configured destination, or standard output.
pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// The resolved configuration as `#` comment lines.
pub fn config_comment(cfg: &RunConfig, command: &str) -> String {
    let mut s = format!("# whichpath {command} {}\n", env!("CARGO_PKG_VERSION"));
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    s
}

pub fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("configuration serializes")
}

pub fn number(v: f64) -> String {
    format!("{v}")
}

pub fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Number(v) => number(*v),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(t) => (*t).to_string(),
        Cell::Missing => String::new(),
    }
}

pub fn sweep_header(spec: &SweepSpec) -> Vec<String> {
    let mut h = vec!["index".to_string()];
    h.extend(spec.axes.iter().map(|a| a.parameter.as_str().to_string()));
    h.extend(spec.outputs.iter().map(|q| q.as_str().to_string()));
    h.push("error".into());
    h.push("error_message".into());
    h
}

pub fn sweep_record(row: &Row) -> Vec<String> {
    let mut r = vec![row.index.to_string()];
    r.extend(row.coordinates.iter().map(|v| number(*v)));
    r.extend(row.values.iter().map(cell_text));
    match &row.error {
        Some(e) => {
            r.push(e.code.to_string());
            r.push(e.message.clone());
        }
        None => {
            r.push(String::new());
            r.push(String::new());
        }
    }
    r
}

pub fn sweep_json(spec: &SweepSpec, row: &Row) -> Value {
    let mut m = Map::new();
    m.insert("index".into(), json!(row.index));
    for (a, v) in spec.axes.iter().zip(&row.coordinates) {
        m.insert(a.parameter.as_str().into(), json!(v));
    }
    for (q, c) in spec.outputs.iter().zip(&row.values) {
        m.insert(q.as_str().into(), serde_json::to_value(c).expect("cell serializes"));
    }
    m.insert(
        "error".into(),
        match &row.error {
            Some(e) => json!({"code": e.code, "message": e.message}),
            None => Value::Null,
        },
    );
    Value::Object(m)
}

/// CSV rows of string fields, quoted as needed.
pub fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
