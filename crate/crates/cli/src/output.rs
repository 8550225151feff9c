//! Report records and their json-lines / CSV encodings.
//!
//! Every number is written as `{:.16e}` (17 significant digits) in both
//! encodings, so a value read back from either one is the same f64.

use std::collections::BTreeMap;
use std::io::{self, Write};

use qops::identity_suite::{CheckResult, Param};
use serde_json::Value;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Text(String),
    Bool(bool),
    Int(u64),
    Null,
    Params(BTreeMap<String, Param>),
}

pub type Row = Vec<(&'static str, Field)>;

/// Suite metadata attached to every record.
#[derive(Debug, Clone)]
pub struct Meta {
    pub version: String,
    pub config_hash: String,
    pub timestamp: u64,
}

impl Meta {
    fn fields(&self) -> [(&'static str, Field); 3] {
        [
            ("version", Field::Text(self.version.clone())),
            ("config_hash", Field::Text(self.config_hash.clone())),
            ("timestamp", Field::Int(self.timestamp)),
        ]
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        num(x)
    } else {
        "null".into()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_params(p: &BTreeMap<String, Param>) -> String {
    let body: Vec<String> = p
        .iter()
        .map(|(k, v)| {
            let v = match v {
                Param::Num(x) => json_num(*x),
                Param::Text(t) => json_str(t),
            };
            format!("{}:{v}", json_str(k))
        })
        .collect();
    format!("{{{}}}", body.join(","))
}

fn json_field(f: &Field) -> String {
    match f {
        Field::Num(x) => json_num(*x),
        Field::Text(t) => json_str(t),
        Field::Bool(b) => b.to_string(),
        Field::Int(n) => n.to_string(),
        Field::Null => "null".into(),
        Field::Params(p) => json_params(p),
    }
}

fn csv_field(f: &Field) -> String {
    match f {
        Field::Num(x) if x.is_finite() => num(*x),
        Field::Num(_) | Field::Null => String::new(),
        Field::Text(t) => t.clone(),
        Field::Bool(b) => b.to_string(),
        Field::Int(n) => n.to_string(),
        Field::Params(p) => json_params(p),
    }
}

pub fn check_row(r: &CheckResult, meta: &Meta, deterministic: bool) -> Row {
    let mut row = vec![
        ("check_name", Field::Text(r.check_name.clone())),
        ("params", Field::Params(r.params.clone())),
        ("lhs_re", Field::Num(r.lhs.re)),
        ("lhs_im", Field::Num(r.lhs.im)),
        ("rhs_re", Field::Num(r.rhs.re)),
        ("rhs_im", Field::Num(r.rhs.im)),
        ("abs_err", Field::Num(r.abs_err)),
        ("rel_err", Field::Num(r.rel_err)),
        ("tolerance", Field::Num(r.tolerance)),
        ("passed", Field::Bool(r.passed)),
        ("runtime_ms", Field::Num(if deterministic { 0.0 } else { r.runtime_ms })),
    ];
    row.extend(meta.fields());
    row
}

pub fn eval_row(target: &str, inputs: BTreeMap<String, Param>, value: Result<(f64, f64, f64), String>, meta: &Meta) -> Row {
    let (re, im, err, msg) = match value {
        Ok((re, im, err)) => (Field::Num(re), Field::Num(im), Field::Num(err), Field::Null),
        Err(e) => (Field::Null, Field::Null, Field::Null, Field::Text(e)),
    };
    let mut row = vec![
        ("target", Field::Text(target.into())),
        ("params", Field::Params(inputs)),
        ("re", re),
        ("im", im),
        ("quad_err", err),
        ("error", msg),
    ];
    row.extend(meta.fields());
    row
}

/// Writes rows in either encoding; the CSV header comes from the first row.
pub enum Sink<W: Write> {
    Json(W),
    Csv { out: csv::Writer<W>, header_done: bool },
}

impl<W: Write> Sink<W> {
    pub fn new(format: Format, out: W) -> Self {
        match format {
            Format::JsonLines => Sink::Json(out),
            Format::Csv => Sink::Csv {
                out: csv::Writer::from_writer(out),
                header_done: false,
            },
        }
    }

    pub fn write(&mut self, row: &Row) -> io::Result<()> {
        match self {
            Sink::Json(out) => {
                let body: Vec<String> = row.iter().map(|(k, v)| format!("{}:{}", json_str(k), json_field(v))).collect();
                writeln!(out, "{{{}}}", body.join(","))?;
                out.flush()
            }
            Sink::Csv { out, header_done } => {
                if !*header_done {
                    out.write_record(row.iter().map(|(k, _)| *k))?;
                    *header_done = true;
                }
                out.write_record(row.iter().map(|(_, v)| csv_field(v)))?;
                out.flush()
            }
        }
    }
}

/// One check record as read back from a json-lines report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadRecord {
    pub check_name: String,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ReadRecord {
    /// The verdict recomputed from the stored errors and tolerance.
    pub fn verdict(&self) -> bool {
        self.abs_err <= self.tolerance || self.rel_err <= self.tolerance
    }
}

pub fn parse_line(line: &str) -> Result<ReadRecord, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let text = |k: &str| v.get(k).and_then(Value::as_str).map(str::to_string).ok_or(format!("missing `{k}`"));
    // null encodes a non-finite number
    let number = |k: &str| match v.get(k) {
        Some(Value::Null) => Ok(f64::NAN),
        Some(x) => x.as_f64().ok_or(format!("`{k}` is not a number")),
        None => Err(format!("missing `{k}`")),
    };
    Ok(ReadRecord {
        check_name: text("check_name")?,
        abs_err: number("abs_err")?,
        rel_err: number("rel_err")?,
        tolerance: number("tolerance")?,
        passed: v.get("passed").and_then(Value::as_bool).ok_or("missing `passed`")?,
    })
}
