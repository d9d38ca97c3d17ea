//! Report tree and its deterministic JSON and CSV encodings.
//!
//! Objects are `BTreeMap`s, so keys come out sorted. Floats are printed as
//! `{:.16e}` (17 significant digits); infinities become the strings
//! `"+inf"` and `"-inf"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gcoupling::grid::Status;
use gcoupling::ExtReal;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Value>),
    Map(BTreeMap<String, Value>),
}

impl Value {
    pub fn map() -> Self {
        Value::Map(BTreeMap::new())
    }

    /// Builder-style insert; no-op on non-maps.
    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        if let Value::Map(m) = &mut self {
            m.insert(key.to_string(), v.into());
        }
        self
    }

    pub fn point(p: &[f64]) -> Self {
        Value::List(p.iter().map(|&v| Value::Num(v)).collect())
    }

    pub fn points(ps: &[Vec<f64>]) -> Self {
        Value::List(ps.iter().map(|p| Value::point(p)).collect())
    }

    pub fn from_json(v: &serde_json::Value) -> Self {
        use serde_json::Value as J;
        match v {
            J::Null => Value::Null,
            J::Bool(b) => Value::Bool(*b),
            J::Number(n) => match n.as_i64() {
                Some(i) => Value::Int(i),
                None => Value::Num(n.as_f64().unwrap_or(f64::NAN)),
            },
            J::String(s) => Value::Str(s.clone()),
            J::Array(a) => Value::List(a.iter().map(Value::from_json).collect()),
            J::Object(o) => Value::Map(o.iter().map(|(k, v)| (k.clone(), Value::from_json(v))).collect()),
        }
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Value::List(_) | Value::Map(_))
    }

    fn scalar_text(&self) -> String {
        match self {
            Value::Null => "null".into(),
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Num(v) => format_float(*v),
            Value::Str(s) => s.clone(),
            Value::List(_) | Value::Map(_) => unreachable!("not a scalar"),
        }
    }

    fn write_json(&self, out: &mut String, indent: usize) {
        match self {
            Value::Str(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
            Value::Num(v) if !v.is_finite() => out.push_str(&format!("\"{}\"", format_float(*v))),
            Value::List(items) if items.is_empty() => out.push_str("[]"),
            Value::List(items) if items.iter().all(Value::is_scalar) => {
                out.push('[');
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    it.write_json(out, indent);
                }
                out.push(']');
            }
            Value::List(items) => {
                out.push_str("[\n");
                for (i, it) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    it.write_json(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Value::Map(m) if m.is_empty() => out.push_str("{}"),
            Value::Map(m) => {
                out.push_str("{\n");
                for (i, (k, v)) in m.iter().enumerate() {
                    pad(out, indent + 1);
                    out.push_str(&serde_json::to_string(k).expect("key encodes"));
                    out.push_str(": ");
                    v.write_json(out, indent + 1);
                    out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
            scalar => out.push_str(&scalar.scalar_text()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        self.write_json(&mut s, 0);
        s.push('\n');
        s
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// `{:.16e}` with signed infinities and no negative zero.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == 0.0 {
        format!("{:.16e}", 0.0f64)
    } else {
        format!("{v:.16e}")
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<ExtReal<f64>> for Value {
    fn from(v: ExtReal<f64>) -> Self {
        Value::Num(v.to_f64())
    }
}

impl From<Status> for Value {
    fn from(s: Status) -> Self {
        Value::Str(status_name(s).into())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Attained => "attained",
        Status::Divergent => "divergent",
        Status::EmptyDomain => "empty_domain",
    }
}

/// A value table: scalar cells only.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    /// Columns `prefix1..prefixd` followed by `rest`.
    pub fn with_coords(prefix: &str, d: usize, rest: &[&str]) -> Self {
        let mut cols: Vec<String> = (1..=d).map(|i| format!("{prefix}{i}")).collect();
        cols.extend(rest.iter().map(|s| s.to_string()));
        Self { columns: cols, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_value(&self) -> Value {
        Value::map()
            .with("columns", self.columns.iter().map(|c| Value::Str(c.clone())).collect::<Vec<_>>())
            .with("rows", self.rows.iter().map(|r| Value::List(r.clone())).collect::<Vec<_>>())
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| if c.is_scalar() { c.scalar_text() } else { String::new() }))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }
}

/// One asserted verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub inputs: Value,
    pub numeric: Value,
    pub checks: Vec<Check>,
    pub results: BTreeMap<String, Value>,
    /// Insertion order is kept; the first table is the CSV default.
    pub tables: Vec<(String, Table)>,
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(experiment: &str, inputs: Value, numeric: Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            inputs,
            numeric,
            checks: Vec::new(),
            results: BTreeMap::new(),
            tables: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<Value>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    pub fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.to_string(), t));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn to_value(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| Value::map().with("name", c.name.as_str()).with("passed", c.passed).with("detail", c.detail.clone()))
            .collect();
        let tables = Value::Map(self.tables.iter().map(|(k, t)| (k.clone(), t.to_value())).collect());
        let versions = Value::map().with("gcoupling", gcoupling::VERSION).with("gcoupling-cli", env!("CARGO_PKG_VERSION"));
        let mut v = Value::map()
            .with("experiment", self.experiment.as_str())
            .with("inputs", self.inputs.clone())
            .with("numeric", self.numeric.clone())
            .with("checks", checks)
            .with("passed", self.passed())
            .with("results", Value::Map(self.results.clone()))
            .with("tables", tables)
            .with("versions", versions);
        if let Some(t) = self.wall_time_s {
            v = v.with("wall_time_s", t);
        }
        v
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_json()
    }

    /// CSV of the named table, or of the first one.
    pub fn to_csv(&self, table: Option<&str>) -> Result<String, CliError> {
        let found = match table {
            Some(name) => self.tables.iter().find(|(k, _)| k == name),
            None => self.tables.first(),
        };
        match found {
            Some((_, t)) => t.to_csv(),
            None => {
                let mut names = String::new();
                for (i, (k, _)) in self.tables.iter().enumerate() {
                    let _ = write!(names, "{}{k}", if i > 0 { ", " } else { "" });
                }
                Err(CliError::Output(format!(
                    "no value table {}(available: {})",
                    table.map(|t| format!("`{t}` ")).unwrap_or_default(),
                    if names.is_empty() { "none".into() } else { names }
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_is_sorted_and_parses() {
        let v = Value::map().with("b", 1.5).with("a", vec![f64::INFINITY, 2.0]).with("c", Value::map().with("z", "q"));
        let text = v.to_json();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][0], "+inf");
        assert_eq!(back["b"].as_f64(), Some(1.5));
    }

    #[test]
    fn csv_uses_the_same_number_format() {
        let mut t = Table::new(&["s1", "value"]);
        t.push(vec![Value::Num(0.5), Value::Num(f64::INFINITY)]);
        assert_eq!(t.to_csv().unwrap(), "s1,value\n5.0000000000000000e-1,+inf\n");
    }
}
