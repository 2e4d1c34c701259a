//! Serialization of run results.
//!
//! JSON documents have the shape
//! `{"inputs": {..}, "outputs": {..}, "rows": [..]?, "meta": {"version", "command", "constants"}}`
//! where every leaf is a number, string, boolean or `null` (non-finite numbers).
//! CSV carries `rows` when present and a single `outputs` row otherwise.

use std::io::Write;

use serde_json::{Map, Number, Value};

use gravclock::PhysicalConstants;

use crate::params::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Flag(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Text(x.to_string())
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(x) => format_number(*x),
            Field::Int(n) => n.to_string(),
            Field::Text(s) => s.clone(),
            Field::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(x) if x.is_finite() => {
                Value::Number(format_number(*x).parse::<Number>().expect("formatted finite float is valid JSON"))
            }
            Field::Num(_) => Value::Null,
            Field::Int(n) => Value::Number((*n).into()),
            Field::Text(s) => Value::String(s.clone()),
            Field::Flag(b) => Value::Bool(*b),
        }
    }
}

pub type Record = Vec<(String, Field)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub constants: PhysicalConstants,
    pub inputs: Record,
    pub outputs: Record,
    pub rows: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str, constants: PhysicalConstants) -> Self {
        Self { command, constants, inputs: Vec::new(), outputs: Vec::new(), rows: None }
    }

    pub fn input(mut self, name: &str, value: impl Into<Field>) -> Self {
        self.inputs.push((name.to_string(), value.into()));
        self
    }

    pub fn output(mut self, name: &str, value: impl Into<Field>) -> Self {
        self.outputs.push((name.to_string(), value.into()));
        self
    }

    pub fn to_json(&self) -> Value {
        let object = |r: &Record| Value::Object(r.iter().map(|(k, v)| (k.clone(), v.json())).collect());
        let k = &self.constants;
        let constants: Record =
            vec![("c".into(), k.c.into()), ("G".into(), k.g.into()), ("hbar".into(), k.hbar.into())];
        let mut meta = Map::new();
        meta.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        meta.insert("command".into(), Value::String(self.command.into()));
        meta.insert("constants".into(), object(&constants));
        let mut doc = Map::new();
        doc.insert("inputs".into(), object(&self.inputs));
        doc.insert("outputs".into(), object(&self.outputs));
        if let Some(t) = &self.rows {
            let rows = t
                .rows
                .iter()
                .map(|row| Value::Object(t.columns.iter().cloned().zip(row.iter().map(Field::json)).collect()))
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
        }
        doc.insert("meta".into(), Value::Object(meta));
        Value::Object(doc)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out).map_err(|e| CliError::Io(e.to_string()))
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io = |e: csv::Error| CliError::Io(e.to_string());
                match &self.rows {
                    Some(t) => {
                        w.write_record(&t.columns).map_err(io)?;
                        for row in &t.rows {
                            w.write_record(row.iter().map(Field::csv)).map_err(io)?;
                        }
                    }
                    None => {
                        w.write_record(self.outputs.iter().map(|(k, _)| k)).map_err(io)?;
                        w.write_record(self.outputs.iter().map(|(_, v)| v.csv())).map_err(io)?;
                    }
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

fn is_leaf(v: &Value) -> bool {
    matches!(v, Value::Number(_) | Value::String(_) | Value::Bool(_) | Value::Null)
}

fn leaf_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, String> {
    let m = v.as_object().ok_or_else(|| format!("{what} is not an object"))?;
    match m.iter().find(|(_, x)| !is_leaf(x)) {
        Some((k, _)) => Err(format!("{what}.{k} is not a scalar")),
        None => Ok(m),
    }
}

/// Checks a document against the layout described in the module docs.
pub fn validate_document(doc: &Value) -> Result<(), String> {
    let top = doc.as_object().ok_or("document is not an object")?;
    for key in top.keys() {
        if !["inputs", "outputs", "rows", "meta"].contains(&key.as_str()) {
            return Err(format!("unexpected top-level key '{key}'"));
        }
    }
    for key in ["inputs", "outputs", "meta"] {
        if !top.contains_key(key) {
            return Err(format!("missing '{key}'"));
        }
    }
    leaf_object(&top["inputs"], "inputs")?;
    leaf_object(&top["outputs"], "outputs")?;
    let meta = top["meta"].as_object().ok_or("meta is not an object")?;
    meta.get("version").and_then(Value::as_str).ok_or("meta.version missing")?;
    meta.get("command").and_then(Value::as_str).ok_or("meta.command missing")?;
    let constants = leaf_object(meta.get("constants").ok_or("meta.constants missing")?, "meta.constants")?;
    for k in ["c", "G", "hbar"] {
        constants.get(k).and_then(Value::as_f64).ok_or_else(|| format!("meta.constants.{k} missing"))?;
    }
    if let Some(rows) = top.get("rows") {
        let rows = rows.as_array().ok_or("rows is not an array")?;
        let mut keys: Option<Vec<&String>> = None;
        for (i, row) in rows.iter().enumerate() {
            let m = leaf_object(row, &format!("rows[{i}]"))?;
            let these: Vec<&String> = m.keys().collect();
            match &keys {
                Some(k) if *k != these => return Err(format!("rows[{i}] has different columns")),
                Some(_) => {}
                None => keys = Some(these),
            }
        }
    }
    Ok(())
}
