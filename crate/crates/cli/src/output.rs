//! Tables and documents with stable column/key order, floats at 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `x` with 17 significant digits; non-finite values keep their Rust spelling.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// An ordered JSON document. Non-finite numbers become `null`.
#[derive(Clone, Debug, PartialEq)]
pub enum Doc {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Arr(Vec<Doc>),
    Obj(Vec<(String, Doc)>),
}

impl Doc {
    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Doc)>) -> Doc {
        Doc::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(s: impl Into<String>) -> Doc {
        Doc::Str(s.into())
    }

    pub fn complex(z: periodlab_core::Complex64) -> Doc {
        Doc::Arr(vec![Doc::Num(z.re), Doc::Num(z.im)])
    }
}

impl Serialize for Doc {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Doc::Num(x) if x.is_finite() => {
                let raw = RawValue::from_string(float(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(ser)
            }
            Doc::Num(_) => ser.serialize_none(),
            Doc::Int(n) => ser.serialize_i64(*n),
            Doc::Str(s) => ser.serialize_str(s),
            Doc::Bool(b) => ser.serialize_bool(*b),
            Doc::Arr(items) => {
                let mut seq = ser.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Doc::Obj(fields) => {
                let mut map = ser.serialize_map(Some(fields.len()))?;
                for (k, v) in fields {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

/// A flat table; cells are [`Doc::Num`], [`Doc::Int`], [`Doc::Str`] or [`Doc::Bool`].
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Doc>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Doc>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_doc(&self) -> Doc {
        Doc::Arr(
            self.rows
                .iter()
                .map(|r| Doc::Obj(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => json(&self.to_doc()),
        }
    }
}

fn cell(d: &Doc) -> String {
    match d {
        Doc::Num(x) => float(*x),
        Doc::Int(n) => n.to_string(),
        Doc::Str(s) => s.clone(),
        Doc::Bool(b) => b.to_string(),
        Doc::Arr(_) | Doc::Obj(_) => String::new(),
    }
}

pub fn json(doc: &Doc) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(doc).map_err(|e| CliError::Io(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path` through a temporary file in the same directory and an atomic
/// rename, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        return Ok(stdout.flush()?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let with_path = |e: std::io::Error| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(with_path)?;
    tmp.write_all(bytes).map_err(with_path)?;
    tmp.as_file().sync_all().map_err(with_path)?;
    tmp.persist(path).map_err(|e| with_path(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["name", "x", "n", "ok"]);
        t.push(vec![Doc::str("a,b"), Doc::Num(0.1), Doc::Int(3), Doc::Bool(true)]);
        t.push(vec![Doc::str("c"), Doc::Num(f64::NAN), Doc::Int(-1), Doc::Bool(false)]);
        t
    }

    #[test]
    fn csv_and_json_share_values() {
        let t = sample();
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "name,x,n,ok\n\"a,b\",1.0000000000000001e-1,3,true\nc,NaN,-1,false\n");
        let json = String::from_utf8(t.render(Format::Json).unwrap()).unwrap();
        assert!(json.contains("\"x\": 1.0000000000000001e-1"), "{json}");
        assert!(json.contains("\"x\": null"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0]["x"].as_f64(), Some(0.1));
        let at = |k: &str| json.find(&format!("\"{k}\":")).unwrap();
        assert!(at("name") < at("x") && at("x") < at("n") && at("n") < at("ok"));
    }

    #[test]
    fn empty_documents_are_valid() {
        let t = Table::new(vec!["a"]);
        assert_eq!(t.to_csv().unwrap(), b"a\n");
        let back: serde_json::Value = serde_json::from_slice(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(back, serde_json::json!([]));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        emit(Some(&p), b"first").unwrap();
        emit(Some(&p), b"second").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
