//! Table writing. CSV carries floats at 17 significant digits and JSON
//! uses serde_json's shortest round-trip form, so either format restores
//! the exact f64. All writes go through a temp file and a rename;
//! interrupted runs never leave a half-written output.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{Map, Number, Value};

use crate::config::{sidecar_path, OutputFormat, RunConfig};

#[derive(Debug, Clone)]
pub enum Field {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Field {
    fn csv_string(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) => format_float(*v),
            Field::Text(v) => v.clone(),
        }
    }

    fn json_value(&self) -> anyhow::Result<Value> {
        Ok(match self {
            Field::Int(v) => Value::Number((*v).into()),
            Field::Float(v) => Value::Number(
                Number::from_f64(*v).with_context(|| format!("non-finite value {v}"))?,
            ),
            Field::Text(v) => Value::String(v.clone()),
        })
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table(
    path: &Path,
    format: OutputFormat,
    headers: &[&str],
    rows: &[Vec<Field>],
) -> anyhow::Result<()> {
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
    }
    let bytes = match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(headers)?;
            for row in rows {
                w.write_record(row.iter().map(|f| f.csv_string()))?;
            }
            w.into_inner()?
        }
        OutputFormat::Json => {
            let mut array = Vec::with_capacity(rows.len());
            for row in rows {
                let mut obj = Map::new();
                for (h, f) in headers.iter().zip(row) {
                    obj.insert((*h).to_string(), f.json_value()?);
                }
                array.push(Value::Object(obj));
            }
            let mut bytes = serde_json::to_vec_pretty(&Value::Array(array))?;
            bytes.push(b'\n');
            bytes
        }
    };
    atomic_write(path, &bytes)
}

/// Writes `<path>.meta.json` describing the run that produced `path`.
pub fn write_sidecar(path: &Path, config: &RunConfig) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(&config.to_json())?;
    bytes.push(b'\n');
    atomic_write(&sidecar_path(path), &bytes)
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips_exactly() {
        for &x in &[0.15, 1.0 / 3.0, 7.8234512052e-5, -0.0, 1e300, 5e-324] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn csv_table_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_table(
            &path,
            OutputFormat::Csv,
            &["a", "b"],
            &[
                vec![Field::Int(1), Field::Float(0.5)],
                vec![Field::Int(2), Field::Text("x".into())],
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "a,b");
        assert_eq!(lines[1], "1,5.0000000000000000e-1");
        assert_eq!(lines[2], "2,x");
    }

    #[test]
    fn json_table_preserves_column_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_table(
            &path,
            OutputFormat::Json,
            &["z-col", "a-col"],
            &[vec![Field::Int(1), Field::Float(0.25)]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        // insertion order survives (z-col first despite sorting later)
        assert!(text.find("z-col").unwrap() < text.find("a-col").unwrap());
        let parsed: Vec<Map<String, Value>> = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0]["a-col"], Value::from(0.25));
    }
}
