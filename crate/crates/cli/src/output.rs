//! Tabular artifacts: a metadata block plus fixed numeric columns, written
//! as CSV or JSON and always replaced atomically.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Key/value pairs in insertion order.
    pub metadata: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// `# key = <json>` lines, a header row, then `{:.16e}` values.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let metadata: Map<String, Value> = self.metadata.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), float(*v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc =
            serde_json::json!({ "metadata": metadata, "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables are always serializable");
        text.push('\n');
        text
    }

    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut metadata = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().ok_or("missing header row")?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (key, value) = meta
                        .split_once(" = ")
                        .ok_or_else(|| format!("bad metadata line `{line}`"))?;
                    let value = serde_json::from_str(value)
                        .map_err(|e| format!("metadata `{key}`: {e}"))?;
                    metadata.push((key.to_string(), value));
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|e| format!("row {}: {e}", i + 1))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!(
                    "row {} has {} cells, expected {}",
                    i + 1,
                    row.len(),
                    columns.len()
                ));
            }
            rows.push(row);
        }
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let metadata = doc["metadata"]
            .as_object()
            .ok_or("missing metadata object")?
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let columns: Vec<String> = doc["columns"]
            .as_array()
            .ok_or("missing columns")?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_string)
                    .ok_or("column names must be strings")
            })
            .collect::<std::result::Result<_, _>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or("missing rows")?
            .iter()
            .map(|row| {
                columns
                    .iter()
                    .map(|c| {
                        unfloat(&row[c.as_str()])
                            .ok_or_else(|| format!("bad value in column `{c}`"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }
}

/// JSON has no non-finite numbers; those are written as strings.
pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(v.to_string()))
}

fn unfloat(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
