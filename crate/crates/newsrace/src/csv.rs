//! Fixed-schema CSV emission.
//!
//! Floating point values are written in scientific notation with 17
//! significant digits, which round-trips every finite `f64` bit-exactly;
//! infinities appear as `inf`. Rows of one file must share a schema.

use std::io::Write;
use std::path::Path;

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvValue {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
}

impl CsvValue {
    fn render(&self) -> String {
        match self {
            CsvValue::Int(v) => v.to_string(),
            CsvValue::UInt(v) => v.to_string(),
            CsvValue::Float(v) => format_float(*v),
            CsvValue::Text(v) => v.clone(),
        }
    }
}

/// 17 significant digits; round-trips `f64` exactly.
pub fn format_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// One output row: ordered `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub fields: Vec<(&'static str, CsvValue)>,
}

impl RecordRow {
    pub fn new(fields: Vec<(&'static str, CsvValue)>) -> Self {
        RecordRow { fields }
    }

    fn header(&self) -> Vec<&'static str> {
        self.fields.iter().map(|&(k, _)| k).collect()
    }
}

/// Renders rows as CSV text (header + rows, `\n` separators).
pub fn render_csv(header: &[&'static str], rows: &[RecordRow]) -> Result<String, HarnessError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.header() != header {
            return Err(HarnessError::Config(format!(
                "row {i} schema {:?} differs from header {header:?}",
                row.header()
            )));
        }
        let line: Vec<String> = row.fields.iter().map(|(_, v)| v.render()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Writes header + rows to `path`; all rows must share the header schema.
pub fn emit_csv(
    header: &[&'static str],
    rows: &[RecordRow],
    path: &Path,
) -> Result<(), HarnessError> {
    let text = render_csv(header, rows)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
