//! Tabular output: CSV with a header row, or a JSON array of row objects.
//!
//! Floats are written with 17 significant digits in both formats, so the two
//! encode identical values and repeated runs are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use mirrorcut::experiments::{HeatmapGrid, SweepRecord, Value};
use mirrorcut::fmt::sci17;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Internal(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Columns are taken from the first record; an empty slice gives `fallback`.
    pub fn from_records(records: &[SweepRecord], fallback: &[&str]) -> Result<Self, CliError> {
        let columns: Vec<&str> = match records.first() {
            Some(r) => r.columns().collect(),
            None => fallback.to_vec(),
        };
        let mut table = Self::new(columns.iter().copied());
        for r in records {
            if !r.columns().eq(columns.iter().copied()) {
                return Err(CliError::Internal(format!("{} row {} has a different layout", r.experiment, r.index)));
            }
            table.push(r.fields.iter().map(|(_, v)| v.clone()).collect())?;
        }
        Ok(table)
    }

    /// Header `n,m1..mM`, one row per left mode.
    pub fn from_heatmap(grid: &HeatmapGrid) -> Self {
        let mut table = Self::new(std::iter::once("n".to_string()).chain((1..=grid.size()).map(|m| format!("m{m}"))));
        for (i, row) in grid.rows().enumerate() {
            let mut cells = vec![Value::from(i + 1)];
            cells.extend(row.iter().map(|&x| Value::Real(x)));
            table.rows.push(cells);
        }
        table
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        push_csv_line(&mut out, self.columns.iter().map(|c| csv_field(c)));
        for row in &self.rows {
            push_csv_line(&mut out, row.iter().map(csv_cell));
        }
        out
    }

    pub fn to_json(&self) -> String {
        if self.rows.is_empty() {
            return "[]\n".to_string();
        }
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("  {");
            for (j, (name, value)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", json_string(name), json_cell(value));
            }
            out.push_str(if i + 1 == self.rows.len() { "}\n" } else { "},\n" });
        }
        out.push_str("]\n");
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Write to `path`, replacing any existing file, or to stdout when `None`.
pub fn write(table: &Table, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::io(p, source)),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::io(Path::new("<stdout>"), source))
        }
    }
}

fn push_csv_line(out: &mut String, cells: impl Iterator<Item = String>) {
    for (i, cell) in cells.enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&cell);
    }
    out.push('\n');
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Int(i) => i.to_string(),
        Value::Real(x) => sci17(*x),
        Value::Text(s) => csv_field(s),
        Value::Null => String::new(),
    }
}

fn json_string(text: &str) -> String {
    serde_json::to_string(text).expect("strings always serialise")
}

fn json_cell(value: &Value) -> String {
    match value {
        Value::Int(i) => i.to_string(),
        Value::Real(x) if x.is_finite() => sci17(*x),
        Value::Real(_) | Value::Null => "null".to_string(),
        Value::Text(s) => json_string(s),
    }
}
