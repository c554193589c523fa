//! Table serialization: CSV with a `#`-commented header block carrying the
//! resolved configuration, and an optional JSON mirror with the same content.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// A flat numeric table. Flag columns are encoded as 0/1; masked cells are
/// NaN and always travel with a flag column.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal formatting; `NaN` marks masked cells.
fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

pub fn table_to_csv(table: &Table, echo: &[String], version: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# readout {version}: {}\n", table.name));
    for line in echo {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    tool: &'static str,
    version: &'a str,
    table: &'a str,
    config: Vec<&'a String>,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

pub fn table_to_json(table: &Table, echo: &[String], version: &str) -> String {
    let doc = JsonDoc {
        tool: "readout",
        version,
        table: &table.name,
        config: echo.iter().collect(),
        columns: &table.columns,
        rows: &table.rows,
    };
    serde_json::to_string_pretty(&doc).expect("table serializes")
}

/// Write a table under `dir` as CSV and, when requested, a JSON mirror.
/// Returns the paths written.
pub fn write_table(
    table: &Table,
    dir: &Path,
    echo: &[String],
    version: &str,
    json_mirror: bool,
) -> io::Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{}.csv", table.name));
    fs::write(&csv_path, table_to_csv(table, echo, version))?;
    written.push(csv_path);
    if json_mirror {
        let json_path = dir.join(format!("{}.json", table.name));
        fs::write(&json_path, table_to_json(table, echo, version))?;
        written.push(json_path);
    }
    Ok(written)
}

/// Parse a CSV produced by [`table_to_csv`] back into a table (used by the
/// round-trip determinism check).
pub fn parse_csv(text: &str) -> Option<Table> {
    let mut name = String::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if name.is_empty() {
                if let Some((_, n)) = rest.rsplit_once(": ") {
                    name = n.to_string();
                }
            }
            continue;
        }
        if columns.is_empty() {
            columns = line.split(',').map(|s| s.to_string()).collect();
            continue;
        }
        let row: Option<Vec<f64>> = line
            .split(',')
            .map(|s| {
                if s == "NaN" {
                    Some(f64::NAN)
                } else {
                    s.parse().ok()
                }
            })
            .collect();
        rows.push(row?);
    }
    Some(Table {
        name,
        columns: columns.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_bit_identically() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec![1.0, 0.1 + 0.2]);
        t.push(vec![f64::NAN, 1e-17]);
        t.push(vec![55.125, -2.6508639157033587]);
        let echo = vec!["system.g0 = 100.0".to_string()];
        let csv = table_to_csv(&t, &echo, "0.1.0");
        let parsed = parse_csv(&csv).unwrap();
        let csv2 = table_to_csv(&parsed, &echo, "0.1.0");
        assert_eq!(csv, csv2);
        assert_eq!(parsed.rows[0][1].to_bits(), (0.1 + 0.2f64).to_bits());
        assert!(parsed.rows[1][0].is_nan());
    }
}
