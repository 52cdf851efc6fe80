//! Tabular experiment output: CSV and JSON rendering plus the metadata
//! sidecar. Rendering is fully deterministic — cell values print through
//! the shortest round-trip float representation and JSON keys sort
//! alphabetically — so identical configurations produce byte-identical
//! files regardless of the parallelism used to fill the rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render_csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn render_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::json!(v),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

/// Column-ordered experiment result. Column names carry the units
/// (times in `1/Gamma`, energies in units of the cold gap).
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// CSV with a header row; one data row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render_csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// JSON: a single object for one-row (scalar) results, otherwise an
    /// array of row objects.
    pub fn to_json(&self) -> String {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: BTreeMap<&str, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row.iter())
                    .map(|(name, cell)| (*name, cell.render_json()))
                    .collect();
                serde_json::json!(map)
            })
            .collect();
        let value = if objects.len() == 1 {
            objects.into_iter().next().unwrap()
        } else {
            serde_json::Value::Array(objects)
        };
        let mut text = serde_json::to_string_pretty(&value).expect("static serialization");
        text.push('\n');
        text
    }
}

/// Writes the run-metadata sidecar next to the primary output file.
pub fn write_sidecar(
    primary: &Path,
    experiment: &str,
    params: &BTreeMap<String, String>,
    mesh: usize,
    jobs: usize,
    wall_time_seconds: f64,
) -> std::io::Result<()> {
    let meta = serde_json::json!({
        "experiment": experiment,
        "params": params,
        "mesh": mesh,
        "jobs": jobs,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": wall_time_seconds,
    });
    let mut text = serde_json::to_string_pretty(&meta).expect("static serialization");
    text.push('\n');
    let path = format!("{}.meta.json", primary.display());
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_renders_header_and_rows() {
        let mut t = Table::new(vec!["x", "label"]);
        t.push(vec![Cell::Num(0.5), Cell::Text("a".into())]);
        t.push(vec![Cell::Num(1.25), Cell::Text("b".into())]);
        assert_eq!(t.to_csv(), "x,label\n0.5,a\n1.25,b\n");
    }

    #[test]
    fn json_scalar_collapses_to_object() {
        let mut t = Table::new(vec!["xi"]);
        t.push(vec![Cell::Num(0.11)]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert!(v.is_object());
        assert_eq!(v["xi"], serde_json::json!(0.11));
    }

    #[test]
    fn json_grid_is_array() {
        let mut t = Table::new(vec!["y"]);
        t.push(vec![Cell::Num(0.0)]);
        t.push(vec![Cell::Num(1.0)]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
    }
}
