//! Report tables and their text, CSV and JSON renderings.

use crate::config::{Format, RunConfig};
use serde_json::{json, Map, Value as Json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Column-oriented result of one run. `notes` become `#` comment lines in
/// CSV and a `notes` array in JSON.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    /// A single-row report from `(name, value)` pairs.
    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Cell>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self { columns, rows: vec![row], notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn check_finite(&self) -> anyhow::Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(x) = cell {
                    anyhow::ensure!(x.is_finite(), "non-finite value {x} in column `{}` of row {}", self.columns[c], i + 1);
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, cfg: &RunConfig) -> anyhow::Result<String> {
        self.check_finite()?;
        Ok(match cfg.format {
            Format::Text => self.text(),
            Format::Csv => self.csv(cfg),
            Format::Json => serde_json::to_string_pretty(&self.json(cfg))? + "\n",
        })
    }

    fn text(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            for (k, v) in self.columns.iter().zip(&self.rows[0]) {
                out += &format!("{k} = {}\n", text_cell(v));
            }
        } else {
            out += &self.columns.join(" ");
            out.push('\n');
            for row in &self.rows {
                out += &row.iter().map(text_cell).collect::<Vec<_>>().join(" ");
                out.push('\n');
            }
        }
        for n in &self.notes {
            out += &format!("# {n}\n");
        }
        out
    }

    fn csv(&self, cfg: &RunConfig) -> String {
        let mut out = format!("# braidlab {VERSION}\n");
        for line in cfg.emit().lines() {
            out += &format!("# {line}\n");
        }
        for n in &self.notes {
            out += &format!("# {n}\n");
        }
        out += &self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out += &row.iter().map(csv_cell).collect::<Vec<_>>().join(",");
            out.push('\n');
        }
        out
    }

    fn json(&self, cfg: &RunConfig) -> Json {
        let config: Map<String, Json> = cfg
            .emit()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), Json::String(v.to_string())))
            .collect();
        let records: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                Json::Object(self.columns.iter().cloned().zip(row.iter().map(json_cell)).collect::<Map<String, Json>>())
            })
            .collect();
        json!({ "version": VERSION, "config": config, "notes": self.notes, "records": records })
    }
}

/// 17 significant digits.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_num(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn text_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => crate::config::format_real(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => "-".into(),
    }
}

fn json_cell(c: &Cell) -> Json {
    match c {
        Cell::Num(x) => json!(x),
        Cell::Int(i) => json!(i),
        Cell::Text(s) => json!(s),
        Cell::Empty => Json::Null,
    }
}

/// Numeric cells of a CSV body, skipping comments and the column header.
pub fn parse_csv(text: &str) -> anyhow::Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| anyhow::anyhow!("missing column header"))?;
    let columns = header.split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|f| f.parse::<f64>().ok()).collect()).collect();
    Ok((columns, rows))
}
