//! Result rows and their CSV / JSON encodings.

use std::io::Write;
use std::path::PathBuf;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::config::Format;
use crate::error::OutputError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    /// Written as an empty CSV field and as JSON `null`.
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:?}"),
            Cell::Missing => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Text(t) => s.serialize_str(t),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Num(_) | Cell::Missing => s.serialize_none(),
        }
    }
}

/// One output record. Columns are `scenario`, the named cells in order, then `residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub cells: Vec<(&'static str, Cell)>,
    /// Disagreement between the computed result and its independent oracle.
    pub residual: f64,
    /// Largest acceptable residual.
    pub tolerance: f64,
}

impl ResultRow {
    pub fn new(scenario: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            scenario: scenario.into(),
            cells: Vec::new(),
            residual,
            tolerance,
        }
    }

    pub fn num(mut self, name: &'static str, x: f64) -> Self {
        self.cells.push((name, Cell::Num(x)));
        self
    }

    pub fn int(mut self, name: &'static str, i: i64) -> Self {
        self.cells.push((name, Cell::Int(i)));
        self
    }

    pub fn text(mut self, name: &'static str, t: impl Into<String>) -> Self {
        self.cells.push((name, Cell::Text(t.into())));
        self
    }

    pub fn cell(mut self, name: &'static str, c: Cell) -> Self {
        self.cells.push((name, c));
        self
    }

    /// True when the oracle residual is within tolerance. NaN residuals never agree.
    pub fn agrees(&self) -> bool {
        self.residual <= self.tolerance
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let mut c = vec!["scenario"];
        c.extend(self.cells.iter().map(|(n, _)| *n));
        c.push("residual");
        c
    }
}

struct JsonRow<'a>(&'a ResultRow);

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let r = self.0;
        let mut m = s.serialize_map(Some(r.cells.len() + 2))?;
        m.serialize_entry("scenario", &r.scenario)?;
        for (k, v) in &r.cells {
            m.serialize_entry(k, v)?;
        }
        m.serialize_entry("residual", &Cell::Num(r.residual))?;
        m.end()
    }
}

struct JsonRows<'a>(&'a [ResultRow]);

impl Serialize for JsonRows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for r in self.0 {
            seq.serialize_element(&JsonRow(r))?;
        }
        seq.end()
    }
}

fn check_columns(rows: &[ResultRow]) -> Result<Vec<&'static str>, OutputError> {
    let first = rows.first().ok_or(OutputError::Empty)?.columns();
    for (index, r) in rows.iter().enumerate().skip(1) {
        let cols = r.columns();
        if cols != first {
            return Err(OutputError::Columns {
                index,
                expected: first.join(","),
                found: cols.join(","),
            });
        }
    }
    Ok(first)
}

/// Encodes `rows` in memory. All rows must share one column layout.
pub fn render(rows: &[ResultRow], format: Format) -> Result<Vec<u8>, OutputError> {
    let header = check_columns(rows)?;
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let ser = |e: csv::Error| OutputError::Serialize(e.to_string());
            w.write_record(&header).map_err(ser)?;
            for r in rows {
                let mut rec = vec![r.scenario.clone()];
                rec.extend(r.cells.iter().map(|(_, c)| c.csv()));
                rec.push(Cell::Num(r.residual).csv());
                w.write_record(&rec).map_err(ser)?;
            }
            w.into_inner().map_err(|e| OutputError::Serialize(e.to_string()))
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&JsonRows(rows)).map_err(|e| OutputError::Serialize(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Writes `rows` to `dest`. Nothing is created when encoding fails.
pub fn emit_results(rows: &[ResultRow], format: Format, dest: &Destination) -> Result<(), OutputError> {
    let bytes = render(rows, format)?;
    match dest {
        Destination::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|source| OutputError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
        Destination::File(path) => std::fs::write(path, &bytes).map_err(|source| OutputError::Write {
            path: path.clone(),
            source,
        }),
    }
}
