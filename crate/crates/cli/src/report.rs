//! Report tables with deterministic CSV and JSON encodings.
//!
//! CSV: header row, RFC-4180 quoting, floats at 17 significant digits, UNIX
//! newlines. Identical tables serialize to identical bytes.

use std::io::Write;

use shapaudit_core::{fmt_f64, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    UInt(u64),
    Float(f64),
    /// Emitted as 0/1.
    Flag(bool),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::UInt(u) => u.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Flag(b) => if *b { "1" } else { "0" }.to_string(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::UInt(u) => serde_json::json!(u),
            Cell::Float(x) => serde_json::json!(x),
            Cell::Flag(b) => serde_json::json!(if *b { 1 } else { 0 }),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&str>) -> Table {
        Table {
            header: header.into_iter().map(str::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        writer
            .write_record(&self.header)
            .map_err(|e| shapaudit_core::Error::Io(std::io::Error::other(e)))?;
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv_field).collect();
            writer
                .write_record(&fields)
                .map_err(|e| shapaudit_core::Error::Io(std::io::Error::other(e)))?;
        }
        writer.flush().map_err(shapaudit_core::Error::Io)?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json_value))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        serde_json::to_writer_pretty(w, &objects)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
