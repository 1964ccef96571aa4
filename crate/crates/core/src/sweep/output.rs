//! Table serialization: CSV (comma, LF, mandatory header, `#` comment line
//! for the optional timestamp) and JSON (`{"spec", "columns", "rows"}`).
//! Numbers are written in shortest round-trip form, so re-parsing is
//! bit-exact. Empty cells / `null` mark values that could not be computed.

use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::spec::{Format, SweepSpec};
use crate::error::{Error, Result};

pub const STATUS_COLUMN: &str = "status";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<Option<f64>>,
    /// `ok`, or the code of the first error met at this point.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| self.rows[row].values[c])
    }

    /// Bitwise equality, treating NaN payloads as values.
    pub fn bit_eq(&self, other: &Table) -> bool {
        self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.status == b.status
                    && a.values.len() == b.values.len()
                    && a.values.iter().zip(&b.values).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits))
            })
    }
}

fn format_value(v: f64) -> String {
    // Debug formatting is the shortest string that parses back to `v`
    format!("{v:?}")
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_table<W: Write>(mut w: W, table: &Table, spec: &SweepSpec, format: Format, timestamp: bool) -> Result<()> {
    match format {
        Format::Csv => {
            if timestamp {
                writeln!(w, "# generated unix={}", unix_now())?;
            }
            let mut csv = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut w);
            let mut header = table.columns.clone();
            header.push(STATUS_COLUMN.to_string());
            csv.write_record(&header).map_err(io_err)?;
            for row in &table.rows {
                let mut rec: Vec<String> = row
                    .values
                    .iter()
                    .map(|v| v.map(format_value).unwrap_or_default())
                    .collect();
                rec.push(row.status.clone());
                csv.write_record(&rec).map_err(io_err)?;
            }
            csv.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let mut cells: Vec<Value> = r.values.iter().map(|v| json!(v)).collect();
                    cells.push(json!(r.status));
                    Value::Array(cells)
                })
                .collect();
            let mut columns = table.columns.clone();
            columns.push(STATUS_COLUMN.to_string());
            let mut doc = json!({
                "spec": spec,
                "columns": columns,
                "rows": rows,
            });
            if timestamp {
                doc["generated_unix"] = json!(unix_now());
            }
            serde_json::to_writer_pretty(&mut w, &doc).map_err(io_err)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn table_to_string(table: &Table, spec: &SweepSpec, format: Format, timestamp: bool) -> Result<String> {
    let mut buf = Vec::new();
    write_table(&mut buf, table, spec, format, timestamp)?;
    String::from_utf8(buf).map_err(io_err)
}

fn split_status(mut header: Vec<String>) -> Result<Vec<String>> {
    if header.last().map(String::as_str) != Some(STATUS_COLUMN) {
        return Err(Error::InvalidSpec("table has no trailing status column".into()));
    }
    header.pop();
    Ok(header)
}

pub fn read_table<R: Read>(r: R, format: Format) -> Result<Table> {
    match format {
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
            let header: Vec<String> = rdr.headers().map_err(io_err)?.iter().map(str::to_string).collect();
            let columns = split_status(header)?;
            let mut rows = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(io_err)?;
                let n = rec.len();
                if n != columns.len() + 1 {
                    return Err(Error::InvalidSpec(format!("row has {n} cells, expected {}", columns.len() + 1)));
                }
                let values = rec
                    .iter()
                    .take(n - 1)
                    .map(|c| {
                        if c.is_empty() {
                            Ok(None)
                        } else {
                            c.parse::<f64>()
                                .map(Some)
                                .map_err(|_| Error::InvalidSpec(format!("bad number '{c}'")))
                        }
                    })
                    .collect::<Result<_>>()?;
                rows.push(Row {
                    values,
                    status: rec[n - 1].to_string(),
                });
            }
            Ok(Table { columns, rows })
        }
        Format::Json => {
            let doc: Value = serde_json::from_reader(r).map_err(io_err)?;
            let bad = || Error::InvalidSpec("malformed JSON table".into());
            let header: Vec<String> = doc["columns"]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|c| c.as_str().map(str::to_string).ok_or_else(bad))
                .collect::<Result<_>>()?;
            let columns = split_status(header)?;
            let rows = doc["rows"]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|r| {
                    let cells = r.as_array().ok_or_else(bad)?;
                    if cells.len() != columns.len() + 1 {
                        return Err(bad());
                    }
                    let values = cells[..columns.len()]
                        .iter()
                        .map(|c| if c.is_null() { Ok(None) } else { c.as_f64().map(Some).ok_or_else(bad) })
                        .collect::<Result<_>>()?;
                    let status = cells[columns.len()].as_str().ok_or_else(bad)?.to_string();
                    Ok(Row { values, status })
                })
                .collect::<Result<_>>()?;
            Ok(Table { columns, rows })
        }
    }
}
