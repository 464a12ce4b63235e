//! CSV and JSON writers.
//!
//! CSV floats carry 17 significant digits, enough to read back the exact
//! binary64 value. The first line is a `#` comment with the program version.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
}

impl Cell {
    fn text(self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Cell::Num(x) => s.serialize_f64(x),
            Cell::Int(i) => s.serialize_u64(i as u64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn header_comment(mode: &str) -> String {
    format!("# ionospec {} {mode}\n", env!("CARGO_PKG_VERSION"))
}

pub fn write_csv<W: Write>(out: W, mode: &str, table: &Table) -> io::Result<()> {
    let mut out = out;
    out.write_all(header_comment(mode).as_bytes())?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.text()))?;
    }
    w.flush()
}

/// One top-level JSON object followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Writes to `path`, or standard output when `path` is `None`.
pub fn with_output<F>(path: Option<&Path>, f: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut file)?;
            file.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

/// Reads back a CSV written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), csv::Error> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let values = [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0];
        let mut t = Table::new(&["x", "i"]);
        for (i, v) in values.iter().enumerate() {
            t.push(vec![Cell::Num(*v), Cell::Int(i)]);
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, "test", &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# ionospec "));
        assert!(text.ends_with('\n'));
        let (header, rows) = read_csv(&text).unwrap();
        assert_eq!(header, ["x", "i"]);
        for (row, v) in rows.iter().zip(values) {
            assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
