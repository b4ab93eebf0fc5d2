//! CSV tables with a leading `#schema` line.

use std::path::Path;

use crate::failure::Failure;

pub struct Table {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip form; infinities print as `inf`.
pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Table {
    pub fn new(schema: &'static str, header: Vec<&'static str>) -> Self {
        Self { schema, header, rows: Vec::new() }
    }

    pub fn render(&self) -> Result<String, Failure> {
        let mut out = format!("#schema {}\n", self.schema).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, self.render()?)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

/// Columns of a CSV table by name; empty cells become `None`.
pub struct Columns {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Columns {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>, Failure> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Io(format!("missing column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[i].parse::<f64>().ok()).collect())
    }
}
