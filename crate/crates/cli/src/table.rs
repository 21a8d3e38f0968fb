//! Numeric CSV tables with a header row.

use std::path::Path;

use crate::config::read;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::input(format!("no column `{name}`; have {}", self.columns.join(", "))))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
    }

    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::input(format!("{}:1: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| CliError::input(format!("{}:{line}: {e}", path.display())))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        CliError::input(format!("{}:{line}: cannot parse {f:?} as a number", path.display()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(&read(path)?, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, -2.5e-7]);
        t.push(vec![0.1 + 0.2, f64::INFINITY]);
        let back = Table::from_csv(&t.to_csv(), Path::new("t.csv")).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("b").unwrap()[0], -2.5e-7);
    }

    #[test]
    fn bad_cell_names_its_line() {
        let e = Table::from_csv("a,b\n1,2\n3,x\n", Path::new("t.csv")).unwrap_err();
        assert!(e.message.contains("t.csv:3"), "{}", e.message);
    }
}
