//! Output formats. Every command produces a [`Report`]: a schema name, a
//! column list and rows of cells, rendered as a plain table, CSV or JSON
//! lines.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[value(name = "plain")]
    PlainTable,
    #[value(name = "csv")]
    Csv,
    #[value(name = "jsonl")]
    JsonLines,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Missing,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Bump the version whenever the columns of a schema change.
const SCHEMA_VERSION: u32 = 1;

pub struct Report {
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Self {
            schema,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `frogcrit.<schema>.v<version>`, the first CSV header field and the
    /// `schema` key of every JSON line.
    pub fn schema_id(&self) -> String {
        format!("frogcrit.{}.v{SCHEMA_VERSION}", self.schema)
    }

    pub fn write(&self, format: OutputFormat, out: &mut impl Write) -> io::Result<()> {
        match format {
            OutputFormat::PlainTable => self.write_plain(out),
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::JsonLines => self.write_jsonl(out),
        }
    }

    fn write_plain(&self, out: &mut impl Write) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(plain).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, name)| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([name.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: Vec<&str>| {
            let padded: Vec<String> = fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect();
            padded.join("  ")
        };
        writeln!(out, "{}", line(self.columns.clone()))?;
        for row in &cells {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec![self.schema_id()];
        header.extend(self.columns.iter().map(|c| c.to_string()));
        w.write_record(&header)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut record = vec![(i + 1).to_string()];
            record.extend(row.iter().map(exact));
            w.write_record(&record)?;
        }
        w.flush()
    }

    fn write_jsonl(&self, out: &mut impl Write) -> io::Result<()> {
        let schema = json_string(&self.schema_id());
        for row in &self.rows {
            let mut line = format!("{{\"schema\":{schema}");
            for (name, cell) in self.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Text(s) => json_string(s),
                    Cell::Missing => "null".into(),
                    Cell::Float(v) if !v.is_finite() => "null".into(),
                    other => exact(other),
                };
                line.push_str(&format!(",{}:{value}", json_string(name)));
            }
            line.push('}');
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialise")
}

fn plain(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format!("{v:.6}"),
        Cell::Text(s) => s.clone(),
        Cell::Missing => "-".into(),
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn exact(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format!("{v:.16e}"),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["d", "value", "note", "gap"]);
        r.push(vec![2u32.into(), 0.1.into(), "a,b".into(), None.into()]);
        r.push(vec![
            10u32.into(),
            (1.0 / 3.0).into(),
            "x".into(),
            Some(0.125).into(),
        ]);
        r
    }

    fn render(format: OutputFormat) -> String {
        let mut buf = Vec::new();
        sample().write(format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn plain_uses_six_decimals() {
        let text = render(OutputFormat::PlainTable);
        assert!(
            text.contains("0.100000") && text.contains("0.333333") && text.contains("0.125000")
        );
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn csv_round_trips() {
        let text = render(OutputFormat::Csv);
        assert!(text.starts_with("frogcrit.demo.v1,d,value,note,gap\n"));
        assert!(!text.contains('\r'));
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(rows[1][2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(&rows[0][3], "a,b");
        assert_eq!(&rows[0][4], "");
    }

    #[test]
    fn json_lines_round_trip() {
        let text = render(OutputFormat::JsonLines);
        let rows: Vec<serde_json::Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(rows[0]["schema"], "frogcrit.demo.v1");
        assert_eq!(rows[1]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(rows[0]["gap"].is_null());
    }
}
