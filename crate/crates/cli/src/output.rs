use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

/// Result of one subcommand in all three renderings.
pub struct Report {
    pub json: Value,
    /// `key: value` lines heading the plain rendering.
    pub summary: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    /// One row per index; the CSV body.
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(json: &impl Serialize, header: Vec<&'static str>) -> Self {
        Report {
            json: serde_json::to_value(json).expect("serializable report"),
            summary: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn line(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.summary.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Plain => {
                for (k, v) in &self.summary {
                    writeln!(out, "{k}: {v}")?;
                }
                if !self.rows.is_empty() {
                    if !self.summary.is_empty() {
                        writeln!(out)?;
                    }
                    writeln!(out, "{}", self.header.join("\t"))?;
                    for r in &self.rows {
                        writeln!(out, "{}", r.join("\t"))?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Joins displayable items with `sep`.
pub fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}
