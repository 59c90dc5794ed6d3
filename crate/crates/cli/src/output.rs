//! Named report sections and their CSV, table and JSON renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Section {
    pub fn new(name: &str, headers: &[&str], json: Value) -> Self {
        Section { name: name.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new(), json }
    }

    /// Builds a section from CSV text with a header line.
    pub fn from_csv(name: &str, text: &str, json: Value) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader.headers().map_err(CliError::internal)?.iter().map(String::from).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()
            .map_err(CliError::internal)?;
        Ok(Section { name: name.into(), headers, rows, json })
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&self.headers, &mut out);
        for r in &self.rows {
            line(r, &mut out);
        }
        out
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Table => self.table(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable") + "\n",
        }
    }
}

/// Writes one file per section into `out`, or everything to stdout with
/// `# name` headers (a single JSON object for the JSON format).
pub fn emit(
    sections: &[Section],
    format: Format,
    out: Option<&Path>,
    stdout: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(CliError::io)?;
        for s in sections {
            fs::write(dir.join(format!("{}.{}", s.name, format.extension())), s.render(format))
                .map_err(CliError::io)?;
        }
        return Ok(());
    }
    let text = if format == Format::Json {
        let map: serde_json::Map<String, Value> = sections.iter().map(|s| (s.name.clone(), s.json.clone())).collect();
        serde_json::to_string_pretty(&Value::Object(map)).expect("serializable") + "\n"
    } else {
        let mut text = String::new();
        for (i, s) in sections.iter().enumerate() {
            if i > 0 {
                text.push('\n');
            }
            let _ = writeln!(text, "# {}", s.name);
            text.push_str(&s.render(format));
        }
        text
    };
    stdout.write_all(text.as_bytes()).map_err(CliError::io)
}

pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}
