//! Payload writer for `--out` (or stdout) in CSV or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Sink {
    out: Box<dyn Write>,
    format: Format,
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out, format })
    }

    pub fn format(&self) -> Format {
        self.format
    }

    /// Writes `rows` as CSV with a header, or as a JSON array.
    pub fn rows<T: Serialize>(&mut self, rows: &[T]) -> anyhow::Result<()> {
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.out);
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => self.json(&rows)?,
        }
        self.out.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, value: &T) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut self.out, value)?;
        writeln!(self.out)?;
        self.out.flush()?;
        Ok(())
    }

    pub fn line(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "{text}")?;
        self.out.flush()
    }
}

/// Shortest round-trip decimal; exponent form for very small or large
/// magnitudes, and a bare `0` for either zero.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:?}")
    }
}
