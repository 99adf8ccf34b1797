//! CSV and JSON emission: 17-significant-digit floats, LF line endings, a
//! mandatory header row, and byte-stable ordering.

use anyhow::{Context, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Formats a float with 17 significant digits (full double roundtrip).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    buffer: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        CsvWriter {
            buffer: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "row width must match header");
        self.buffer.push_str(&cells.join(","));
        self.buffer.push('\n');
    }

    pub fn finish(self) -> String {
        self.buffer
    }
}

/// Writes `content` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("writing to stdout")
        }
    }
}

/// Path for the JSON report accompanying a CSV output: `<stem>.report.json`.
pub fn report_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "report".into());
    csv_path.with_file_name(format!("{stem}.report.json"))
}
