//! CSV series and JSON summaries, plus the bundled reader.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Where and how a run writes its files.
#[derive(Debug, Clone)]
pub struct OutputSink {
    pub dir: PathBuf,
    pub metadata: bool,
}

impl OutputSink {
    pub fn new(dir: &Path, metadata: bool) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), metadata })
    }

    fn metadata_line(&self) -> Option<String> {
        self.metadata.then(|| {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("# generated by qfb {} at unix time {secs}", env!("CARGO_PKG_VERSION"))
        })
    }

    /// Writes a CSV with a fixed header; `footer` lines are emitted as
    /// `# key,value` comments.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>], footer: &[(&str, String)]) -> CliResult<()> {
        let file = BufWriter::new(File::create(self.dir.join(name))?);
        let mut out = file;
        if let Some(line) = self.metadata_line() {
            writeln!(out, "{line}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        for (k, v) in footer {
            writeln!(out, "# {k},{v}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary(&self, mut summary: serde_json::Map<String, Value>) -> CliResult<()> {
        if self.metadata {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            summary.insert(
                "metadata".into(),
                serde_json::json!({ "tool": "qfb", "version": env!("CARGO_PKG_VERSION"), "unix_time": secs }),
            );
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(summary))?;
        text.push('\n');
        std::fs::write(self.dir.join("summary.json"), text)?;
        Ok(())
    }
}

/// A CSV series read back: header plus string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// `# key,value` comment records after the data.
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn f64_column(&self, name: &str) -> CliResult<Vec<f64>> {
        let k = self.column(name).ok_or_else(|| CliError::Config(format!("no column {name}")))?;
        self.rows
            .iter()
            .map(|r| r[k].parse::<f64>().map_err(|e| CliError::Config(format!("{name}: {e}"))))
            .collect()
    }

    pub fn footer_value(&self, key: &str) -> Option<&str> {
        self.footer.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Reads a file produced by [`OutputSink::write_csv`]; `#` lines are
/// skipped, trailing `# key,value` lines are collected as the footer.
pub fn read_table(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path)?;
    let mut footer = Vec::new();
    let mut seen_data = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if seen_data {
                if let Some((k, v)) = rest.split_once(',') {
                    footer.push((k.to_string(), v.to_string()));
                }
            }
        } else {
            seen_data = true;
        }
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(Table { headers, rows, footer })
}
