//! File output: CSV tables, JSON-lines reports and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};
use crate::settings::Settings;

/// Everything needed to reproduce a command's output files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<'a> {
    pub command: String,
    pub config: &'a Settings,
    /// Parameters specific to the command.
    pub extra: serde_json::Value,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub version: &'static str,
}

impl<'a> RunManifest<'a> {
    pub fn new(command: impl Into<String>, config: &'a Settings) -> Self {
        Self {
            command: command.into(),
            config,
            extra: serde_json::Value::Null,
            seed: config.seed,
            outputs: Vec::new(),
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        }
    }

    /// Writes the manifest next to the outputs as `<stem>.manifest.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<PathBuf> {
        let path = dir.join(format!("{stem}.manifest.json"));
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        write_file(&path, &text)?;
        Ok(path)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(CliError::io(format!("writing {}", path.display())))
}

/// One CSV cell. Floats use Rust's shortest round-trip formatting.
pub enum Cell {
    F(f64),
    I(u64),
    S(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

/// Comma-separated table preceded by a `#` comment stating the units.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut text = String::new();
        for line in comment.lines() {
            let _ = writeln!(text, "# {line}");
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = Cell>) {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            match c {
                Cell::F(v) => {
                    let _ = write!(self.text, "{v:?}");
                }
                Cell::I(v) => {
                    let _ = write!(self.text, "{v}");
                }
                Cell::S(s) => self.text.push_str(&s),
                Cell::Empty => {}
            }
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.text)
    }
}

/// Serializes each record on its own line.
pub fn json_lines<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| CliError::Runtime(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
