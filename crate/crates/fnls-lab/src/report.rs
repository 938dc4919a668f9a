//! Artifact writers: run manifest, CSV tables, JSON summaries, raw field
//! dumps.
//!
//! Reproducibility contract: every run writes `manifest.json` echoing the
//! full resolved configuration plus the code version, and all numeric
//! output is formatted deterministically (shortest round-trip float
//! display), so re-running with an identical manifest yields byte-identical
//! tables.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Creates the output directory and returns it.
pub fn prepare_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

/// Writes `manifest.json`: subcommand name, code version, resolved config.
pub fn write_manifest<C: Serialize>(dir: &Path, subcommand: &str, config: &C) -> Result<()> {
    #[derive(Serialize)]
    struct Manifest<'a, C> {
        subcommand: &'a str,
        code_version: &'a str,
        config: &'a C,
    }
    let manifest = Manifest {
        subcommand,
        code_version: env!("CARGO_PKG_VERSION"),
        config,
    };
    write_json(dir, "manifest.json", &manifest)
}

/// Serializes `value` as pretty JSON into `dir/name`.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Incremental CSV builder with deterministic float formatting.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    /// Starts a table with the given header.
    pub fn new(header: &[&str]) -> Csv {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv {
            buf,
            columns: header.len(),
        }
    }

    /// Appends one row; the cell count must match the header.
    pub fn row(&mut self, cells: &[CsvCell]) {
        assert_eq!(cells.len(), self.columns, "CSV row width mismatch");
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                CsvCell::Float(x) => {
                    let _ = write!(self.buf, "{x}");
                }
                CsvCell::Int(n) => {
                    let _ = write!(self.buf, "{n}");
                }
                CsvCell::Text(s) => {
                    debug_assert!(
                        !s.contains(',') && !s.contains('\n') && !s.contains('"'),
                        "CSV text cells must not need quoting"
                    );
                    self.buf.push_str(s);
                }
                CsvCell::Empty => {}
            }
        }
        self.buf.push('\n');
    }

    /// Writes the table to `dir/name`.
    pub fn save(&self, dir: &Path, name: &str) -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, &self.buf).with_context(|| format!("writing {}", path.display()))
    }
}

/// One CSV cell.
pub enum CsvCell {
    /// Shortest round-trip float (`{}` display).
    Float(f64),
    /// Integer.
    Int(i64),
    /// Plain text (must not require quoting).
    Text(String),
    /// Empty cell (e.g. value unavailable at this row).
    Empty,
}

impl CsvCell {
    /// Float if present, empty cell otherwise.
    pub fn opt(x: Option<f64>) -> CsvCell {
        match x {
            Some(v) => CsvCell::Float(v),
            None => CsvCell::Empty,
        }
    }
}

/// Writes a complex field as raw little-endian f64 `(re, im)` pairs in
/// row-major index order, plus a JSON sidecar describing the geometry.
pub fn dump_field(
    dir: &Path,
    label: &str,
    field: &fnls_core::field::Field,
) -> Result<()> {
    let grid = field.grid();
    let data_name = format!("{label}.f64");
    let path = dir.join(&data_name);
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = std::io::BufWriter::new(file);
    for z in field.data() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    out.flush()?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        d: usize,
        h: f64,
        m: usize,
        #[serde(rename = "L")]
        box_half_length: f64,
        side: f64,
        label: &'a str,
        data_file: &'a str,
        layout: &'a str,
    }
    let sidecar = Sidecar {
        d: grid.dim(),
        h: grid.mesh(),
        m: grid.points_per_axis(),
        box_half_length: grid.half_length(),
        side: grid.points_per_axis() as f64 * grid.mesh(),
        label,
        data_file: &data_name,
        layout: "row-major (re, im) little-endian f64 pairs",
    };
    write_json(dir, &format!("{label}.json"), &sidecar)
}
