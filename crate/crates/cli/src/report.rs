//! Deterministic CSV emission.
//!
//! Every float is written with [`fmt_f64`] (17 significant digits,
//! scientific), so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use transmission_core::C64;

use crate::CliError;

/// Render a float reproducibly and with full precision.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// Render a complex number as two CSV cells `re,im`.
pub fn fmt_c64(z: C64) -> String {
    format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))
}

/// Compact complex rendering for console summaries.
pub fn display_c64(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

/// In-memory CSV table written in one shot.
pub struct Table {
    buf: String,
}

impl Table {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Table { buf }
    }

    /// Append an already-joined row.
    pub fn row(&mut self, cells: &str) {
        self.buf.push_str(cells);
        self.buf.push('\n');
    }

    /// Append a `# key = value` metadata comment line.
    pub fn meta(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.buf, "# {key} = {value}");
    }

    pub fn contents(&self) -> &str {
        &self.buf
    }

    /// Write the table under `dir`, creating the directory if needed.
    pub fn write(&self, dir: &Path, file: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            place: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let path = dir.join(file);
        std::fs::write(&path, &self.buf).map_err(|e| CliError::Io {
            place: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(path)
    }
}

/// Join cells with commas (convenience for mixed string/float rows).
pub fn join(cells: &[String]) -> String {
    cells.join(",")
}
