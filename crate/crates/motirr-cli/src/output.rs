//! Deterministic CSV emission: UTF-8, comma separator, header first,
//! trailing newline, 12 significant digits for reals.

use std::io::Write;
use std::path::Path;

use crate::config::{CliError, CliResult};

/// Formats a real with 12 significant digits, byte-stable across runs.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.11e}")
}

/// Renders rows into CSV bytes.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes CSV to `path`, or to stdout when no path is given.
pub fn emit_csv(header: &[&str], rows: &[Vec<String>], path: Option<&Path>) -> CliResult<()> {
    let text = render_csv(header, rows);
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
