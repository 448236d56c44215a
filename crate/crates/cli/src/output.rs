//! Fixed-format writers shared by all commands.

use std::path::Path;

use serde::Serialize;

use crate::{CliError, CliResult};

/// Seventeen significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_bool(b: bool) -> String {
    b.to_string()
}

pub fn render_csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    std::fs::write(path, render_csv(header, rows)).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
