use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

pub fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_num(v))
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes `header` and `rows` to `path`, or to `stdout` when `path` is `-`.
pub fn write_csv(path: &Path, header: &str, rows: &[String], stdout: &mut dyn Write) -> Result<()> {
    if path.as_os_str() == "-" {
        return write_lines(stdout, header, rows);
    }
    let mut w = BufWriter::new(File::create(path)?);
    write_lines(&mut w, header, rows)?;
    w.flush()?;
    Ok(())
}

fn write_lines(w: &mut dyn Write, header: &str, rows: &[String]) -> Result<()> {
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}
