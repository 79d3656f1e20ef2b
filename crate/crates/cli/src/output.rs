//! Deterministic CSV / JSON rendering and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// `digits` significant digits in scientific notation.
pub fn format_float(x: f64, digits: usize) -> String {
    if x.is_finite() {
        format!("{:.*e}", digits - 1, x)
    } else {
        x.to_string()
    }
}

fn render_cell(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Num(x) => format_float(*x, digits),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

pub fn render_csv(
    header: Option<&[&str]>,
    rows: &[Vec<Cell>],
    digits: usize,
) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::io("csv", e);
    if let Some(h) = header {
        w.write_record(h).map_err(fail)?;
    }
    for row in rows {
        w.write_record(row.iter().map(|c| render_cell(c, digits)))
            .map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::io("csv", e.error()))
}

pub fn render_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value).map_err(|e| CliError::io("json", e))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Output directory plus format settings.
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
    pub digits: usize,
}

impl Sink {
    /// Write via a temporary file in the target directory and rename, so a
    /// reader never sees a partial file.
    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(self.dir.display(), e))?;
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        Ok(path)
    }

    pub fn csv(
        &self,
        name: &str,
        header: Option<&[&str]>,
        rows: &[Vec<Cell>],
    ) -> CliResult<PathBuf> {
        self.write(name, &render_csv(header, rows, self.digits)?)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        self.write(name, &render_json(value)?)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir.display(), e))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::io(path.display(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path.display(), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(path.display(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(1.566053412, 9), "1.56605341e0");
        assert_eq!(format_float(-3.4e-3, 9), "-3.40000000e-3");
        assert_eq!(format_float(0.0, 9), "0.00000000e0");
        assert_eq!(format_float(f64::NAN, 9), "NaN");
        let back: f64 = format_float(std::f64::consts::PI, 9).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 5e-9);
    }

    #[test]
    fn csv_rows() {
        let rows = vec![vec![
            Cell::from(1.0),
            Cell::from("o"),
            Cell::from(true),
            Cell::from(3usize),
        ]];
        let out = render_csv(Some(&["a", "b", "c", "d"]), &rows, 3).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "a,b,c,d\n1.00e0,o,true,3\n"
        );
    }

    #[test]
    fn json_keeps_full_precision() {
        let x = 0.1 + 0.2;
        let out = render_json(&serde_json::json!({ "x": x })).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), x);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink {
            dir: dir.path().join("nested"),
            format: Format::Csv,
            digits: 9,
        };
        let p = sink.write("a.txt", b"one").unwrap();
        sink.write("a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(sink.dir).unwrap().count(), 1);
    }
}
