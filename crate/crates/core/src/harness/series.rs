//! CSV time series and plain-text field snapshots.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::SeriesRow;
use crate::domain::{Grid, State};
use crate::error::{Error, Result};

fn format_row(r: &SeriesRow) -> String {
    let vals = r.values();
    let mut s = String::with_capacity(24 * vals.len());
    for (k, x) in vals.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&format!("{x:e}"));
    }
    s
}

/// Appends rows to a series file as they are produced, flushing each one.
pub struct SeriesWriter {
    path: PathBuf,
    file: File,
}

impl SeriesWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        writeln!(file, "{}", SeriesRow::HEADER).map_err(|e| Error::io(&path, e))?;
        Ok(SeriesWriter { path, file })
    }

    pub fn append(&mut self, row: &SeriesRow) -> Result<()> {
        writeln!(self.file, "{}", format_row(row))
            .and_then(|_| self.file.flush())
            .map_err(|e| Error::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

pub fn write_series(records: &[SeriesRow], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Diagnostic(
            "refusing to write an empty series".into(),
        ));
    }
    let mut w = SeriesWriter::create(path)?;
    records.iter().try_for_each(|r| w.append(r))
}

/// Reads a series file. An unterminated final line, as left by an
/// interrupted run, is ignored.
pub fn read_series(path: impl AsRef<Path>) -> Result<Vec<SeriesRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let complete = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    match lines.first() {
        Some(&h) if h == SeriesRow::HEADER => {}
        _ => return Err(parse_err(1, "missing or unexpected series header".into())),
    }
    let mut rows = Vec::with_capacity(lines.len().saturating_sub(1));
    for (idx, line) in lines.iter().enumerate().skip(1) {
        let last = idx + 1 == lines.len();
        let mut vals = [0.0; SeriesRow::COLUMNS];
        let mut count = 0;
        let mut ok = true;
        for field in line.split(',') {
            if count == SeriesRow::COLUMNS {
                ok = false;
                break;
            }
            match field.trim().parse::<f64>() {
                Ok(x) => vals[count] = x,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            count += 1;
        }
        if ok && count == SeriesRow::COLUMNS {
            rows.push(SeriesRow::from_values(vals));
        } else if last && !complete {
            break;
        } else {
            return Err(parse_err(idx + 1, format!("malformed series row '{line}'")));
        }
    }
    Ok(rows)
}

/// Writes `v`, `u` and `theta` as three blocks of `x value` columns.
pub fn write_snapshot(s: &State, grid: &Grid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&format!("# t = {:e}\n", s.t));
    let blocks: [(&str, &[f64], bool); 3] = [
        ("v", &s.v, true),
        ("u", &s.u, false),
        ("theta", &s.theta, true),
    ];
    for (name, vals, on_cells) in blocks {
        out.push_str(&format!("# field {name}\n"));
        for (k, x) in vals.iter().enumerate() {
            let pos = if on_cells {
                grid.cell_x(k)
            } else {
                grid.face_x(k)
            };
            out.push_str(&format!("{pos:e} {x:e}\n"));
        }
        out.push('\n');
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<State> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut t = None;
    let mut blocks: Vec<(String, Vec<f64>)> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let bad = || Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("malformed snapshot line '{line}'"),
        };
        if let Some(rest) = line.strip_prefix("# t = ") {
            t = Some(rest.trim().parse::<f64>().map_err(|_| bad())?);
        } else if let Some(name) = line.strip_prefix("# field ") {
            blocks.push((name.trim().to_string(), Vec::new()));
        } else if !line.trim().is_empty() {
            let val = line
                .split_whitespace()
                .nth(1)
                .and_then(|x| x.parse::<f64>().ok())
                .ok_or_else(bad)?;
            blocks.last_mut().ok_or_else(bad)?.1.push(val);
        }
    }
    let mut take = |name: &str| {
        blocks
            .iter()
            .position(|(n, _)| n == name)
            .map(|k| std::mem::take(&mut blocks[k].1))
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("snapshot has no '{name}' block"),
            })
    };
    Ok(State {
        t: t.unwrap_or(0.0),
        v: take("v")?,
        u: take("u")?,
        theta: take("theta")?,
    })
}
