//! Plain-text geometry files.
//!
//! One antenna per line: `x y z [gain]` in wavelengths, whitespace separated.
//! Lines starting with `#` are comments. Values are written with 17
//! significant digits, so a write/read cycle reproduces every bit.

use std::fmt::Write as _;
use std::path::Path;

use sparsemimo_core::{ArrayGeometry, Position};

use crate::error::{Error, Result};
use crate::fmt_f64;

pub fn format_geometry(geometry: &ArrayGeometry) -> String {
    let mut out = String::from("# x y z gain (wavelengths, linear power gain)\n");
    for p in geometry.positions() {
        writeln!(
            out,
            "{} {} {} {}",
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            fmt_f64(geometry.element_gain())
        )
        .expect("writing to a String");
    }
    out
}

pub fn parse_geometry(text: &str, origin: &Path) -> Result<ArrayGeometry> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut positions = Vec::new();
    let mut gain: Option<Option<f64>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| err(i + 1, format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let this_gain = match vals.len() {
            3 => None,
            4 => Some(vals[3]),
            n => return Err(err(i + 1, format!("expected 3 or 4 columns, found {n}"))),
        };
        match gain {
            None => gain = Some(this_gain),
            Some(g) if g != this_gain => {
                return Err(err(i + 1, "gain column must be present on every line with one value".into()))
            }
            _ => {}
        }
        positions.push(Position {
            x: vals[0],
            y: vals[1],
            z: vals[2],
        });
    }
    if positions.is_empty() {
        return Err(err(0, "no antennas".into()));
    }
    Ok(ArrayGeometry::new(positions, gain.flatten().unwrap_or(1.0))?)
}

pub fn read_geometry(path: &Path) -> Result<ArrayGeometry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_geometry(&text, path)
}

pub fn write_geometry(path: &Path, geometry: &ArrayGeometry) -> Result<()> {
    std::fs::write(path, format_geometry(geometry)).map_err(|e| Error::io(path, e))
}
