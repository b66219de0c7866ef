//! `x,y,f` node files and `x,y` query files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::PointSet;
use crate::error::{Error, Result};
use crate::report::fmt_f64;

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<File>, want: &[&str]) -> Result<()> {
    let headers = rdr
        .headers()
        .map_err(|e| Error::malformed(path, e.to_string()))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != want {
        return Err(Error::malformed(
            path,
            format!("expected header `{}`, found `{}`", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_rows(path: &Path, rdr: &mut csv::Reader<File>, width: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::malformed(path, e.to_string()))?;
        if rec.len() != width {
            return Err(Error::malformed(
                path,
                format!("row {} has {} fields, expected {}", row + 1, rec.len(), width),
            ));
        }
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::malformed(path, format!("row {}: `{}` is not a number", row + 1, field))
            })?;
            if !v.is_finite() {
                return Err(Error::malformed(path, format!("row {}: non-finite value", row + 1)));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Reads a 2-D node file with header `x,y,f`.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(path, &mut rdr, &["x", "y", "f"])?;
    let flat = parse_rows(path, &mut rdr, 3)?;
    if flat.is_empty() {
        return Err(Error::malformed(path, "no data rows"));
    }
    let mut coords = Vec::with_capacity(flat.len() / 3 * 2);
    let mut values = Vec::with_capacity(flat.len() / 3);
    for row in flat.chunks_exact(3) {
        coords.extend_from_slice(&row[..2]);
        values.push(row[2]);
    }
    PointSet::new(2, coords, values).map_err(|e| match e {
        Error::DuplicateNodes(a, b) => {
            Error::malformed(path, format!("rows {} and {} repeat a node", a + 1, b + 1))
        }
        other => other,
    })
}

/// Reads evaluation points with header `x,y`.
pub fn read_queries_csv(path: impl AsRef<Path>) -> Result<Vec<[f64; 2]>> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(path, &mut rdr, &["x", "y"])?;
    let flat = parse_rows(path, &mut rdr, 2)?;
    Ok(flat.chunks_exact(2).map(|p| [p[0], p[1]]).collect())
}

/// Writes a 2-D point set as `x,y,f` with 17 significant digits.
pub fn write_points_csv(ps: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if ps.dim() != 2 {
        return Err(Error::invalid("CSV node files are two-dimensional"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        w.write_all(b"x,y,f\n")?;
        for (p, f) in ps.nodes().zip(ps.values()) {
            writeln!(w, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(*f))?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
