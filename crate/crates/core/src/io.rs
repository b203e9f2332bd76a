//! Point-list CSV files: header `x,y`, one point per row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::Point2;

#[derive(Debug, Deserialize)]
struct PointRow {
    x: f64,
    y: f64,
}

pub fn read_points_from<R: Read>(reader: R, source: &Path) -> Result<Vec<Point2>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut points = Vec::new();
    for row in rdr.deserialize::<PointRow>() {
        let row = row.map_err(|e| Error::io(source, e))?;
        points.push(Point2::new(row.x, row.y));
    }
    crate::geometry::check_finite(&points)?;
    Ok(points)
}

pub fn read_points(path: &Path) -> Result<Vec<Point2>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_points_from(file, path)
}

pub fn write_points_to<W: Write>(writer: W, points: &[Point2]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for p in points {
        w.write_record([fmt_real(p.x), fmt_real(p.y)])?;
    }
    w.flush()
}

pub fn write_points(path: &Path, points: &[Point2]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_points_to(file, points).map_err(|e| Error::io(path, e))
}

/// Shortest representation that parses back to the identical `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let text = "x,y\n0.5,1\n-2e-3, 3.25\n";
        let pts = read_points_from(text.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(pts, vec![Point2::new(0.5, 1.0), Point2::new(-2e-3, 3.25)]);
    }

    #[test]
    fn rejects_garbage() {
        let err = read_points_from("x,y\n1,abc\n".as_bytes(), Path::new("mem")).unwrap_err();
        assert_eq!(err.name(), "IoFailure");
        let err = read_points_from("x,y\nNaN,1\n".as_bytes(), Path::new("mem")).unwrap_err();
        assert_eq!(err.name(), "NonFinitePoint");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let pts = vec![Point2::new(0.1 + 0.2, std::f64::consts::PI), Point2::new(-1e-300, 123456.789)];
        let mut buf = Vec::new();
        write_points_to(&mut buf, &pts).unwrap();
        assert_eq!(read_points_from(buf.as_slice(), Path::new("mem")).unwrap(), pts);
    }
}
