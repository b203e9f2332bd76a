//! Snapshot CSV files: header `x,y,T,kind`, values with 17 significant digits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::discretize::NodeKind;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::rbffd::ScatteredField;

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field_to<W: Write>(writer: W, field: &ScatteredField) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y", "T", "kind"])?;
    for ((p, t), kind) in field.nodes.iter().zip(&field.values).zip(&field.kinds) {
        w.write_record([sci(p.x), sci(p.y), sci(*t), kind.as_str().to_string()])?;
    }
    w.flush()
}

/// Writes the field in its stored row order.
pub fn write_snapshot(field: &ScatteredField, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_field_to(file, field).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct Row {
    x: f64,
    y: f64,
    #[serde(rename = "T")]
    t: f64,
    kind: NodeKind,
}

pub fn read_field_from<R: Read>(reader: R, source: &Path) -> Result<ScatteredField> {
    let mut rdr = csv::Reader::from_reader(reader);
    let (mut nodes, mut kinds, mut values) = (Vec::new(), Vec::new(), Vec::new());
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| Error::io(source, e))?;
        nodes.push(Point2::new(row.x, row.y));
        kinds.push(row.kind);
        values.push(row.t);
    }
    ScatteredField::new(nodes, kinds, values)
}

pub fn read_snapshot(path: &Path) -> Result<ScatteredField> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_field_from(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_nodes_four_lines_and_exact_round_trip() {
        let field = ScatteredField::new(
            vec![Point2::new(0.1, 0.2), Point2::new(1.0 / 3.0, -2e-17), Point2::new(-0.7, 5.0)],
            vec![NodeKind::Outer, NodeKind::Dendrite, NodeKind::Interior],
            vec![1.0, 0.0, std::f64::consts::E / 7.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_field_to(&mut buf, &field).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x,y,T,kind\n"));
        assert_eq!(read_field_from(buf.as_slice(), Path::new("mem")).unwrap(), field);
    }

    #[test]
    fn missing_file_is_io_failure() {
        let err = read_snapshot(Path::new("/nonexistent/step_00000.csv")).unwrap_err();
        assert_eq!(err.name(), "IoFailure");
    }
}
