//! Plain CSV output with shortest round-trip floats and LF line endings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fracdiff_core::Field;

use crate::error::{CliError, Result};

/// Writes rows under `header`, formatting every value with `{:?}` so that
/// parsing the text gives back the same bits.
pub fn write_rows<W: Write>(
    mut w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// One row per lattice node: `t,x,u` in 1D and `t,x,y,u` in 2D, time major.
pub fn write_field(path: &Path, u: &Field) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let header: &[&str] = if u.grid.dim() == 1 { &["t", "x", "u"] } else { &["t", "x", "y", "u"] };
    let pts = u.grid.points();
    let dim = u.grid.dim();
    let rows = u.tgrid.nodes().iter().enumerate().flat_map(|(k, &t)| {
        let level = u.at(k);
        pts.iter().zip(level).map(move |(x, &v)| {
            let mut row = vec![t];
            row.extend_from_slice(&x[..dim]);
            row.push(v);
            row
        })
    });
    write_rows(BufWriter::new(file), header, rows).map_err(|e| CliError::io(path, e))
}

/// Header and numeric rows of a CSV file.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let err = |e: csv::Error| CliError::Csv(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(err)?;
    let header = reader.headers().map_err(err)?.iter().map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(err)?;
        let row = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::Csv(format!("{} row {}: {e}", path.display(), i + 2)))?;
        rows.push(row);
    }
    Ok((header, rows))
}
