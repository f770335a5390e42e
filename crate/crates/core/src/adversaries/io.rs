use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::game::LossMatrix;

/// Writes one CSV row per round, one column per action, no header.
pub fn write_matrix<W: Write>(writer: W, matrix: &LossMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in matrix.rows() {
        w.write_record(row.iter().map(|x| x.to_string()))
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_matrix<R: Read>(reader: R) -> Result<LossMatrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", k + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", k + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    LossMatrix::from_rows(&rows)
}

pub fn write_matrix_csv(path: impl AsRef<Path>, matrix: &LossMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_matrix(file, matrix)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<LossMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix(file)
}
