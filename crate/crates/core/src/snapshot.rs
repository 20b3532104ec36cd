//! Field snapshots: a one-line JSON header followed by the values as
//! little-endian `f64`, row-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub dims: Vec<usize>,
    pub extent: Vec<(f64, f64)>,
    pub time: f64,
}

/// `snap_%08d.f64`
pub fn snapshot_file_name(index: usize) -> String {
    format!("snap_{index:08}.f64")
}

pub fn write_snapshot(path: &Path, field: &Field, time: f64) -> Result<()> {
    let header = SnapshotHeader {
        dims: field.grid().points_per_axis().to_vec(),
        extent: field.grid().extent().to_vec(),
        time,
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, Vec<f64>)> {
    let mut input = BufReader::new(File::open(path)?);
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let expected: usize = header.dims.iter().product();
    if bytes.len() != 8 * expected {
        return Err(Error::Config(format!(
            "snapshot {} holds {} bytes of data, expected {}",
            path.display(),
            bytes.len(),
            8 * expected
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((header, values))
}
