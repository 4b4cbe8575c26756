//! Field snapshots: one JSON header line followed by little-endian `f64`
//! `(re, im)` pairs, component by component, in row-major order of the
//! wavevector with each axis running from `-n/2` up to `n/2 - 1`.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpectralField3;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxLength {
    Cubic(f64),
    PerAxis([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    #[serde(rename = "L")]
    pub l: BoxLength,
    pub components: usize,
    pub time: f64,
}

/// FFT storage index of the `pos`-th wavenumber in ascending order.
fn storage_index(n: usize, pos: usize) -> usize {
    (pos + n / 2) % n
}

pub fn write_snapshot<W: Write>(mut w: W, f: &SpectralField3, time: f64) -> Result<()> {
    let grid = f.grid();
    let [n1, n2, n3] = grid.n();
    let lengths = grid.lengths();
    let l = if lengths[0] == lengths[1] && lengths[1] == lengths[2] {
        BoxLength::Cubic(lengths[0])
    } else {
        BoxLength::PerAxis(lengths)
    };
    let header = SnapshotHeader {
        n1,
        n2,
        n3,
        l,
        components: f.components(),
        time,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * grid.len());
    for c in 0..f.components() {
        buf.clear();
        let data = f.component(c);
        for p1 in 0..n1 {
            let i1 = storage_index(n1, p1);
            for p2 in 0..n2 {
                let i2 = storage_index(n2, p2);
                for p3 in 0..n3 {
                    let z = data[grid.index(i1, i2, storage_index(n3, p3))];
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<(SpectralField3, SnapshotHeader)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    let lengths = match header.l {
        BoxLength::Cubic(l) => [l; 3],
        BoxLength::PerAxis(ls) => ls,
    };
    let grid = Grid::with_lengths([header.n1, header.n2, header.n3], lengths)?;
    if header.components == 0 {
        return Err(Error::Format("snapshot with zero components".into()));
    }
    let n = grid.len();
    let mut raw = vec![0u8; 16 * n * header.components];
    r.read_exact(&mut raw)
        .map_err(|e| Error::Format(format!("truncated snapshot payload: {e}")))?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n * header.components];
    let mut chunks = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
    for c in 0..header.components {
        for p1 in 0..header.n1 {
            let i1 = storage_index(header.n1, p1);
            for p2 in 0..header.n2 {
                let i2 = storage_index(header.n2, p2);
                for p3 in 0..header.n3 {
                    let re = chunks.next().expect("sized");
                    let im = chunks.next().expect("sized");
                    coeffs[c * n + grid.index(i1, i2, storage_index(header.n3, p3))] = Complex64::new(re, im);
                }
            }
        }
    }
    let field = SpectralField3::from_coeffs(&grid, header.components, coeffs)?;
    Ok((field, header))
}
