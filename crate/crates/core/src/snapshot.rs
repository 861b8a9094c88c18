//! Field snapshot files.
//!
//! A snapshot is one line of JSON followed by a raw payload:
//!
//! ```text
//! {"format":"lans-field","version":1,"n":3,"N":32,"components":3,"layout":"row-major","dtype":"f64-le","t":0.5}\n
//! <components × N^n little-endian f64 samples>
//! ```
//!
//! Components are stored one after another; within a component the samples
//! follow the grid's row-major order (axis 0 slowest).

use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::field::RealField;
use crate::grid::Grid;

const FORMAT: &str = "lans-field";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    n: usize,
    #[serde(rename = "N")]
    size: usize,
    components: usize,
    layout: String,
    dtype: String,
    t: f64,
}

/// Writes `field` at time `t`.
pub fn write_snapshot<W: Write>(mut w: W, field: &RealField, t: f64) -> io::Result<()> {
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        n: field.grid().dim(),
        size: field.grid().size(),
        components: field.ncomp(),
        layout: "row-major".into(),
        dtype: "f64-le".into(),
        t,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(field.ncomp() * field.grid().len() * 8);
    for c in field.components() {
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    w.flush()
}

/// Reads a snapshot, returning the field and its time stamp.
pub fn read_snapshot<R: Read>(r: R) -> io::Result<(RealField, f64)> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut reader = io::BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let h: Header = serde_json::from_str(line.trim_end()).map_err(|e| bad(format!("snapshot header: {e}")))?;
    if h.format != FORMAT || h.version != VERSION || h.layout != "row-major" || h.dtype != "f64-le" {
        return Err(bad(format!("unsupported snapshot format {:?} v{}", h.format, h.version)));
    }
    let grid = Grid::new(h.n, h.size).map_err(|e| bad(e.to_string()))?;
    let mut comps = Vec::with_capacity(h.components);
    let mut bytes = vec![0u8; grid.len() * 8];
    for _ in 0..h.components {
        reader.read_exact(&mut bytes)?;
        comps.push(
            bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk"))).collect(),
        );
    }
    let field = RealField::new(&grid, comps).map_err(|e| bad(e.to_string()))?;
    Ok((field, h.t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(2, 8).unwrap();
        let f = RealField::from_fn(&g, 2, |x, c| x[0].sin() * (c as f64 + 0.1) + x[1]);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.25).unwrap();
        assert!(buf.starts_with(b"{\"format\":\"lans-field\""));
        let (back, t) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let g = Grid::new(2, 8).unwrap();
        let f = RealField::zeros(&g, 2);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.0).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_snapshot(&buf[..]).is_err());
    }
}
