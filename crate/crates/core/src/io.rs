//! Plain-text and binary serialization.
//!
//! CSV files start with `# key = value` comment lines followed by one
//! header row. Rasters are `raster <rows> <cols>` and then one line per
//! row. Numbers use Rust's shortest round-trip formatting, so reruns are
//! byte-identical.
//!
//! Binary state files (little endian):
//!
//! ```text
//! magic "DICKESV\0" | version u32 = 1 | j f64 | n_max u64 | dim u64 | dim × (re f64, im f64)
//! ```

use std::io::{BufRead, Read, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::phase_space::{DiscRaster, HusimiGrid};
use crate::quantum::basis::BasisSpec;
use crate::quantum::states::StateVector;

pub const STATE_MAGIC: &[u8; 8] = b"DICKESV\0";
pub const STATE_VERSION: u32 = 1;

/// Ordered `key = value` metadata written as comments.
pub type Header = Vec<(String, String)>;

pub fn write_header<W: Write>(w: &mut W, header: &[(String, String)]) -> Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v.is_nan() {
        "nan".into()
    } else if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_csv<W: Write>(w: &mut W, header: &[(String, String)], columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_header(w, header)?;
    writeln!(w, "{}", columns.join(","))?;
    for r in rows {
        if r.len() != columns.len() {
            return Err(Error::Io(format!("row has {} values for {} columns", r.len(), columns.len())));
        }
        let line: Vec<String> = r.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Parsed CSV: header comments, column names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_csv<R: BufRead>(r: R) -> Result<CsvTable> {
    let mut header = Vec::new();
    let mut columns = None;
    let mut rows = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if columns.is_none() {
            columns = Some(t.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>());
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = t.split(',').map(|s| s.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| Error::Io(format!("line {}: {e}", no + 1)))?);
    }
    Ok(CsvTable { header, columns: columns.unwrap_or_default(), rows })
}

/// `theta,phi,value` rows of a Husimi grid.
pub fn write_husimi_csv<W: Write>(w: &mut W, header: &[(String, String)], g: &HusimiGrid) -> Result<()> {
    let n = g.phi.len();
    let rows: Vec<Vec<f64>> = g.values.iter().enumerate().map(|(i, v)| vec![g.theta[i / n], g.phi[i % n], *v]).collect();
    write_csv(w, header, &["theta", "phi", "value"], &rows)
}

pub fn write_raster<W: Write>(w: &mut W, header: &[(String, String)], rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    if values.len() != rows * cols {
        return Err(Error::Io(format!("raster has {} values for {rows} x {cols}", values.len())));
    }
    write_header(w, header)?;
    writeln!(w, "raster {rows} {cols}")?;
    for r in 0..rows {
        let line: Vec<String> = values[r * cols..(r + 1) * cols].iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_husimi_raster<W: Write>(w: &mut W, header: &[(String, String)], g: &HusimiGrid) -> Result<()> {
    write_raster(w, header, g.theta.len(), g.phi.len(), &g.values)
}

pub fn write_disc_raster<W: Write>(w: &mut W, header: &[(String, String)], d: &DiscRaster) -> Result<()> {
    write_raster(w, header, d.size, d.size, &d.values)
}

/// `(header, rows, cols, values)` of a raster file.
pub fn read_raster<R: BufRead>(r: R) -> Result<(Header, usize, usize, Vec<f64>)> {
    let mut header = Vec::new();
    let mut dims = None;
    let mut values = Vec::new();
    for line in r.lines() {
        let line = line?;
        let t = line.trim();
        if let Some(c) = t.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        if dims.is_none() {
            let mut it = t.split_whitespace();
            let bad = || Error::Io("expected `raster <rows> <cols>`".into());
            if it.next() != Some("raster") {
                return Err(bad());
            }
            let rows: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let cols: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            dims = Some((rows, cols));
            continue;
        }
        for s in t.split_whitespace() {
            values.push(s.parse::<f64>().map_err(|e| Error::Io(e.to_string()))?);
        }
    }
    let (rows, cols) = dims.ok_or_else(|| Error::Io("missing raster dimensions".into()))?;
    if values.len() != rows * cols {
        return Err(Error::Io(format!("raster declares {rows} x {cols} but holds {} values", values.len())));
    }
    Ok((header, rows, cols, values))
}

pub fn write_state<W: Write>(w: &mut W, psi: &StateVector) -> Result<()> {
    w.write_all(STATE_MAGIC)?;
    w.write_all(&STATE_VERSION.to_le_bytes())?;
    w.write_all(&psi.basis.j().to_le_bytes())?;
    w.write_all(&(psi.basis.n_max() as u64).to_le_bytes())?;
    w.write_all(&(psi.amps.len() as u64).to_le_bytes())?;
    for a in &psi.amps {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_state<R: Read>(r: &mut R) -> Result<StateVector> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != STATE_MAGIC {
        return Err(Error::Io("not a state file (bad magic)".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != STATE_VERSION {
        return Err(Error::Io(format!("unsupported state file version {version}")));
    }
    let mut b8 = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut b8)?;
        Ok(b8)
    };
    let j = f64::from_le_bytes(next(r)?);
    let n_max = u64::from_le_bytes(next(r)?) as usize;
    let dim = u64::from_le_bytes(next(r)?) as usize;
    let basis = BasisSpec::new(j, n_max)?;
    if basis.dim() != dim {
        return Err(Error::Io(format!("dimension {dim} does not match j = {j}, n_max = {n_max}")));
    }
    let mut amps = Vec::with_capacity(dim);
    for _ in 0..dim {
        let re = f64::from_le_bytes(next(r)?);
        let im = f64::from_le_bytes(next(r)?);
        amps.push(C64::new(re, im));
    }
    StateVector::new(basis, amps)
}

/// One parsed seed line, or the reason it was rejected.
pub type SeedLine = std::result::Result<(f64, f64), String>;

/// Seed lines `jx, jy` (comma or whitespace separated, `#` comments).
/// Returns one entry per non-comment line so callers can warn per line.
pub fn parse_seeds(text: &str) -> Vec<(usize, SeedLine)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let t = l.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                return None;
            }
            let parts: Vec<&str> = t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parsed = match parts.as_slice() {
                [a, b] => match (a.parse::<f64>(), b.parse::<f64>()) {
                    (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => Ok((x, y)),
                    _ => Err(format!("cannot parse `{t}` as two numbers")),
                },
                _ => Err(format!("expected two values, got `{t}`")),
            };
            Some((i + 1, parsed))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::GridSpec;

    fn hdr() -> Header {
        vec![("kappa".into(), "0.5".into()), ("j".into(), "10".into())]
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![vec![0.1, -2.5e-17, f64::NAN], vec![1.0 / 3.0, 7.0, 0.0]];
        let mut buf = Vec::new();
        write_csv(&mut buf, &hdr(), &["a", "b", "c"], &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# kappa = 0.5\n# j = 10\na,b,c\n"));
        let t = read_csv(&buf[..]).unwrap();
        assert_eq!(t.header, hdr());
        assert_eq!(t.column("a").unwrap(), vec![0.1, 1.0 / 3.0]);
        assert!(t.rows[0][2].is_nan());
        assert!(write_csv(&mut Vec::new(), &[], &["a"], &[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn raster_round_trip() {
        let mut g = HusimiGrid::zeros(GridSpec::new(3, 4).unwrap());
        g.values.iter_mut().enumerate().for_each(|(i, v)| *v = i as f64 * 0.1);
        let mut buf = Vec::new();
        write_husimi_raster(&mut buf, &hdr(), &g).unwrap();
        let (h, r, c, v) = read_raster(&buf[..]).unwrap();
        assert_eq!((h, r, c), (hdr(), 3, 4));
        assert_eq!(v, g.values);
        assert!(read_raster(&b"raster 2 2\n1 2 3\n"[..]).is_err());
    }

    #[test]
    fn state_round_trip() {
        let b = BasisSpec::new(1.5, 3).unwrap();
        let amps: Vec<C64> = (0..b.dim()).map(|i| C64::new(i as f64, -0.5 * i as f64)).collect();
        let psi = StateVector::new(b, amps).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &psi).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 8 + 8 + 8 + 16 * b.dim());
        assert_eq!(read_state(&mut &buf[..]).unwrap(), psi);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_state(&mut &bad[..]).is_err());
        assert!(read_state(&mut &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn seeds_parse_per_line() {
        let s = parse_seeds("# header\n0.5, 0.5\n\n-0.1 0.2 # trailing\nfoo bar\n1 2 3\n");
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], (2, Ok((0.5, 0.5))));
        assert_eq!(s[1], (4, Ok((-0.1, 0.2))));
        assert!(s[2].1.is_err() && s[3].1.is_err());
    }
}
