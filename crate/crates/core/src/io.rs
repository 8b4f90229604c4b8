//! Binary file formats: one JSON header line, then a little-endian binary64 payload.
//!
//! | extension | magic   | payload                                              |
//! |-----------|---------|------------------------------------------------------|
//! | `.rfld`   | `RFLD1` | `nx·ny` reals, y-major                               |
//! | `.rsg`    | `RSG1`  | `ntheta·np` reals, direction-major                   |
//! | `.rwc1`   | `RWC1`  | `na·nb` complex (re, im), scale-major                |
//! | `.rcf`    | `RCF1`  | `ntheta·na·nb` complex, direction, scale, offset     |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{Orbit, ProbeSet};
use crate::error::{Error, Result};
use crate::numerics::{Field2D, Grid1D, LogGrid, SphereGrid};
use crate::radon::Sinogram;
use crate::ridgelet::{Provenance, RidgeletCoefficients};
use crate::wavelet1d::WaveletCoefficients1D;

#[derive(Debug, Serialize, Deserialize)]
struct FieldHeader {
    magic: String,
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SinogramHeader {
    magic: String,
    ntheta: usize,
    np: usize,
    p0: f64,
    dp: f64,
    #[serde(default)]
    non_decaying: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct WaveletHeader {
    magic: String,
    nb: usize,
    na: usize,
    b0: f64,
    db: f64,
    a_values: Vec<f64>,
    #[serde(default)]
    boundary_cells: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoefficientHeader {
    magic: String,
    ntheta: usize,
    nb: usize,
    na: usize,
    b0: f64,
    db: f64,
    a_values: Vec<f64>,
    provenance: String,
    #[serde(default)]
    boundary_cells: Vec<usize>,
}

fn write_header<W: Write, H: Serialize>(w: &mut W, header: &H) -> Result<()> {
    let line = serde_json::to_string(header).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

fn read_header<R: BufRead, H: for<'de> Deserialize<'de>>(r: &mut R, magic: &str) -> Result<H> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    if !line.ends_with('\n') {
        return Err(Error::Format("missing header line".into()));
    }
    let value: serde_json::Value =
        serde_json::from_str(line.trim_end()).map_err(|e| Error::Format(format!("bad JSON header: {e}")))?;
    match value.get("magic").and_then(|m| m.as_str()) {
        Some(m) if m == magic => {}
        Some(m) => return Err(Error::Format(format!("expected magic {magic}, found {m}"))),
        None => return Err(Error::Format("header has no magic".into())),
    }
    serde_json::from_value(value).map_err(|e| Error::Format(format!("bad {magic} header: {e}")))
}

fn write_reals<W: Write>(w: &mut W, values: impl IntoIterator<Item = f64>) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_reals<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let bytes = count.checked_mul(8).ok_or_else(|| Error::Format("payload size overflows".into()))?;
    let mut buf = Vec::with_capacity(bytes);
    r.take(bytes as u64 + 1).read_to_end(&mut buf)?;
    if buf.len() != bytes {
        return Err(Error::Format(format!("payload holds {} bytes, expected {bytes}", buf.len())));
    }
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}

fn read_complex<R: Read>(r: &mut R, count: usize) -> Result<Vec<Complex64>> {
    let flat = read_reals(r, count.checked_mul(2).ok_or_else(|| Error::Format("payload size overflows".into()))?)?;
    Ok(flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn write_complex<W: Write>(w: &mut W, values: &[Complex64]) -> Result<()> {
    write_reals(w, values.iter().flat_map(|c| [c.re, c.im]))
}

fn grid(origin: f64, step: f64, count: usize) -> Result<Grid1D> {
    Grid1D::new(origin, step, count).map_err(|e| Error::Format(e.to_string()))
}

fn scales(a_values: &[f64], na: usize) -> Result<LogGrid> {
    if a_values.len() != na || na < 2 {
        return Err(Error::Format(format!("a_values holds {} scales, na = {na}", a_values.len())));
    }
    LogGrid::new(a_values[0], a_values[na - 1], na).map_err(|e| Error::Format(e.to_string()))
}

fn flagged(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect()
}

fn unflag(cells: &[usize], len: usize) -> Result<Vec<bool>> {
    let mut out = vec![false; len];
    for &c in cells {
        *out.get_mut(c).ok_or_else(|| Error::Format(format!("boundary cell {c} out of range")))? = true;
    }
    Ok(out)
}

pub fn encode_field<W: Write>(w: &mut W, f: &Field2D) -> Result<()> {
    write_header(
        w,
        &FieldHeader {
            magic: "RFLD1".into(),
            nx: f.nx(),
            ny: f.ny(),
            x0: f.grid_x.origin,
            y0: f.grid_y.origin,
            dx: f.grid_x.step,
            dy: f.grid_y.step,
        },
    )?;
    write_reals(w, f.values.iter().copied())
}

pub fn decode_field<R: BufRead>(r: &mut R) -> Result<Field2D> {
    let h: FieldHeader = read_header(r, "RFLD1")?;
    let values = read_reals(r, h.nx.checked_mul(h.ny).ok_or_else(|| Error::Format("nx·ny overflows".into()))?)?;
    Field2D::new(grid(h.x0, h.dx, h.nx)?, grid(h.y0, h.dy, h.ny)?, values)
}

pub fn encode_sinogram<W: Write>(w: &mut W, s: &Sinogram) -> Result<()> {
    write_header(
        w,
        &SinogramHeader {
            magic: "RSG1".into(),
            ntheta: s.sphere.count,
            np: s.grid_p.count,
            p0: s.grid_p.origin,
            dp: s.grid_p.step,
            non_decaying: s.non_decaying,
        },
    )?;
    write_reals(w, s.values.iter().copied())
}

pub fn decode_sinogram<R: BufRead>(r: &mut R) -> Result<Sinogram> {
    let h: SinogramHeader = read_header(r, "RSG1")?;
    let sphere = SphereGrid::new(h.ntheta).map_err(|e| Error::Format(e.to_string()))?;
    let grid_p = grid(h.p0, h.dp, h.np)?;
    let values = read_reals(r, h.ntheta * h.np)?;
    Ok(Sinogram { sphere, grid_p, values, non_decaying: h.non_decaying })
}

pub fn encode_wavelet_coefficients<W: Write>(w: &mut W, c: &WaveletCoefficients1D) -> Result<()> {
    write_header(
        w,
        &WaveletHeader {
            magic: "RWC1".into(),
            nb: c.grid_b.count,
            na: c.grid_a.count,
            b0: c.grid_b.origin,
            db: c.grid_b.step,
            a_values: c.grid_a.nodes(),
            boundary_cells: flagged(&c.boundary),
        },
    )?;
    write_complex(w, &c.values)
}

pub fn decode_wavelet_coefficients<R: BufRead>(r: &mut R) -> Result<WaveletCoefficients1D> {
    let h: WaveletHeader = read_header(r, "RWC1")?;
    let grid_b = grid(h.b0, h.db, h.nb)?;
    let grid_a = scales(&h.a_values, h.na)?;
    let n = h.na * h.nb;
    Ok(WaveletCoefficients1D { grid_b, grid_a, values: read_complex(r, n)?, boundary: unflag(&h.boundary_cells, n)? })
}

pub fn encode_coefficients<W: Write>(w: &mut W, c: &RidgeletCoefficients) -> Result<()> {
    write_header(
        w,
        &CoefficientHeader {
            magic: "RCF1".into(),
            ntheta: c.sphere.count,
            nb: c.grid_b.count,
            na: c.grid_a.count,
            b0: c.grid_b.origin,
            db: c.grid_b.step,
            a_values: c.grid_a.nodes(),
            provenance: c.provenance.as_str().into(),
            boundary_cells: flagged(&c.boundary),
        },
    )?;
    write_complex(w, &c.values)
}

pub fn decode_coefficients<R: BufRead>(r: &mut R) -> Result<RidgeletCoefficients> {
    let h: CoefficientHeader = read_header(r, "RCF1")?;
    let sphere = SphereGrid::new(h.ntheta).map_err(|e| Error::Format(e.to_string()))?;
    let grid_b = grid(h.b0, h.db, h.nb)?;
    let grid_a = scales(&h.a_values, h.na)?;
    let provenance = match h.provenance.as_str() {
        "direct" => Provenance::Direct,
        "via_radon" => Provenance::ViaRadon,
        other => return Err(Error::Format(format!("unknown provenance '{other}'"))),
    };
    let n = h.ntheta * h.na * h.nb;
    Ok(RidgeletCoefficients {
        sphere,
        grid_b,
        grid_a,
        values: read_complex(r, n)?,
        boundary: unflag(&h.boundary_cells, n)?,
        provenance,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(Error::Io)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(Error::Io)
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

pub fn write_field(path: impl AsRef<Path>, f: &Field2D) -> Result<()> {
    let mut w = create(path.as_ref())?;
    encode_field(&mut w, f)?;
    finish(w)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field2D> {
    decode_field(&mut open(path.as_ref())?)
}

pub fn write_sinogram(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    let mut w = create(path.as_ref())?;
    encode_sinogram(&mut w, s)?;
    finish(w)
}

pub fn read_sinogram(path: impl AsRef<Path>) -> Result<Sinogram> {
    decode_sinogram(&mut open(path.as_ref())?)
}

pub fn write_wavelet_coefficients(path: impl AsRef<Path>, c: &WaveletCoefficients1D) -> Result<()> {
    let mut w = create(path.as_ref())?;
    encode_wavelet_coefficients(&mut w, c)?;
    finish(w)
}

pub fn read_wavelet_coefficients(path: impl AsRef<Path>) -> Result<WaveletCoefficients1D> {
    decode_wavelet_coefficients(&mut open(path.as_ref())?)
}

pub fn write_coefficients(path: impl AsRef<Path>, c: &RidgeletCoefficients) -> Result<()> {
    let mut w = create(path.as_ref())?;
    encode_coefficients(&mut w, c)?;
    finish(w)
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<RidgeletCoefficients> {
    decode_coefficients(&mut open(path.as_ref())?)
}

/// `x,y,value` lines.
pub fn write_field_csv(path: impl AsRef<Path>, f: &Field2D) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "x,y,value")?;
    for i in 0..f.ny() {
        for j in 0..f.nx() {
            writeln!(w, "{},{},{}", f.grid_x.node(j), f.grid_y.node(i), f.at(i, j))?;
        }
    }
    finish(w)
}

/// `theta,p,value` lines.
pub fn write_sinogram_csv(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "theta,p,value")?;
    for d in 0..s.sphere.count {
        for k in 0..s.grid_p.count {
            writeln!(w, "{},{},{}", s.sphere.angle(d), s.grid_p.node(k), s.at(d, k))?;
        }
    }
    finish(w)
}

/// `theta,b,a,re,im` lines.
pub fn write_coefficients_csv(path: impl AsRef<Path>, c: &RidgeletCoefficients) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "theta,b,a,re,im")?;
    for d in 0..c.sphere.count {
        for j in 0..c.grid_a.count {
            for k in 0..c.grid_b.count {
                let v = c.at(d, j, k);
                writeln!(w, "{},{},{},{},{}", c.sphere.angle(d), c.grid_b.node(k), c.grid_a.node(j), v.re, v.im)?;
            }
        }
    }
    finish(w)
}

/// `lambda,probe_index,window_index,re,im` lines; masked points are skipped.
pub fn write_orbits_csv(path: impl AsRef<Path>, set: &ProbeSet, orbits: &[Orbit]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "lambda,probe_index,window_index,re,im")?;
    let nw = set.windows.len();
    for (i, o) in orbits.iter().enumerate() {
        for ((l, v), ok) in o.lambdas.iter().zip(&o.values).zip(&o.valid) {
            if *ok {
                writeln!(w, "{},{},{},{},{}", l, i / nw, i % nw, v.re, v.im)?;
            }
        }
    }
    finish(w)
}

pub fn write_json(path: impl AsRef<Path>, value: &serde_json::Value) -> Result<()> {
    let mut w = create(path.as_ref())?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(w)?;
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let (gx, gy) = Field2D::square_grid(2.0, 8).unwrap();
        let f = crate::numerics::sample_function(|x, y| x * 0.3 - y * y + 1e-300, gx, gy).unwrap();
        let mut buf = Vec::new();
        encode_field(&mut buf, &f).unwrap();
        assert_eq!(decode_field(&mut buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let (gx, gy) = Field2D::square_grid(2.0, 8).unwrap();
        let mut buf = Vec::new();
        encode_field(&mut buf, &Field2D::zeros(gx, gy)).unwrap();
        buf.pop();
        assert!(matches!(decode_field(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn wrong_magic() {
        let s = Sinogram::zeros(SphereGrid::new(4).unwrap(), Grid1D::symmetric(1.0, 5).unwrap());
        let mut buf = Vec::new();
        encode_sinogram(&mut buf, &s).unwrap();
        assert!(matches!(decode_field(&mut buf.as_slice()), Err(Error::Format(_))));
        assert_eq!(decode_sinogram(&mut buf.as_slice()).unwrap(), s);
    }
}
