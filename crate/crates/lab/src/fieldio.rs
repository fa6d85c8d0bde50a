//! Binary spectral-field files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//!   magic   8 bytes  b"CRITLABF"
//!   version u32      1
//!   dim     u32
//!   n       u32      points per axis
//!   L       f64      box length
//!   m       u32      components
//!   coeffs  m * n^dim pairs (re f64, im f64), row-major wavevector order,
//!           component-major
//! ```
//!
//! Round trips are bit-exact. The dealias fraction is run configuration, not
//! data; readers supply it (default 2/3).

use anyhow::{bail, Context, Result};
use critlab_core::{Grid, SpectralField, C64};
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 8] = b"CRITLABF";
pub const VERSION: u32 = 1;

pub fn write_field(path: &Path, field: &SpectralField) -> Result<()> {
    let grid = field.grid();
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?,
    );
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    out.write_all(&grid.box_length().to_le_bytes())?;
    out.write_all(&(field.components() as u32).to_le_bytes())?;
    for c in field.coeffs() {
        out.write_all(&c.re.to_le_bytes())?;
        out.write_all(&c.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_field(path: &Path, dealias_fraction: f64) -> Result<SpectralField> {
    let mut input = std::io::BufReader::new(
        std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    );
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).context("truncated header")?;
    if &magic != MAGIC {
        bail!("bad magic bytes: not a field file");
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        bail!("unsupported field-file version {version}, this build reads {VERSION}");
    }
    let dim = read_u32(&mut input)? as usize;
    let n = read_u32(&mut input)? as usize;
    let box_length = read_f64(&mut input)?;
    let m = read_u32(&mut input)? as usize;
    let grid = Grid::new(dim, n, box_length, dealias_fraction)
        .map_err(|e| anyhow::anyhow!("field header describes an invalid grid: {e}"))?;
    let count = m * grid.len();
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        let re = read_f64(&mut input).context("truncated coefficient payload")?;
        let im = read_f64(&mut input).context("truncated coefficient payload")?;
        coeffs.push(C64::new(re, im));
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        bail!("trailing bytes after coefficient payload");
    }
    SpectralField::from_coeffs(grid, m, coeffs).map_err(|e| anyhow::anyhow!("{e}"))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
