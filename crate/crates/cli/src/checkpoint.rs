//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"BKMD"  u32 version  u8 model (0 emhd, 1 hallmhd)  u64 n
//! f64 box_length  f64 nu  f64 t  f64 K
//! u32 count  count × f64 accumulated integrals
//! B_x, B_y, B_z [, u_x, u_y, u_z]: spectral_len × (f64 re, f64 im) each,
//! reduced layout (kx fastest)
//! ```

use std::fs;
use std::path::Path;

use bkmhd_core::diagnostics::Integrals;
use bkmhd_core::dynamics::{Model, SimState};
use num_complex::Complex64;
use bkmhd_core::spectral::{Grid, ScalarField, VectorField3};

use crate::error::{format_err, Result};

pub const MAGIC: &[u8; 4] = b"BKMD";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: SimState,
    pub k: f64,
    pub integrals: Integrals,
}

fn model_byte(m: Model) -> u8 {
    match m {
        Model::Emhd => 0,
        Model::HallMhd => 1,
    }
}

pub fn encode(cp: &Checkpoint) -> Result<Vec<u8>> {
    let s = &cp.state;
    let g = s.grid();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(model_byte(s.model));
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    for v in [g.length(), s.nu, s.t, cp.k] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let integrals = cp.integrals.to_array();
    out.extend_from_slice(&(integrals.len() as u32).to_le_bytes());
    for v in integrals {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut fields = vec![&s.b];
    fields.extend(s.u.as_ref());
    for f in fields {
        for comp in f.spectra()? {
            for z in comp {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(format_err(format!("checkpoint truncated at byte {} (need {len} more)", self.pos)));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn field(&mut self, g: &Grid) -> Result<VectorField3> {
        let mut comps = Vec::with_capacity(3);
        for _ in 0..3 {
            let mut c = Vec::with_capacity(g.spectral_len());
            for _ in 0..g.spectral_len() {
                let re = self.f64()?;
                let im = self.f64()?;
                c.push(Complex64::new(re, im));
            }
            comps.push(ScalarField::from_spectral(g, c)?);
        }
        let [a, b, c]: [_; 3] = comps.try_into().expect("three components");
        Ok(VectorField3::new([a, b, c])?)
    }
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(format_err("not a checkpoint (bad magic)"));
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = r.u32()?;
    if version != VERSION {
        return Err(format_err(format!("unsupported checkpoint version {version} (expected {VERSION})")));
    }
    let model = match r.u8()? {
        0 => Model::Emhd,
        1 => Model::HallMhd,
        other => return Err(format_err(format!("unknown model tag {other}"))),
    };
    let n = r.u64()? as usize;
    let length = r.f64()?;
    let nu = r.f64()?;
    let t = r.f64()?;
    let k = r.f64()?;
    let count = r.u32()? as usize;
    if count != Integrals::COUNT {
        return Err(format_err(format!("expected {} integrals, found {count}", Integrals::COUNT)));
    }
    let mut integrals = [0.0; Integrals::COUNT];
    for v in integrals.iter_mut() {
        *v = r.f64()?;
    }
    let g = Grid::with_length(n, length).map_err(|e| format_err(format!("bad grid in checkpoint: {e}")))?;
    let b = r.field(&g)?;
    let u = match model {
        Model::Emhd => None,
        Model::HallMhd => Some(r.field(&g)?),
    };
    if r.pos != bytes.len() {
        return Err(format_err(format!("{} trailing bytes after checkpoint payload", bytes.len() - r.pos)));
    }
    let state = SimState { t, b, u, model, nu };
    state.validate()?;
    Ok(Checkpoint { state, k, integrals: Integrals::from_array(integrals) })
}

pub fn save_checkpoint(cp: &Checkpoint, path: &Path) -> Result<()> {
    fs::write(path, encode(cp)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode(&fs::read(path)?)
}
