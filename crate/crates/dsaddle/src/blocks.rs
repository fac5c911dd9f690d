//! Block systems and inverses as directories of Matrix Market files.
//!
//! A system directory holds `A.mtx`, `B.mtx`, `C.mtx` and optionally
//! `D.mtx`, `E.mtx`; a missing `D` or `E` is the zero block. An inverse
//! directory holds `Z11.mtx` … `Z33.mtx` (the upper block triangle).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use dsaddle_core::{BlockSystem, DMatrix, InverseBlocks, ToleranceConfig};

use crate::mm::{self, MmError};

pub const SYSTEM_FILES: [&str; 5] = ["A.mtx", "B.mtx", "C.mtx", "D.mtx", "E.mtx"];
pub const INVERSE_FILES: [&str; 6] = [
    "Z11.mtx", "Z12.mtx", "Z13.mtx", "Z22.mtx", "Z23.mtx", "Z33.mtx",
];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: not found", .0.display())]
    Missing(PathBuf),
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: MmError },
    #[error("{0}")]
    Invalid(#[from] dsaddle_core::Error),
}

fn read_block(dir: &Path, name: &str, required: bool) -> Result<Option<DMatrix<f64>>, LoadError> {
    let path = dir.join(name);
    if !path.exists() {
        return if required {
            Err(LoadError::Missing(path))
        } else {
            Ok(None)
        };
    }
    mm::read_path(&path)
        .map(Some)
        .map_err(|source| LoadError::Format { path, source })
}

/// Reads and validates a system; dimensions must be consistent.
pub fn load_system(dir: &Path, tol: &ToleranceConfig) -> Result<BlockSystem, LoadError> {
    if !dir.is_dir() {
        return Err(LoadError::Missing(dir.to_path_buf()));
    }
    let a = read_block(dir, "A.mtx", true)?.expect("required");
    let b = read_block(dir, "B.mtx", true)?.expect("required");
    let c = read_block(dir, "C.mtx", true)?.expect("required");
    let (m, p) = (b.nrows(), c.nrows());
    let d = read_block(dir, "D.mtx", false)?.unwrap_or_else(|| DMatrix::zeros(m, m));
    let e = read_block(dir, "E.mtx", false)?.unwrap_or_else(|| DMatrix::zeros(p, p));
    Ok(BlockSystem::with_tolerance(a, b, c, d, e, tol)?)
}

/// Writes all five blocks, zero ones included.
pub fn save_system(dir: &Path, sys: &BlockSystem) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, block) in SYSTEM_FILES
        .iter()
        .zip([sys.a(), sys.b(), sys.c(), sys.d(), sys.e()])
    {
        mm::write_path(&dir.join(name), block)?;
    }
    Ok(())
}

pub fn save_inverse(dir: &Path, inv: &InverseBlocks) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let blocks = [&inv.z11, &inv.z12, &inv.z13, &inv.z22, &inv.z23, &inv.z33];
    for (name, block) in INVERSE_FILES.iter().zip(blocks) {
        mm::write_path(&dir.join(name), block)?;
    }
    Ok(())
}

pub fn load_inverse(dir: &Path) -> Result<InverseBlocks, LoadError> {
    let mut blocks = Vec::with_capacity(6);
    for name in INVERSE_FILES {
        blocks.push(read_block(dir, name, true)?.expect("required"));
    }
    let [z11, z12, z13, z22, z23, z33]: [DMatrix<f64>; 6] = blocks.try_into().expect("six blocks");
    let (n, m, p) = (z11.nrows(), z22.nrows(), z33.nrows());
    let shapes = [(&z12, (n, m)), (&z13, (n, p)), (&z23, (m, p))];
    if z11.ncols() != n
        || z22.ncols() != m
        || z33.ncols() != p
        || shapes.iter().any(|(z, s)| z.shape() != *s)
    {
        return Err(dsaddle_core::Error::DimensionMismatch(format!(
            "inverse blocks do not form a ({n}, {m}, {p}) partition"
        ))
        .into());
    }
    Ok(InverseBlocks {
        z11,
        z12,
        z13,
        z22,
        z23,
        z33,
    })
}
