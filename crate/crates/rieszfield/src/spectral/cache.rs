//! Binary spectral cache.
//!
//! Self-describing little-endian container: magic, format version, system
//! hash, solver metadata, then the raw eigenvalue and eigenvector arrays.
//! Round trips are bit-exact. Loading verifies the stored hash against the
//! expected one and refuses stale files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::DMatrix;

use super::{SpectralData, SpectralSource};
use crate::error::{Error, Result};
use crate::laplacian::{BoundaryCondition, WeightScheme};

const MAGIC: &[u8; 8] = b"RFSPECV\0";
const VERSION: u32 = 1;

fn fmt(msg: impl Into<String>) -> Error {
    Error::Format {
        line: 0,
        msg: msg.into(),
    }
}

fn scheme_code(s: WeightScheme) -> u8 {
    match s {
        WeightScheme::InvSquareDistance => 0,
        WeightScheme::Cotangent => 1,
    }
}

fn scheme_from(code: u8) -> Result<WeightScheme> {
    match code {
        0 => Ok(WeightScheme::InvSquareDistance),
        1 => Ok(WeightScheme::Cotangent),
        c => Err(fmt(format!("unknown weight scheme code {c}"))),
    }
}

fn bc_code(bc: BoundaryCondition) -> u8 {
    match bc {
        BoundaryCondition::Dirichlet => 0,
        BoundaryCondition::Closed => 1,
        BoundaryCondition::MixedInterval => 2,
    }
}

fn bc_from(code: u8) -> Result<BoundaryCondition> {
    match code {
        0 => Ok(BoundaryCondition::Dirichlet),
        1 => Ok(BoundaryCondition::Closed),
        2 => Ok(BoundaryCondition::MixedInterval),
        c => Err(fmt(format!("unknown boundary condition code {c}"))),
    }
}

pub fn spectral_cache_store(data: &SpectralData, path: &Path) -> Result<()> {
    crate::export::atomic_write(path, |file| {
        let mut w = BufWriter::new(file);
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(data.mesh_hash.len() as u32)?;
        w.write_all(data.mesh_hash.as_bytes())?;
        w.write_u8(scheme_code(data.scheme))?;
        w.write_u8(bc_code(data.bc))?;
        w.write_u8(data.dim)?;
        w.write_f64::<LittleEndian>(data.residual_tol)?;
        w.write_u64::<LittleEndian>(data.n_vertices as u64)?;
        w.write_u64::<LittleEndian>(data.interior_map.len() as u64)?;
        for &v in &data.interior_map {
            w.write_u64::<LittleEndian>(v as u64)?;
        }
        for &wt in &data.interior_weights {
            w.write_f64::<LittleEndian>(wt)?;
        }
        w.write_u64::<LittleEndian>(data.eigenvalues.len() as u64)?;
        for &l in &data.eigenvalues {
            w.write_f64::<LittleEndian>(l)?;
        }
        w.write_u64::<LittleEndian>(data.eigenvectors.nrows() as u64)?;
        w.write_u64::<LittleEndian>(data.eigenvectors.ncols() as u64)?;
        for col in data.eigenvectors.column_iter() {
            for &v in col.iter() {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        w.flush()?;
        Ok(())
    })
}

pub fn spectral_cache_load(path: &Path, expected_mesh_hash: Option<&str>) -> Result<SpectralData> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| fmt("truncated cache file (magic)"))?;
    if &magic != MAGIC {
        return Err(fmt("not a spectral cache file"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(|_| fmt("truncated"))?;
    if version != VERSION {
        return Err(fmt(format!("unsupported cache version {version}")));
    }
    let hash_len = r.read_u32::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    if hash_len > 1024 {
        return Err(fmt("corrupt hash length"));
    }
    let mut hash = vec![0u8; hash_len];
    r.read_exact(&mut hash).map_err(|_| fmt("truncated"))?;
    let mesh_hash = String::from_utf8(hash).map_err(|_| fmt("corrupt hash"))?;
    if let Some(expected) = expected_mesh_hash {
        if expected != mesh_hash {
            return Err(Error::StaleCache(format!(
                "cache was built for system {mesh_hash}, expected {expected}"
            )));
        }
    }
    let scheme = scheme_from(r.read_u8().map_err(|_| fmt("truncated"))?)?;
    let bc = bc_from(r.read_u8().map_err(|_| fmt("truncated"))?)?;
    let dim = r.read_u8().map_err(|_| fmt("truncated"))?;
    let residual_tol = r.read_f64::<LittleEndian>().map_err(|_| fmt("truncated"))?;
    let n_vertices = r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    let n_interior = r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    if n_interior > n_vertices {
        return Err(fmt("corrupt interior count"));
    }
    let mut interior_map = Vec::with_capacity(n_interior);
    for _ in 0..n_interior {
        interior_map.push(r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize);
    }
    let mut interior_weights = Vec::with_capacity(n_interior);
    for _ in 0..n_interior {
        interior_weights.push(r.read_f64::<LittleEndian>().map_err(|_| fmt("truncated"))?);
    }
    let n_eigs = r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    let mut eigenvalues = Vec::with_capacity(n_eigs);
    for _ in 0..n_eigs {
        eigenvalues.push(r.read_f64::<LittleEndian>().map_err(|_| fmt("truncated"))?);
    }
    let rows = r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    let cols = r.read_u64::<LittleEndian>().map_err(|_| fmt("truncated"))? as usize;
    if rows != n_interior || cols != n_eigs {
        return Err(fmt("corrupt eigenvector dimensions"));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        values.push(r.read_f64::<LittleEndian>().map_err(|_| fmt("truncated"))?);
    }
    let eigenvectors = DMatrix::from_vec(rows, cols, values);

    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        residual_tol,
        source: SpectralSource::Cache,
        mesh_hash,
        scheme,
        bc,
        interior_map,
        n_vertices,
        dim,
        interior_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::{assemble, BoundaryCondition, WeightScheme};
    use crate::mesh::generate_interval;
    use crate::spectral::smallest_eigenpairs;

    fn sample_data() -> SpectralData {
        let mesh = generate_interval(21).unwrap();
        let sys = assemble(&mesh, WeightScheme::InvSquareDistance, BoundaryCondition::Dirichlet)
            .unwrap();
        smallest_eigenpairs(&sys, &mesh, 5, 1e-10).unwrap()
    }

    #[test]
    fn round_trip_bit_exact() {
        let data = sample_data();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.bin");
        spectral_cache_store(&data, &path).unwrap();
        let loaded = spectral_cache_load(&path, Some(&data.mesh_hash)).unwrap();
        assert_eq!(loaded.eigenvalues, data.eigenvalues);
        assert_eq!(loaded.eigenvectors, data.eigenvectors);
        assert_eq!(loaded.interior_map, data.interior_map);
        assert_eq!(loaded.source, SpectralSource::Cache);
    }

    #[test]
    fn wrong_hash_is_stale() {
        let data = sample_data();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.bin");
        spectral_cache_store(&data, &path).unwrap();
        let err = spectral_cache_load(&path, Some("deadbeef")).unwrap_err();
        assert_eq!(err.category(), "stale-cache");
    }

    #[test]
    fn truncated_file_is_format_error() {
        let data = sample_data();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.bin");
        spectral_cache_store(&data, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        let err = spectral_cache_load(&path, None).unwrap_err();
        assert_eq!(err.category(), "format");
    }
}
