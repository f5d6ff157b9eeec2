//! Field exporters: CSV for 1D paths, ASCII PLY for surfaces, plus the
//! atomic-write helper used for every output file (write to a temp file in
//! the target directory, then rename; partial outputs are never left
//! behind).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportMode {
    /// Per-vertex scalar property `field`, positions unchanged.
    Scalar,
    /// Positions displaced by gain * field along vertex normals; the
    /// scalar property is retained.
    NormalDisplacement,
}

impl std::str::FromStr for ExportMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(ExportMode::Scalar),
            "displace" => Ok(ExportMode::NormalDisplacement),
            other => Err(Error::InvalidParameter(format!(
                "unknown export mode '{other}' (expected scalar or displace)"
            ))),
        }
    }
}

/// Writes `path` atomically: the producer writes into a temp file that is
/// renamed over the target only on success.
pub fn atomic_write(path: &Path, producer: impl FnOnce(&mut File) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    producer(tmp.as_file_mut())?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// CSV with columns t,value (t taken from the x-coordinate for interval
/// meshes). Floats are written shortest-round-trip, so rereads are exact.
pub fn write_csv_1d<W: Write>(w: &mut W, ts: &[f64], values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "t,value")?;
    for (t, v) in ts.iter().zip(values) {
        writeln!(w, "{t},{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_1d(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != "t,value" {
                return Err(Error::Format {
                    line: 1,
                    msg: "expected header 't,value'".into(),
                });
            }
            continue;
        }
        let mut parts = line.split(',');
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.and_then(|t| t.trim().parse().ok()).ok_or(Error::Format {
                line: i + 1,
                msg: "expected 't,value' row".into(),
            })
        };
        ts.push(parse(parts.next())?);
        values.push(parse(parts.next())?);
    }
    Ok((ts, values))
}

/// ASCII PLY with a per-vertex `field` property (double precision, exact
/// round trip). In displacement mode the positions are moved along the
/// vertex normals; faces are unchanged in both modes.
pub fn write_ply<W: Write>(
    w: &mut W,
    mesh: &Mesh,
    values: &[f64],
    mode: ExportMode,
    gain: f64,
) -> Result<()> {
    if values.len() != mesh.n_vertices() {
        return Err(Error::InvalidParameter(format!(
            "field has {} values for a {}-vertex mesh",
            values.len(),
            mesh.n_vertices()
        )));
    }
    let positions: Vec<Point3<f64>> = match mode {
        ExportMode::Scalar => mesh.vertices().to_vec(),
        ExportMode::NormalDisplacement => {
            if mesh.dim() != 2 {
                return Err(Error::Configuration(
                    "normal-displacement export requires a surface mesh".into(),
                ));
            }
            let normals = mesh.vertex_normals()?;
            mesh.vertices()
                .iter()
                .zip(&normals)
                .zip(values)
                .map(|((p, n), &v)| p + n * (gain * v))
                .collect()
        }
    };

    let mut w = BufWriter::new(w);
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", mesh.n_vertices())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "property double field")?;
    writeln!(w, "element face {}", mesh.faces().len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for (p, v) in positions.iter().zip(values) {
        writeln!(w, "{} {} {} {v}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a PLY written by [`write_ply`]: positions, faces and the
/// `field` property.
pub fn read_field_ply(text: &str) -> Result<(Vec<Point3<f64>>, Vec<[usize; 3]>, Vec<f64>)> {
    let mut lines = text.lines().enumerate();
    let mut n_vertices = None;
    let mut n_faces = None;
    let mut header_end = 0;
    for (i, line) in lines.by_ref() {
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.as_slice() {
            ["element", "vertex", n] => {
                n_vertices = n.parse().ok();
            }
            ["element", "face", n] => {
                n_faces = n.parse().ok();
            }
            ["end_header"] => {
                header_end = i + 1;
                break;
            }
            _ => {}
        }
    }
    let (n_vertices, n_faces) = match (n_vertices, n_faces) {
        (Some(v), Some(f)) => (v, f),
        _ => {
            return Err(Error::Format {
                line: header_end,
                msg: "PLY header missing element counts".into(),
            })
        }
    };
    let mut positions = Vec::with_capacity(n_vertices);
    let mut values = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (i, line) = lines.next().ok_or(Error::Format {
            line: header_end,
            msg: "truncated vertex list".into(),
        })?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 4 {
            return Err(Error::Format {
                line: i + 1,
                msg: "vertex row needs x y z field".into(),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Format {
                line: i + 1,
                msg: format!("bad number '{s}'"),
            })
        };
        positions.push(Point3::new(parse(t[0])?, parse(t[1])?, parse(t[2])?));
        values.push(parse(t[3])?);
    }
    let mut faces = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (i, line) = lines.next().ok_or(Error::Format {
            line: header_end,
            msg: "truncated face list".into(),
        })?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 || t[0] != "3" {
            return Err(Error::Format {
                line: i + 1,
                msg: "face row needs '3 a b c'".into(),
            });
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Format {
                line: i + 1,
                msg: format!("bad index '{s}'"),
            })
        };
        faces.push([parse(t[1])?, parse(t[2])?, parse(t[3])?]);
    }
    Ok((positions, faces, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_sphere;

    #[test]
    fn zero_field_displacement_keeps_positions() {
        let mesh = generate_sphere(1).unwrap();
        let zeros = vec![0.0; mesh.n_vertices()];
        let mut scalar = Vec::new();
        let mut displaced = Vec::new();
        write_ply(&mut scalar, &mesh, &zeros, ExportMode::Scalar, 1.0).unwrap();
        write_ply(&mut displaced, &mesh, &zeros, ExportMode::NormalDisplacement, 1.0).unwrap();
        assert_eq!(scalar, displaced);
    }

    #[test]
    fn zero_gain_same_as_scalar_positions() {
        let mesh = generate_sphere(1).unwrap();
        let field: Vec<f64> = (0..mesh.n_vertices()).map(|i| i as f64).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_ply(&mut a, &mesh, &field, ExportMode::Scalar, 0.0).unwrap();
        write_ply(&mut b, &mesh, &field, ExportMode::NormalDisplacement, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ply_structure_preserved_and_round_trips() {
        let mesh = generate_sphere(1).unwrap();
        let field: Vec<f64> = (0..mesh.n_vertices())
            .map(|i| crate::synthesis::gaussian_draw(3, i as u64 + 1))
            .collect();
        let mut buf = Vec::new();
        write_ply(&mut buf, &mesh, &field, ExportMode::Scalar, 1.0).unwrap();
        let (pos, faces, values) = read_field_ply(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(pos.len(), mesh.n_vertices());
        assert_eq!(faces.len(), mesh.faces().len());
        assert_eq!(values, field);
    }

    #[test]
    fn displacement_on_curve_rejected() {
        let mesh = crate::mesh::generate_interval(5).unwrap();
        let zeros = vec![0.0; 5];
        let mut buf = Vec::new();
        let err =
            write_ply(&mut buf, &mesh, &zeros, ExportMode::NormalDisplacement, 1.0).unwrap_err();
        assert_eq!(err.category(), "configuration");
    }

    #[test]
    fn csv_round_trip() {
        let ts = [0.0, 0.5, 1.0];
        let vals = [0.0, -1.2345678901234567, 3.14];
        let mut buf = Vec::new();
        write_csv_1d(&mut buf, &ts, &vals).unwrap();
        let (t2, v2) = read_csv_1d(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(t2, ts);
        assert_eq!(v2, vals);
    }
}
