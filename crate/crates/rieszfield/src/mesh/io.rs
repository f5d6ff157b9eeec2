//! ASCII OFF and OBJ readers plus an OFF writer.
//!
//! Only positions and faces are read; OBJ normals and texture coordinates
//! are ignored. Polygonal faces are fan-triangulated. An OFF file with zero
//! faces is read back as a 1D polyline (this is how `mesh --shape interval`
//! round-trips through the CLI).

use std::fs;
use std::path::Path;

use nalgebra::Point3;

use super::Mesh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::InvalidParameter(format!(
                "unknown mesh format '{other}' (expected off or obj)"
            ))),
        }
    }
}

/// Loads a mesh, inferring the format from the extension unless given.
pub fn load_mesh(path: &Path, format: Option<MeshFormat>) -> Result<Mesh> {
    let format = match format {
        Some(f) => f,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some(ext) => ext.parse()?,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "cannot infer mesh format for {}",
                    path.display()
                )))
            }
        },
    };
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| fmt_err(line, format!("expected number, got '{tok}'")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| fmt_err(line, format!("expected index, got '{tok}'")))
}

pub(crate) fn parse_off(text: &str) -> Result<Mesh> {
    // (line_number, tokens), comments and blanks stripped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (lno, header) = lines.next().ok_or_else(|| fmt_err(1, "empty OFF file"))?;
    // The counts may share the header line ("OFF 3 1 0") or follow it.
    let mut toks: Vec<&str> = header.split_whitespace().collect();
    if toks[0] != "OFF" {
        return Err(fmt_err(lno, "missing OFF header"));
    }
    toks.remove(0);
    let (lno, toks) = if toks.is_empty() {
        let (lno, counts) = lines
            .next()
            .ok_or_else(|| fmt_err(lno, "missing OFF counts line"))?;
        (lno, counts.split_whitespace().collect::<Vec<_>>())
    } else {
        (lno, toks)
    };
    if toks.len() < 2 {
        return Err(fmt_err(lno, "OFF counts line needs vertex and face counts"));
    }
    let n_vertices = parse_usize(toks[0], lno)?;
    let n_faces = parse_usize(toks[1], lno)?;

    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| fmt_err(lno, "unexpected end of file in vertex list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(fmt_err(lno, "vertex line needs 3 coordinates"));
        }
        vertices.push(Point3::new(
            parse_f64(t[0], lno)?,
            parse_f64(t[1], lno)?,
            parse_f64(t[2], lno)?,
        ));
    }

    let mut faces = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (lno, l) = lines
            .next()
            .ok_or_else(|| fmt_err(lno, "unexpected end of file in face list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let k = parse_usize(t[0], lno)?;
        if k < 3 || t.len() < k + 1 {
            return Err(fmt_err(lno, "face line needs >= 3 vertex indices"));
        }
        let idx: Vec<usize> = t[1..=k]
            .iter()
            .map(|s| parse_usize(s, lno))
            .collect::<Result<_>>()?;
        for w in 1..k - 1 {
            faces.push([idx[0], idx[w], idx[w + 1]]);
        }
    }

    if faces.is_empty() {
        Mesh::from_polyline(vertices)
    } else {
        Mesh::from_triangles(vertices, faces)
    }
}

pub(crate) fn parse_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        match t[0] {
            "v" => {
                if t.len() < 4 {
                    return Err(fmt_err(lno, "v line needs 3 coordinates"));
                }
                vertices.push(Point3::new(
                    parse_f64(t[1], lno)?,
                    parse_f64(t[2], lno)?,
                    parse_f64(t[3], lno)?,
                ));
            }
            "f" => {
                if t.len() < 4 {
                    return Err(fmt_err(lno, "f line needs >= 3 indices"));
                }
                let idx: Vec<usize> = t[1..]
                    .iter()
                    .map(|s| {
                        let first = s.split('/').next().unwrap_or("");
                        let i = parse_usize(first, lno)?;
                        if i == 0 {
                            return Err(fmt_err(lno, "OBJ indices are 1-based"));
                        }
                        Ok(i - 1)
                    })
                    .collect::<Result<_>>()?;
                for w in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[w], idx[w + 1]]);
                }
            }
            _ => {} // vn, vt, usemtl, etc. ignored
        }
    }
    if vertices.len() < 3 || faces.is_empty() {
        return Err(fmt_err(0, "OBJ needs >= 3 vertices and >= 1 face"));
    }
    Mesh::from_triangles(vertices, faces)
}

/// Writes a mesh as ASCII OFF (faces empty for 1D meshes).
pub fn save_off<W: std::io::Write>(w: &mut W, mesh: &Mesh) -> Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.n_vertices(), mesh.faces().len())?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}
