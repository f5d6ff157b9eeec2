//! Discrete geometric domains: 1D interval grids and triangle-meshed surfaces.
//!
//! A [`Mesh`] carries vertex positions, face connectivity, the derived
//! undirected edge set, per-vertex boundary flags, and per-vertex quadrature
//! weights (barycentric area for surfaces, trapezoidal length for curves).
//! Meshes are immutable after construction.

mod generators;
mod io;

pub use generators::{
    cylinder_default_rings, generate_cylinder, generate_disk, generate_interval, generate_sphere,
};
pub use io::{load_mesh, save_off, MeshFormat};

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
    boundary: Vec<bool>,
    vertex_weight: Vec<f64>,
    dim: u8,
}

impl Mesh {
    /// Builds a surface mesh from raw positions and triangles, deriving the
    /// edge set, boundary flags and barycentric vertex weights.
    pub fn from_triangles(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.len() < 3 || faces.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "surface mesh needs >= 3 vertices and >= 1 face, got {} / {}",
                vertices.len(),
                faces.len()
            )));
        }
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= vertices.len() {
                    return Err(Error::Topology(format!(
                        "face {fi} references vertex {v} but mesh has {} vertices",
                        vertices.len()
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Topology(format!("face {fi} repeats a vertex")));
            }
        }

        // Undirected edge -> number of incident faces.
        let mut edge_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = (a.min(b), a.max(b));
                *edge_faces.entry(key).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &edge_faces {
            if count > 2 {
                return Err(Error::Topology(format!(
                    "non-manifold edge ({a}, {b}) shared by {count} faces"
                )));
            }
        }

        let mut boundary = vec![false; vertices.len()];
        for (&(a, b), &count) in &edge_faces {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }

        let mut vertex_weight = vec![0.0; vertices.len()];
        for (fi, f) in faces.iter().enumerate() {
            let area = triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if area <= 0.0 || !area.is_finite() {
                return Err(Error::DegenerateGeometry(format!(
                    "face {fi} has zero or non-finite area"
                )));
            }
            for &v in f {
                vertex_weight[v] += area / 3.0;
            }
        }
        if let Some(v) = vertex_weight.iter().position(|&w| w <= 0.0) {
            return Err(Error::Topology(format!(
                "vertex {v} has no incident face (zero quadrature weight)"
            )));
        }

        let edges = edge_faces.keys().copied().collect();
        Ok(Mesh {
            vertices,
            faces,
            edges,
            boundary,
            vertex_weight,
            dim: 2,
        })
    }

    /// Builds a 1D polyline mesh (empty face list, consecutive edges,
    /// endpoints boundary-flagged, trapezoidal weights).
    pub(crate) fn from_polyline(vertices: Vec<Point3<f64>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "1D mesh needs >= 3 vertices, got {n}"
            )));
        }
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let mut boundary = vec![false; n];
        boundary[0] = true;
        boundary[n - 1] = true;
        let mut vertex_weight = vec![0.0; n];
        for &(a, b) in &edges {
            let len = (vertices[b] - vertices[a]).norm();
            if len <= 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "zero-length segment ({a}, {b})"
                )));
            }
            vertex_weight[a] += len / 2.0;
            vertex_weight[b] += len / 2.0;
        }
        Ok(Mesh {
            vertices,
            faces: Vec::new(),
            edges,
            boundary,
            vertex_weight,
            dim: 1,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn n_boundary_vertices(&self) -> usize {
        self.boundary.iter().filter(|&&b| b).count()
    }

    pub fn is_closed(&self) -> bool {
        self.n_boundary_vertices() == 0
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    pub fn total_weight(&self) -> f64 {
        self.vertex_weight.iter().sum()
    }

    /// Intrinsic dimension d, 1 for curves and 2 for surfaces.
    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Max/min edge length ratio; the discretization assumes a fairly
    /// uniform mesh so generators keep this small.
    pub fn edge_length_ratio(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = 0.0_f64;
        for &(a, b) in &self.edges {
            let len = (self.vertices[b] - self.vertices[a]).norm();
            min = min.min(len);
            max = max.max(len);
        }
        max / min
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (hi - lo).norm()
    }

    /// Area-weighted per-vertex unit normals (surfaces only).
    pub fn vertex_normals(&self) -> Result<Vec<Vector3<f64>>> {
        if self.dim != 2 {
            return Err(Error::Configuration(
                "vertex normals require a surface mesh".into(),
            ));
        }
        let mut normals = vec![Vector3::zeros(); self.vertices.len()];
        for f in &self.faces {
            let n = (self.vertices[f[1]] - self.vertices[f[0]])
                .cross(&(self.vertices[f[2]] - self.vertices[f[0]]));
            for &v in f {
                normals[v] += n;
            }
        }
        for n in &mut normals {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        Ok(normals)
    }

    /// Content hash over geometry and connectivity; spectral caches combine
    /// this with the weight scheme and boundary condition.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update([self.dim]);
        hasher.update((self.vertices.len() as u64).to_le_bytes());
        for p in &self.vertices {
            for i in 0..3 {
                hasher.update(p[i].to_le_bytes());
            }
        }
        hasher.update((self.faces.len() as u64).to_le_bytes());
        for f in &self.faces {
            for &v in f {
                hasher.update((v as u64).to_le_bytes());
            }
        }
        hex_string(&hasher.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub(crate) fn triangle_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
