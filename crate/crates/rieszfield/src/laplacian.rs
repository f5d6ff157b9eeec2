//! Weighted graph Laplacian assembly and Dirichlet boundary reduction.
//!
//! The default discretization is the inverse-square-distance graph
//! Laplacian: Lf(x) = sum over neighbors y of w_xy (f(x) - f(y)) with
//! w_xy = 1/|x - y|^2. A cotangent-weight scheme is available as an
//! alternative for nonuniform meshes.

use std::collections::VecDeque;

use nalgebra_sparse::{coo::CooMatrix, csr::CsrMatrix};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightScheme {
    /// w_xy = |x - y|^-2 (the default).
    InvSquareDistance,
    /// Cotangent edge weights, symmetrically normalized by the vertex
    /// quadrature weights and clamped to be nonnegative.
    Cotangent,
}

impl WeightScheme {
    pub fn tag(self) -> &'static str {
        match self {
            WeightScheme::InvSquareDistance => "invsq",
            WeightScheme::Cotangent => "cotan",
        }
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invsq" => Ok(WeightScheme::InvSquareDistance),
            "cotan" => Ok(WeightScheme::Cotangent),
            other => Err(Error::InvalidParameter(format!(
                "unknown weight scheme '{other}' (expected invsq or cotan)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BoundaryCondition {
    /// Zero values pinned on all boundary vertices (rows/columns deleted).
    Dirichlet,
    /// Closed manifold, full matrix; the kernel is the constant vector.
    Closed,
    /// 1D only: Dirichlet at the left endpoint, natural at the right.
    MixedInterval,
}

impl BoundaryCondition {
    pub fn tag(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Closed => "closed",
            BoundaryCondition::MixedInterval => "mixed",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "closed" => Ok(BoundaryCondition::Closed),
            "mixed" => Ok(BoundaryCondition::MixedInterval),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary condition '{other}' (expected dirichlet, closed or mixed)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    /// Sparse symmetric matrix over the retained (interior) vertices.
    pub matrix: CsrMatrix<f64>,
    /// Matrix row -> original vertex index.
    pub interior_map: Vec<usize>,
    pub scheme: WeightScheme,
    pub bc: BoundaryCondition,
    pub n_vertices: usize,
}

impl LaplacianSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inf_norm(&self) -> f64 {
        let mut max = 0.0_f64;
        for row in self.matrix.row_iter() {
            let s: f64 = row.values().iter().map(|v| v.abs()).sum();
            max = max.max(s);
        }
        max
    }

    /// Quadrature weights restricted to the retained vertices.
    pub fn interior_weights(&self, mesh: &Mesh) -> Vec<f64> {
        self.interior_map
            .iter()
            .map(|&v| mesh.vertex_weights()[v])
            .collect()
    }

    /// Embeds an interior vector into the full vertex set, zero on the
    /// deleted (boundary) vertices.
    pub fn embed(&self, interior: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_vertices];
        for (row, &v) in self.interior_map.iter().enumerate() {
            full[v] = interior[row];
        }
        full
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, row) in self.matrix.row_iter().enumerate() {
            let mut acc = 0.0;
            for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                acc += v * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Hash identifying (mesh geometry, scheme, bc); spectral caches are
    /// keyed on this.
    pub fn system_hash(&self, mesh: &Mesh) -> String {
        system_hash(mesh, self.scheme, self.bc)
    }
}

pub fn system_hash(mesh: &Mesh, scheme: WeightScheme, bc: BoundaryCondition) -> String {
    let mut hasher = Sha256::new();
    hasher.update(mesh.content_hash().as_bytes());
    hasher.update(scheme.tag().as_bytes());
    hasher.update(bc.tag().as_bytes());
    crate::mesh::hex_string(&hasher.finalize())
}

/// Per-edge weights for the given scheme, in the mesh's edge order.
fn edge_weights(mesh: &Mesh, scheme: WeightScheme) -> Result<Vec<f64>> {
    let verts = mesh.vertices();
    match scheme {
        WeightScheme::InvSquareDistance => mesh
            .edges()
            .iter()
            .map(|&(a, b)| {
                let d2 = (verts[b] - verts[a]).norm_squared();
                if d2 == 0.0 {
                    Err(Error::DegenerateGeometry(format!(
                        "coincident adjacent vertices ({a}, {b})"
                    )))
                } else {
                    Ok(1.0 / d2)
                }
            })
            .collect(),
        WeightScheme::Cotangent => {
            if mesh.dim() != 2 {
                return Err(Error::Configuration(
                    "cotangent weights require a surface mesh".into(),
                ));
            }
            let mut cot = std::collections::BTreeMap::new();
            for f in mesh.faces() {
                for (a, b, opp) in [(f[0], f[1], f[2]), (f[1], f[2], f[0]), (f[2], f[0], f[1])] {
                    let u = verts[a] - verts[opp];
                    let v = verts[b] - verts[opp];
                    let cross = u.cross(&v).norm();
                    if cross == 0.0 {
                        return Err(Error::DegenerateGeometry(format!(
                            "zero-area corner at vertex {opp}"
                        )));
                    }
                    *cot.entry((a.min(b), a.max(b))).or_insert(0.0) += u.dot(&v) / cross;
                }
            }
            let w = mesh.vertex_weights();
            Ok(mesh
                .edges()
                .iter()
                .map(|&(a, b)| {
                    let c = 0.5 * cot.get(&(a, b)).copied().unwrap_or(0.0);
                    // Clamp obtuse-triangle negatives to keep L positive
                    // semidefinite.
                    (c / (w[a] * w[b]).sqrt()).max(0.0)
                })
                .collect())
        }
    }
}

/// Assembles the weighted graph Laplacian with the requested boundary
/// treatment.
pub fn assemble(mesh: &Mesh, scheme: WeightScheme, bc: BoundaryCondition) -> Result<LaplacianSystem> {
    let n = mesh.n_vertices();
    let keep: Vec<bool> = match bc {
        BoundaryCondition::Dirichlet => {
            if mesh.is_closed() {
                return Err(Error::Configuration(
                    "dirichlet boundary condition requested on a closed mesh".into(),
                ));
            }
            mesh.boundary_flags().iter().map(|&b| !b).collect()
        }
        BoundaryCondition::Closed => {
            if !mesh.is_closed() {
                return Err(Error::Configuration(
                    "closed boundary condition requested on a mesh with boundary".into(),
                ));
            }
            vec![true; n]
        }
        BoundaryCondition::MixedInterval => {
            if mesh.dim() != 1 {
                return Err(Error::Configuration(
                    "mixed boundary condition is defined for 1D meshes only".into(),
                ));
            }
            let mut keep = vec![true; n];
            keep[0] = false;
            keep
        }
    };

    let interior_map: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    if interior_map.is_empty() {
        return Err(Error::Topology("no interior vertices remain".into()));
    }
    let mut row_of = vec![usize::MAX; n];
    for (row, &v) in interior_map.iter().enumerate() {
        row_of[v] = row;
    }

    check_interior_connected(mesh, &keep)?;

    let weights = edge_weights(mesh, scheme)?;
    let m = interior_map.len();
    let mut coo = CooMatrix::new(m, m);
    let mut diag = vec![0.0; m];
    for (&(a, b), &w) in mesh.edges().iter().zip(&weights) {
        match (keep[a], keep[b]) {
            (true, true) => {
                coo.push(row_of[a], row_of[b], -w);
                coo.push(row_of[b], row_of[a], -w);
                diag[row_of[a]] += w;
                diag[row_of[b]] += w;
            }
            // Edges to a deleted boundary vertex still contribute to the
            // interior diagonal (pinning f = 0 there).
            (true, false) => diag[row_of[a]] += w,
            (false, true) => diag[row_of[b]] += w,
            (false, false) => {}
        }
    }
    for (row, &d) in diag.iter().enumerate() {
        coo.push(row, row, d);
    }

    Ok(LaplacianSystem {
        matrix: CsrMatrix::from(&coo),
        interior_map,
        scheme,
        bc,
        n_vertices: n,
    })
}

fn check_interior_connected(mesh: &Mesh, keep: &[bool]) -> Result<()> {
    let n = mesh.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in mesh.edges() {
        if keep[a] && keep[b] {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let start = match (0..n).find(|&v| keep[v]) {
        Some(v) => v,
        None => return Ok(()),
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1usize;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    let total = keep.iter().filter(|&&k| k).count();
    if count != total {
        return Err(Error::Topology(format!(
            "interior vertex graph is disconnected ({count} of {total} reachable)"
        )));
    }
    Ok(())
}

/// Applies the full (no boundary reduction) graph Laplacian to a
/// per-vertex function; used to cross-check the Dirichlet reduction.
pub fn apply_full_graph_laplacian(mesh: &Mesh, scheme: WeightScheme, f: &[f64]) -> Result<Vec<f64>> {
    let weights = edge_weights(mesh, scheme)?;
    let mut out = vec![0.0; mesh.n_vertices()];
    for (&(a, b), &w) in mesh.edges().iter().zip(&weights) {
        out[a] += w * (f[a] - f[b]);
        out[b] += w * (f[b] - f[a]);
    }
    Ok(out)
}

/// Dumps a symmetric sparse matrix in Matrix Market coordinate format
/// (lower triangle, 1-based indices).
pub fn write_matrix_market<W: std::io::Write>(w: &mut W, m: &CsrMatrix<f64>) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    let nnz_lower = m
        .triplet_iter()
        .filter(|&(i, j, _)| i >= j)
        .count();
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), nnz_lower)?;
    for (i, j, v) in m.triplet_iter() {
        if i >= j {
            writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}
