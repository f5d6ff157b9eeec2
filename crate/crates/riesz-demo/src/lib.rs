//! wasm-bindgen surface for the browser demo.
//!
//! Exposes three operations on flat numeric buffers (no JS framework, no
//! serde): 1D fractional Gaussian bridge paths, Dirichlet fields on the
//! unit disk, and the Weyl truncation-tail estimate used by the N0 slider.

use wasm_bindgen::prelude::wasm_bindgen;

use rieszfield::laplacian::{assemble, BoundaryCondition, WeightScheme};
use rieszfield::mesh::generate_disk;
use rieszfield::spectral::{smallest_eigenpairs, IntervalBc};
use rieszfield::synthesis::{
    estimate_truncation_tail, synthesize_boundary_field, synthesize_path_1d, SynthesisConfig,
};

/// Samples a 1D path on `n_points` equally spaced grid points in [0,1].
/// `bc` is "dirichlet" (Gaussian bridge, pinned at both ends) or "mixed"
/// (Brownian-motion family, free right end).
#[wasm_bindgen]
pub fn path_1d(
    bc: &str,
    alpha: f64,
    n_terms: usize,
    seed: u64,
    n_points: usize,
) -> Result<Vec<f64>, String> {
    let bc: IntervalBc = bc.parse().map_err(|e| format!("{e}"))?;
    if n_points < 2 {
        return Err("n_points must be >= 2".into());
    }
    let grid: Vec<f64> = (0..n_points)
        .map(|i| i as f64 / (n_points - 1) as f64)
        .collect();
    synthesize_path_1d(bc, alpha, n_terms, &grid, seed)
        .map(|f| f.values)
        .map_err(|e| format!("{e}"))
}

/// A Dirichlet field on the unit disk with its triangulation, flattened
/// for direct upload into JS typed arrays.
#[wasm_bindgen]
pub struct DiskField {
    xy: Vec<f64>,
    triangles: Vec<u32>,
    values: Vec<f64>,
}

#[wasm_bindgen]
impl DiskField {
    #[wasm_bindgen(getter)]
    pub fn xy(&self) -> Vec<f64> {
        self.xy.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn triangles(&self) -> Vec<u32> {
        self.triangles.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
}

/// Synthesizes a Dirichlet field on the unit disk (eigensolve included;
/// keep `resolution` modest in the browser). The field is zero on the rim.
#[wasm_bindgen]
pub fn disk_field(
    resolution: usize,
    alpha: f64,
    n_terms: usize,
    seed: u64,
) -> Result<DiskField, String> {
    let run = || -> rieszfield::Result<DiskField> {
        let mesh = generate_disk(resolution, &[])?;
        let sys = assemble(&mesh, WeightScheme::InvSquareDistance, BoundaryCondition::Dirichlet)?;
        let spectra = smallest_eigenpairs(&sys, &mesh, n_terms, 1e-8)?;
        let cfg = SynthesisConfig {
            alpha,
            n_terms,
            seed,
            origin: None,
        };
        let field = synthesize_boundary_field(&spectra, &cfg)?;
        let xy = mesh
            .vertices()
            .iter()
            .flat_map(|p| [p.x, p.y])
            .collect();
        let triangles = mesh
            .faces()
            .iter()
            .flat_map(|f| f.iter().map(|&v| v as u32))
            .collect();
        Ok(DiskField {
            xy,
            triangles,
            values: field.values,
        })
    };
    run().map_err(|e| format!("{e}"))
}

/// Per-term and summed-tail variance estimates at truncation `n`, used to
/// annotate the N0 slider.
#[wasm_bindgen]
pub fn truncation_tail(alpha: f64, dim: u8, n: usize) -> Result<Vec<f64>, String> {
    estimate_truncation_tail(None, alpha, dim, n)
        .map(|e| vec![e.per_term, e.tail])
        .map_err(|e| format!("{e}"))
}
