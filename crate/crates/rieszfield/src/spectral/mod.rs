//! Eigenpairs of the discrete Laplacian: iterative solver, analytic 1D
//! spectra, and a binary cache for reuse across runs.

mod cache;
mod solver;

pub use cache::{spectral_cache_load, spectral_cache_store};
pub use solver::smallest_eigenpairs;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::laplacian::{BoundaryCondition, WeightScheme};

/// Relative threshold below which a computed eigenvalue is treated as the
/// kernel of a closed-manifold Laplacian.
pub const KERNEL_RELATIVE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpectralSource {
    IterativeSolver,
    Analytic,
    Cache,
}

/// The lowest eigenpairs of a Laplacian system.
///
/// Eigenvalues ascend; eigenvectors are columns over the retained
/// (interior) vertices, normalized against the vertex quadrature weights
/// (sum of w(x) * phi(x)^2 = 1) with a deterministic sign convention.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub residual_tol: f64,
    pub source: SpectralSource,
    pub mesh_hash: String,
    pub scheme: WeightScheme,
    pub bc: BoundaryCondition,
    /// Matrix row -> original vertex index.
    pub interior_map: Vec<usize>,
    pub n_vertices: usize,
    /// Intrinsic dimension of the underlying mesh.
    pub dim: u8,
    pub interior_weights: Vec<f64>,
}

impl SpectralData {
    pub fn n_computed(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn kernel_threshold(&self) -> f64 {
        KERNEL_RELATIVE_THRESHOLD * self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of leading zero (kernel) modes.
    pub fn n_kernel_modes(&self) -> usize {
        let thr = self.kernel_threshold();
        self.eigenvalues.iter().take_while(|&&l| l <= thr).count()
    }

    /// Mode k (0-based) embedded into the full vertex set, zero on deleted
    /// boundary vertices.
    pub fn embed_mode(&self, k: usize) -> Vec<f64> {
        let mut full = vec![0.0; self.n_vertices];
        for (row, &v) in self.interior_map.iter().enumerate() {
            full[v] = self.eigenvectors[(row, k)];
        }
        full
    }

    /// Max deviation of the weighted Gram matrix from the identity.
    ///
    /// Exact quadrature orthonormality of plain-eigenproblem eigenvectors
    /// only holds where the quadrature weights are constant over the
    /// retained vertices (e.g. Dirichlet interval grids); elsewhere this is
    /// a diagnostic, not an invariant.
    pub fn quadrature_orthonormality_error(&self) -> f64 {
        let k = self.n_computed();
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in a..k {
                let mut s = 0.0;
                for (row, &w) in self.interior_weights.iter().enumerate() {
                    s += w * self.eigenvectors[(row, a)] * self.eigenvectors[(row, b)];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Clamps near-zero eigenvalues, normalizes columns against the quadrature
/// weights, and applies the sign convention.
pub(crate) fn finalize_modes(
    eigenvalues: &mut [f64],
    vectors: &mut DMatrix<f64>,
    weights: &[f64],
    matrix_scale: f64,
) {
    let lambda_max = eigenvalues.last().copied().unwrap_or(0.0);
    let threshold = (KERNEL_RELATIVE_THRESHOLD * lambda_max).max(1e-12 * matrix_scale);
    for l in eigenvalues.iter_mut() {
        if l.abs() <= threshold || *l < 0.0 {
            *l = l.max(0.0);
            if *l <= threshold {
                *l = 0.0;
            }
        }
    }
    for k in 0..vectors.ncols() {
        let mut col = vectors.column_mut(k);
        let norm2: f64 = col
            .iter()
            .zip(weights)
            .map(|(v, &w)| w * v * v)
            .sum();
        if norm2 > 0.0 {
            col /= norm2.sqrt();
        }
        let max_abs = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let lead = col.iter().find(|v| v.abs() > 1e-8 * max_abs);
        if let Some(&lead) = lead {
            if lead < 0.0 {
                col.neg_mut();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalBc {
    /// f(0) = f(1) = 0; eigenvalues (k pi)^2.
    Dirichlet,
    /// f(0) = 0, f'(1) = 0; eigenvalues ((k - 1/2) pi)^2.
    Mixed,
}

impl std::str::FromStr for IntervalBc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(IntervalBc::Dirichlet),
            "mixed" => Ok(IntervalBc::Mixed),
            other => Err(Error::InvalidParameter(format!(
                "unknown interval boundary condition '{other}'"
            ))),
        }
    }
}

/// Exact continuum eigenvalue and eigenfunction value for the unit
/// interval (L^2-normalized eigenfunctions).
pub fn analytic_interval_spectrum(bc: IntervalBc, k: usize, x: f64) -> (f64, f64) {
    assert!(k >= 1, "mode index k must be >= 1");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0,1]");
    let freq = match bc {
        IntervalBc::Dirichlet => k as f64 * std::f64::consts::PI,
        IntervalBc::Mixed => (k as f64 - 0.5) * std::f64::consts::PI,
    };
    // sin(k*pi) is zero analytically but not in floating point; the bridge
    // must vanish exactly at both endpoints.
    let phi = if bc == IntervalBc::Dirichlet && (x == 0.0 || x == 1.0) {
        0.0
    } else {
        2.0_f64.sqrt() * (freq * x).sin()
    };
    (freq * freq, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_eigenvalues() {
        let pi = std::f64::consts::PI;
        let (l1, _) = analytic_interval_spectrum(IntervalBc::Mixed, 1, 0.0);
        assert!((l1 - pi * pi / 4.0).abs() < 1e-12);
        assert!((l1 - 2.4674).abs() < 1e-3);
        let (l1d, _) = analytic_interval_spectrum(IntervalBc::Dirichlet, 1, 0.0);
        assert!((l1d - pi * pi).abs() < 1e-12);
        assert!((l1d - 9.8696).abs() < 1e-3);
    }

    #[test]
    fn dirichlet_eigenfunction_zero_at_half_for_k2() {
        let (_, phi) = analytic_interval_spectrum(IntervalBc::Dirichlet, 2, 0.5);
        assert!(phi.abs() < 1e-12);
    }

    #[test]
    fn eigenfunctions_unit_l2_norm() {
        // Quadrature check of the continuum normalization.
        for bc in [IntervalBc::Dirichlet, IntervalBc::Mixed] {
            for k in [1, 3, 7] {
                let n = 20001;
                let h = 1.0 / (n - 1) as f64;
                let mut s = 0.0;
                for i in 0..n {
                    let x = i as f64 * h;
                    let (_, phi) = analytic_interval_spectrum(bc, k, x);
                    let w = if i == 0 || i == n - 1 { h / 2.0 } else { h };
                    s += w * phi * phi;
                }
                assert!((s - 1.0).abs() < 1e-6, "bc {bc:?} k {k}: {s}");
            }
        }
    }
}
