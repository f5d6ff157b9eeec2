//! Self-similar fractional Brownian (Riesz) random fields over intervals
//! and meshed surfaces, simulated by spectral synthesis: assemble a
//! discrete Laplacian, extract its lowest eigenpairs, and sum a seeded
//! Gaussian series with eigenvalue-power weights.
//!
//! Pipeline: [`mesh`] (domains) -> [`laplacian`] (weighted graph Laplacian
//! with Dirichlet reduction) -> [`spectral`] (lowest eigenpairs, cached) ->
//! [`synthesis`] (seeded Gaussian series) -> [`export`] (CSV/PLY).
//! [`verify`] holds the covariance oracle and spectral checks.

pub mod error;
pub mod export;
pub mod laplacian;
pub mod mesh;
pub mod spectral;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
pub use laplacian::{assemble, BoundaryCondition, LaplacianSystem, WeightScheme};
pub use mesh::Mesh;
pub use spectral::{smallest_eigenpairs, IntervalBc, SpectralData};
pub use synthesis::{FieldSample, SynthesisConfig};
