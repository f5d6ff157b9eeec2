//! Statistical and numerical verification: Monte-Carlo covariance oracles,
//! interval spectral-convergence studies, sphere multiplicity structure,
//! and Weyl-tail decay checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::{assemble, BoundaryCondition, WeightScheme};
use crate::mesh::generate_interval;
use crate::spectral::{analytic_interval_spectrum, smallest_eigenpairs, IntervalBc, SpectralData};

/// Green's-function covariance of Brownian motion on [0,1].
pub fn min_kernel(s: f64, t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t));
    s.min(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub grid: Vec<f64>,
    /// Empirical second-moment matrix, row-major, exactly symmetric.
    pub empirical: Vec<Vec<f64>>,
    pub analytic: Vec<Vec<f64>>,
    pub max_abs_error: f64,
    pub n_samples: usize,
}

/// Draws `n_samples` independent fields (sample i uses seed base+i), forms
/// the empirical covariance over the grid and compares it to the analytic
/// kernel. The accumulation order is fixed, so the report is deterministic
/// for a given (generator, base seed).
pub fn covariance_test<G>(
    generator: G,
    kernel: impl Fn(f64, f64) -> f64,
    grid: &[f64],
    n_samples: usize,
    base_seed: u64,
) -> Result<CovarianceReport>
where
    G: Fn(u64) -> Result<Vec<f64>>,
{
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(
            "covariance test needs n_samples >= 1000".into(),
        ));
    }
    let m = grid.len();
    // Accumulate the upper triangle only and mirror at the end, so the
    // matrix is symmetric by construction.
    let mut acc = vec![0.0_f64; m * (m + 1) / 2];
    for i in 0..n_samples {
        let sample = generator(base_seed.wrapping_add(i as u64))?;
        if sample.len() != m {
            return Err(Error::InvalidParameter(format!(
                "generator returned {} values for a {m}-point grid",
                sample.len()
            )));
        }
        let mut idx = 0;
        for a in 0..m {
            let va = sample[a];
            for b in a..m {
                acc[idx] += va * sample[b];
                idx += 1;
            }
        }
    }
    let inv = 1.0 / n_samples as f64;
    let mut empirical = vec![vec![0.0; m]; m];
    let mut idx = 0;
    for a in 0..m {
        for b in a..m {
            let v = acc[idx] * inv;
            empirical[a][b] = v;
            empirical[b][a] = v;
            idx += 1;
        }
    }
    let mut analytic = vec![vec![0.0; m]; m];
    let mut max_abs_error = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            analytic[a][b] = kernel(grid[a], grid[b]);
            max_abs_error = max_abs_error.max((empirical[a][b] - analytic[a][b]).abs());
        }
    }
    Ok(CovarianceReport {
        grid: grid.to_vec(),
        empirical,
        analytic,
        max_abs_error,
        n_samples,
    })
}

/// Exact covariance of the N0-truncated series: sum over k <= N0 of
/// lambda_k^-(1/2+alpha) phi_k(s) phi_k(t). Using this as the target
/// isolates Monte-Carlo noise from truncation bias.
pub fn truncated_interval_kernel(bc: IntervalBc, alpha: f64, n_terms: usize, s: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=n_terms {
        let (lambda, ps) = analytic_interval_spectrum(bc, k, s);
        let (_, pt) = analytic_interval_spectrum(bc, k, t);
        sum += lambda.powf(-(0.5 + alpha)) * ps * pt;
    }
    sum
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub mesh_sizes: Vec<usize>,
    /// eigenvalue_errors[r][n] = |discrete - analytic| for mode n at
    /// resolution r; NaN marks a solver failure at that entry.
    pub eigenvalue_errors: Vec<Vec<f64>>,
    /// L2-quadrature eigenfunction distances after sign alignment.
    pub eigenfunction_errors: Vec<Vec<f64>>,
    /// Per-mode convergence order fitted on eigenvalue errors vs h;
    /// empty unless >= 3 resolutions are present.
    pub fitted_rates: Vec<f64>,
}

/// Eigenvalue/eigenfunction convergence of the discrete interval Laplacian
/// against the analytic spectrum, across a resolution sweep.
pub fn spectral_convergence_study(
    bc: IntervalBc,
    resolutions: &[usize],
    n_modes: usize,
    scheme: WeightScheme,
) -> Result<ConvergenceReport> {
    if resolutions.len() < 2 {
        return Err(Error::InvalidParameter(
            "convergence study needs >= 2 resolutions".into(),
        ));
    }
    let sys_bc = match bc {
        IntervalBc::Dirichlet => BoundaryCondition::Dirichlet,
        IntervalBc::Mixed => BoundaryCondition::MixedInterval,
    };
    let mut eigenvalue_errors = Vec::new();
    let mut eigenfunction_errors = Vec::new();
    for &n in resolutions {
        let mut val_errs = vec![f64::NAN; n_modes];
        let mut fun_errs = vec![f64::NAN; n_modes];
        let solved = generate_interval(n)
            .and_then(|mesh| {
                assemble(&mesh, scheme, sys_bc).map(|sys| (mesh, sys))
            })
            .and_then(|(mesh, sys)| {
                smallest_eigenpairs(&sys, &mesh, n_modes, 1e-10).map(|s| (mesh, s))
            });
        if let Ok((mesh, spec)) = solved {
            let h = 1.0 / (n - 1) as f64;
            for k in 1..=n_modes {
                let (lambda, _) = analytic_interval_spectrum(bc, k, 0.0);
                val_errs[k - 1] = (spec.eigenvalues[k - 1] - lambda).abs();
                // Sign-aligned L2 quadrature distance on the grid.
                let full = spec.embed_mode(k - 1);
                let mut d_plus = 0.0;
                let mut d_minus = 0.0;
                for (i, &v) in full.iter().enumerate() {
                    let x = i as f64 * h;
                    let (_, phi) = analytic_interval_spectrum(bc, k, x);
                    let w = mesh.vertex_weights()[i];
                    d_plus += w * (v - phi) * (v - phi);
                    d_minus += w * (v + phi) * (v + phi);
                }
                fun_errs[k - 1] = d_plus.min(d_minus).sqrt();
            }
        }
        eigenvalue_errors.push(val_errs);
        eigenfunction_errors.push(fun_errs);
    }

    let fitted_rates = if resolutions.len() >= 3 {
        (0..n_modes)
            .map(|mode| {
                let points: Vec<(f64, f64)> = resolutions
                    .iter()
                    .zip(&eigenvalue_errors)
                    .filter(|(_, errs)| errs[mode].is_finite() && errs[mode] > 0.0)
                    .map(|(&n, errs)| {
                        let h = 1.0 / (n - 1) as f64;
                        (h.ln(), errs[mode].ln())
                    })
                    .collect();
                fit_slope(&points)
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(ConvergenceReport {
        mesh_sizes: resolutions.to_vec(),
        eigenvalue_errors,
        eigenfunction_errors,
        fitted_rates,
    })
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    /// (mean eigenvalue, multiplicity) per detected cluster, ascending.
    pub clusters: Vec<(f64, usize)>,
    /// (second nonzero cluster mean) / (first nonzero cluster mean);
    /// 3 in the continuum (l(l+1): 6/2).
    pub ratio_second_to_first: f64,
}

/// Verifies the spherical-harmonic multiplicity structure 1/3/5 and the
/// scale-free cluster-mean ratio on closed-sphere spectra.
pub fn sphere_multiplicity_check(spectra: &SpectralData) -> Result<ClusterReport> {
    if spectra.n_computed() < 9 {
        return Err(Error::InvalidParameter(
            "multiplicity check needs >= 9 modes".into(),
        ));
    }
    let gap = 1e-6 * spectra.eigenvalues.last().unwrap();
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=spectra.n_computed() {
        let boundary = k == spectra.n_computed()
            || spectra.eigenvalues[k] - spectra.eigenvalues[k - 1] > gap;
        if boundary {
            let slice = &spectra.eigenvalues[start..k];
            clusters.push((slice.iter().sum::<f64>() / slice.len() as f64, slice.len()));
            start = k;
        }
    }

    let expected = [1usize, 3, 5];
    for (i, &size) in expected.iter().enumerate() {
        match clusters.get(i) {
            Some(&(_, got)) if got == size => {}
            Some(&(mean, got)) => {
                return Err(Error::StructureMismatch(format!(
                    "cluster {i} around {mean:.6e} has multiplicity {got}, expected {size} \
                     (clusters: {clusters:?})"
                )))
            }
            None => {
                return Err(Error::StructureMismatch(format!(
                    "only {} clusters detected, expected at least 3",
                    clusters.len()
                )))
            }
        }
    }
    if clusters[0].0 != 0.0 {
        return Err(Error::StructureMismatch(format!(
            "kernel cluster mean is {} instead of 0",
            clusters[0].0
        )));
    }
    let ratio = clusters[2].0 / clusters[1].0;
    if (ratio - 3.0).abs() > 0.3 {
        return Err(Error::StructureMismatch(format!(
            "nonzero cluster mean ratio {ratio} deviates from 3 by more than 10%"
        )));
    }
    Ok(ClusterReport {
        clusters,
        ratio_second_to_first: ratio,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    /// Slope of ln(per-term variance) vs ln(k) over k in [N, 2N].
    pub fitted_exponent: f64,
    /// Weyl prediction: -(1 + 2 alpha / d).
    pub predicted_exponent: f64,
    pub n_range: (usize, usize),
}

/// Fits the per-term mean-square decay lambda_k^-(d/2+alpha) around
/// indices N..2N and compares to the Weyl power law.
pub fn weyl_tail_check(eigenvalues: &[f64], alpha: f64, dim: u8, n_index: usize) -> Result<TailReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if n_index < 1 || eigenvalues.len() < 2 * n_index {
        return Err(Error::InvalidParameter(format!(
            "tail check at N={n_index} needs >= 2N modes, got {}",
            eigenvalues.len()
        )));
    }
    let exponent = dim as f64 / 2.0 + alpha;
    let points: Vec<(f64, f64)> = (n_index..=2 * n_index)
        .map(|k| {
            let v = eigenvalues[k - 1].powf(-exponent);
            ((k as f64).ln(), v.ln())
        })
        .collect();
    Ok(TailReport {
        fitted_exponent: fit_slope(&points),
        predicted_exponent: -(1.0 + 2.0 * alpha / dim as f64),
        n_range: (n_index, 2 * n_index),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synthesize_path_1d, gaussian_draw};

    #[test]
    fn min_kernel_basics() {
        assert_eq!(min_kernel(0.25, 0.75), 0.25);
        assert_eq!(min_kernel(0.6, 0.6), 0.6);
        assert_eq!(min_kernel(0.0, 0.9), 0.0);
    }

    #[test]
    fn covariance_needs_enough_samples() {
        let grid = [0.0, 0.5, 1.0];
        let err = covariance_test(|_| Ok(vec![0.0; 3]), min_kernel, &grid, 10, 0).unwrap_err();
        assert_eq!(err.category(), "invalid-parameter");
    }

    #[test]
    fn covariance_empirical_is_symmetric() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let report = covariance_test(
            |seed| Ok((0..11).map(|i| gaussian_draw(seed, i + 1)).collect()),
            |_, _| 0.0,
            &grid,
            1000,
            7,
        )
        .unwrap();
        for a in 0..11 {
            for b in 0..11 {
                assert_eq!(report.empirical[a][b], report.empirical[b][a]);
            }
        }
    }

    #[test]
    fn bridge_variance_zero_at_endpoints() {
        let grid = [0.0, 1.0];
        let report = covariance_test(
            |seed| {
                synthesize_path_1d(IntervalBc::Dirichlet, 0.5, 50, &grid, seed)
                    .map(|f| f.values)
            },
            min_kernel,
            &grid,
            1000,
            11,
        )
        .unwrap();
        assert_eq!(report.empirical[0][0], 0.0);
        assert_eq!(report.empirical[1][1], 0.0);
    }

    #[test]
    fn truncated_kernel_approaches_min() {
        let k = truncated_interval_kernel(IntervalBc::Mixed, 0.5, 2000, 0.3, 0.7);
        assert!((k - 0.3).abs() < 1e-3, "{k}");
    }

    #[test]
    fn convergence_study_interval() {
        let report = spectral_convergence_study(
            IntervalBc::Dirichlet,
            &[51, 101, 201, 401],
            5,
            WeightScheme::InvSquareDistance,
        )
        .unwrap();
        // Errors decrease monotonically with resolution.
        for mode in 0..5 {
            for r in 1..4 {
                assert!(
                    report.eigenvalue_errors[r][mode] < report.eigenvalue_errors[r - 1][mode]
                );
            }
        }
        for &rate in &report.fitted_rates {
            assert!((rate - 2.0).abs() <= 0.3, "fitted rate {rate}");
        }
    }

    #[test]
    fn convergence_study_needs_two_resolutions() {
        let err = spectral_convergence_study(
            IntervalBc::Dirichlet,
            &[101],
            3,
            WeightScheme::InvSquareDistance,
        )
        .unwrap_err();
        assert_eq!(err.category(), "invalid-parameter");
    }

    #[test]
    fn no_rate_fit_with_two_resolutions() {
        let report = spectral_convergence_study(
            IntervalBc::Dirichlet,
            &[51, 101],
            3,
            WeightScheme::InvSquareDistance,
        )
        .unwrap();
        assert!(report.fitted_rates.is_empty());
    }

    #[test]
    fn weyl_tail_analytic_interval() {
        let alpha = 0.5;
        let eigenvalues: Vec<f64> = (1..=400)
            .map(|k| (k as f64 * std::f64::consts::PI).powi(2))
            .collect();
        let report = weyl_tail_check(&eigenvalues, alpha, 1, 200).unwrap();
        let predicted = -(1.0 + 2.0 * alpha);
        assert!((report.fitted_exponent - predicted).abs() / predicted.abs() < 0.2);
    }

    #[test]
    fn weyl_tail_rejects_bad_alpha() {
        let eigenvalues: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        assert_eq!(
            weyl_tail_check(&eigenvalues, 0.0, 2, 5).unwrap_err().category(),
            "invalid-parameter"
        );
    }

    #[test]
    fn continuum_sphere_clusters() {
        // l(l+1) with multiplicity 2l+1: {0}, {2 x3}, {6 x5}.
        let mut eigenvalues = vec![0.0];
        eigenvalues.extend(std::iter::repeat(2.0).take(3));
        eigenvalues.extend(std::iter::repeat(6.0).take(5));
        let spectra = crate::spectral::SpectralData {
            eigenvalues,
            eigenvectors: nalgebra::DMatrix::zeros(1, 9),
            residual_tol: 1e-10,
            source: crate::spectral::SpectralSource::Analytic,
            mesh_hash: String::new(),
            scheme: WeightScheme::InvSquareDistance,
            bc: BoundaryCondition::Closed,
            interior_map: vec![0],
            n_vertices: 1,
            dim: 2,
            interior_weights: vec![1.0],
        };
        let report = sphere_multiplicity_check(&spectra).unwrap();
        assert_eq!(report.clusters[0].1, 1);
        assert_eq!(report.clusters[1].1, 3);
        assert_eq!(report.clusters[2].1, 5);
        assert_eq!(report.ratio_second_to_first, 3.0);
    }
}
