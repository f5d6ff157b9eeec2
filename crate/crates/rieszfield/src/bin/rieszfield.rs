//! Command-line front end: generate meshes, solve spectra with caching,
//! synthesize fields, rescale, and run statistical/spectral checks.
//!
//! Every flag can also come from a TOML config file (`--config`, one table
//! per subcommand); command-line flags override file values. All outputs
//! are written atomically and all randomness flows from `--seed`.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rieszfield::error::{Error, Result};
use rieszfield::export::{atomic_write, read_csv_1d, read_field_ply, write_csv_1d, write_ply, ExportMode};
use rieszfield::laplacian::{assemble, system_hash, write_matrix_market, BoundaryCondition, WeightScheme};
use rieszfield::mesh::{
    cylinder_default_rings, generate_cylinder, generate_disk, generate_interval, generate_sphere,
    load_mesh, save_off, Mesh, MeshFormat,
};
use rieszfield::spectral::{
    smallest_eigenpairs, spectral_cache_load, spectral_cache_store, IntervalBc, SpectralSource,
};
use rieszfield::synthesis::{
    self_similar_factor, synthesize_boundary_field, synthesize_path_1d, synthesize_riesz_field,
    SynthesisConfig,
};
use rieszfield::verify::{
    covariance_test, min_kernel, spectral_convergence_study, sphere_multiplicity_check,
    truncated_interval_kernel, weyl_tail_check,
};

#[derive(Parser)]
#[command(name = "rieszfield", version, about = "Fractional Brownian fields on intervals and meshed surfaces")]
struct Cli {
    /// TOML config file supplying defaults for any flag (one table per
    /// subcommand); explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a built-in mesh and write it as ASCII OFF.
    Mesh(MeshArgs),
    /// Assemble the Laplacian and solve/cache its lowest eigenpairs.
    Eigs(EigsArgs),
    /// Synthesize a field from a spectral cache (CSV for 1D, PLY for surfaces).
    Synth(SynthArgs),
    /// Apply the self-similar scale c^alpha to an exported field.
    Rescale(RescaleArgs),
    /// Run a named statistical/spectral check and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MeshArgs {
    /// One of: interval, disk, disk-holes, cylinder, sphere.
    #[arg(long)]
    shape: Option<String>,
    /// Comma-separated key=value generator parameters, e.g. "n=101" or
    /// "rings=40,holes=0.4:0.0:0.15;-0.3:0.3:0.15".
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EigsArgs {
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Mesh format (off/obj); inferred from the extension when absent.
    #[arg(long)]
    format: Option<String>,
    /// Edge-weight scheme: invsq (default) or cotan.
    #[arg(long)]
    scheme: Option<String>,
    /// Boundary condition: dirichlet, closed, or mixed (1D).
    #[arg(long)]
    bc: Option<String>,
    #[arg(long)]
    n_modes: Option<usize>,
    /// Residual tolerance for the eigensolver (default 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    /// Spectral cache file; reused when it already matches.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Optional Matrix Market dump of the assembled Laplacian.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Optional JSON export of the computed eigenvalues.
    #[arg(long)]
    eigenvalues_out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SynthArgs {
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Mesh file the cache was built from (geometry for the export).
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_terms: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Origin vertex (required for closed manifolds).
    #[arg(long)]
    origin: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export mode: scalar (default) or displace.
    #[arg(long)]
    export: Option<String>,
    /// Displacement gain; default 0.1 * bbox diagonal / max |field|.
    #[arg(long)]
    gain: Option<f64>,
}

#[derive(Debug, Default, Args, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RescaleArgs {
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    /// Spatial scale factor c > 0.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct VerifyArgs {
    /// One of: covariance, interval-convergence, sphere-clusters, weyl-tail.
    #[arg(long)]
    check: Option<String>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_terms: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Interval boundary condition for covariance (mixed or dirichlet).
    #[arg(long)]
    bc: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Pass/fail tolerance for the chosen check.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated mesh resolutions for interval-convergence.
    #[arg(long)]
    resolutions: Option<String>,
    #[arg(long)]
    n_modes: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    subdivisions: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Domain for weyl-tail: interval (default) or sphere.
    #[arg(long)]
    domain: Option<String>,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    mesh: MeshArgs,
    eigs: EigsArgs,
    synth: SynthArgs,
    rescale: RescaleArgs,
    verify: VerifyArgs,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Error::Configuration(format!("bad config file: {e}")))?
        }
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Mesh(a) => cmd_mesh(merge_mesh(a, file.mesh)),
        Command::Eigs(a) => cmd_eigs(merge_eigs(a, file.eigs)),
        Command::Synth(a) => cmd_synth(merge_synth(a, file.synth)),
        Command::Rescale(a) => cmd_rescale(merge_rescale(a, file.rescale)),
        Command::Verify(a) => cmd_verify(merge_verify(a, file.verify)),
    }
}

fn merge_mesh(a: MeshArgs, f: MeshArgs) -> MeshArgs {
    MeshArgs {
        shape: a.shape.or(f.shape),
        params: a.params.or(f.params),
        out: a.out.or(f.out),
    }
}

fn merge_eigs(a: EigsArgs, f: EigsArgs) -> EigsArgs {
    EigsArgs {
        mesh: a.mesh.or(f.mesh),
        format: a.format.or(f.format),
        scheme: a.scheme.or(f.scheme),
        bc: a.bc.or(f.bc),
        n_modes: a.n_modes.or(f.n_modes),
        tol: a.tol.or(f.tol),
        cache: a.cache.or(f.cache),
        matrix_out: a.matrix_out.or(f.matrix_out),
        eigenvalues_out: a.eigenvalues_out.or(f.eigenvalues_out),
    }
}

fn merge_synth(a: SynthArgs, f: SynthArgs) -> SynthArgs {
    SynthArgs {
        cache: a.cache.or(f.cache),
        mesh: a.mesh.or(f.mesh),
        alpha: a.alpha.or(f.alpha),
        n_terms: a.n_terms.or(f.n_terms),
        seed: a.seed.or(f.seed),
        origin: a.origin.or(f.origin),
        out: a.out.or(f.out),
        export: a.export.or(f.export),
        gain: a.gain.or(f.gain),
    }
}

fn merge_rescale(a: RescaleArgs, f: RescaleArgs) -> RescaleArgs {
    RescaleArgs {
        input: a.input.or(f.input),
        c: a.c.or(f.c),
        alpha: a.alpha.or(f.alpha),
        out: a.out.or(f.out),
    }
}

fn merge_verify(a: VerifyArgs, f: VerifyArgs) -> VerifyArgs {
    VerifyArgs {
        check: a.check.or(f.check),
        report: a.report.or(f.report),
        alpha: a.alpha.or(f.alpha),
        n_terms: a.n_terms.or(f.n_terms),
        samples: a.samples.or(f.samples),
        grid_points: a.grid_points.or(f.grid_points),
        bc: a.bc.or(f.bc),
        seed: a.seed.or(f.seed),
        tolerance: a.tolerance.or(f.tolerance),
        resolutions: a.resolutions.or(f.resolutions),
        n_modes: a.n_modes.or(f.n_modes),
        scheme: a.scheme.or(f.scheme),
        subdivisions: a.subdivisions.or(f.subdivisions),
        tol: a.tol.or(f.tol),
        domain: a.domain.or(f.domain),
    }
}

fn require<T>(opt: Option<T>, flag: &str) -> Result<T> {
    opt.ok_or_else(|| Error::Configuration(format!("missing required flag --{flag}")))
}

// ---------------------------------------------------------------- mesh --

fn parse_params(s: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for item in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("bad generator parameter '{item}' (expected key=value)"))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn take_num<T: std::str::FromStr>(
    map: &mut HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad value '{v}' for parameter '{key}'"))),
    }
}

fn parse_holes(s: &str) -> Result<Vec<([f64; 2], f64)>> {
    s.split(';')
        .map(|triple| {
            let parts: Vec<&str> = triple.split(':').collect();
            let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
            match nums.as_deref() {
                Some([x, y, r]) => Ok(([*x, *y], *r)),
                _ => Err(Error::InvalidParameter(format!(
                    "bad hole '{triple}' (expected cx:cy:radius)"
                ))),
            }
        })
        .collect()
}

fn cmd_mesh(args: MeshArgs) -> Result<()> {
    let shape = require(args.shape, "shape")?;
    let out = require(args.out, "out")?;
    let mut params = parse_params(args.params.as_deref().unwrap_or(""))?;
    let mesh = match shape.as_str() {
        "interval" => generate_interval(take_num(&mut params, "n", 101)?)?,
        "disk" => generate_disk(take_num(&mut params, "rings", 40)?, &[])?,
        "disk-holes" => {
            let rings = take_num(&mut params, "rings", 40)?;
            let holes = parse_holes(&params.remove("holes").ok_or_else(|| {
                Error::InvalidParameter("disk-holes needs holes=cx:cy:r;... in --params".into())
            })?)?;
            generate_disk(rings, &holes)?
        }
        "cylinder" => {
            let length = take_num(&mut params, "length", 1.0)?;
            let circ = take_num(&mut params, "circ", 32)?;
            let rings = take_num(&mut params, "rings", cylinder_default_rings(length, circ))?;
            generate_cylinder(length, circ, rings)?
        }
        "sphere" => generate_sphere(take_num(&mut params, "subdivisions", 3)?)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown shape '{other}' (expected interval, disk, disk-holes, cylinder or sphere)"
            )))
        }
    };
    if let Some(k) = params.keys().next() {
        return Err(Error::InvalidParameter(format!(
            "unknown parameter '{k}' for shape '{shape}'"
        )));
    }
    atomic_write(&out, |f| save_off(f, &mesh))?;
    println!(
        "mesh: shape={shape} vertices={} faces={} boundary={} hash={} -> {}",
        mesh.n_vertices(),
        mesh.faces().len(),
        mesh.n_boundary_vertices(),
        mesh.content_hash(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- eigs --

fn cmd_eigs(args: EigsArgs) -> Result<()> {
    let mesh_path = require(args.mesh, "mesh")?;
    let cache_path = require(args.cache, "cache")?;
    let n_modes = require(args.n_modes, "n-modes")?;
    let scheme: WeightScheme = args.scheme.as_deref().unwrap_or("invsq").parse()?;
    let bc: BoundaryCondition = require(args.bc, "bc")?.parse()?;
    let tol = args.tol.unwrap_or(1e-8);
    let format = args.format.as_deref().map(str::parse::<MeshFormat>).transpose()?;

    let mesh = load_mesh(&mesh_path, format)?;
    let expected = system_hash(&mesh, scheme, bc);

    let cached = if cache_path.exists() {
        spectral_cache_load(&cache_path, Some(&expected))
            .ok()
            .filter(|d| d.n_computed() >= n_modes && d.residual_tol <= tol)
    } else {
        None
    };
    let data = match cached {
        Some(d) => {
            println!("cache hit: {} ({} modes, source=cache)", cache_path.display(), d.n_computed());
            d
        }
        None => {
            let sys = assemble(&mesh, scheme, bc)?;
            let d = smallest_eigenpairs(&sys, &mesh, n_modes, tol)?;
            spectral_cache_store(&d, &cache_path)?;
            println!(
                "solved {} modes (tol {tol:.1e}) -> {}",
                d.n_computed(),
                cache_path.display()
            );
            d
        }
    };

    if let Some(path) = args.matrix_out {
        let sys = assemble(&mesh, scheme, bc)?;
        atomic_write(&path, |f| write_matrix_market(f, &sys.matrix))?;
        println!("matrix -> {}", path.display());
    }
    if let Some(path) = args.eigenvalues_out {
        let body = serde_json::to_string_pretty(&json!({
            "mesh_hash": data.mesh_hash,
            "scheme": data.scheme.tag(),
            "bc": data.bc.tag(),
            "residual_tol": data.residual_tol,
            "source": source_tag(data.source),
            "eigenvalues": data.eigenvalues,
        }))
        .expect("report serialization");
        atomic_write(&path, |f| Ok(f.write_all(body.as_bytes())?))?;
        println!("eigenvalues -> {}", path.display());
    }

    let shown: Vec<String> = data
        .eigenvalues
        .iter()
        .take(6)
        .map(|l| format!("{l:.6}"))
        .collect();
    println!(
        "eigs: hash={} source={} lambda=[{}{}]",
        data.mesh_hash,
        source_tag(data.source),
        shown.join(", "),
        if data.n_computed() > 6 { ", ..." } else { "" }
    );
    Ok(())
}

fn source_tag(s: SpectralSource) -> &'static str {
    match s {
        SpectralSource::IterativeSolver => "solver",
        SpectralSource::Analytic => "analytic",
        SpectralSource::Cache => "cache",
    }
}

// --------------------------------------------------------------- synth --

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let cache_path = require(args.cache, "cache")?;
    let mesh_path = require(args.mesh, "mesh")?;
    let out = require(args.out, "out")?;
    let cfg = SynthesisConfig {
        alpha: require(args.alpha, "alpha")?,
        n_terms: require(args.n_terms, "n-terms")?,
        seed: require(args.seed, "seed")?,
        origin: args.origin,
    };
    let mode: ExportMode = args.export.as_deref().unwrap_or("scalar").parse()?;

    let mesh = load_mesh(&mesh_path, None)?;
    let data = spectral_cache_load(&cache_path, None)?;
    let expected = system_hash(&mesh, data.scheme, data.bc);
    if data.mesh_hash != expected {
        return Err(Error::StaleCache(format!(
            "cache {} was built for a different mesh/system (hash {} != {})",
            cache_path.display(),
            data.mesh_hash,
            expected
        )));
    }

    let field = match data.bc {
        BoundaryCondition::Closed => synthesize_riesz_field(&data, &cfg)?,
        _ => synthesize_boundary_field(&data, &cfg)?,
    };

    if data.dim == 1 {
        if mode == ExportMode::NormalDisplacement {
            return Err(Error::Configuration(
                "normal-displacement export requires a surface mesh".into(),
            ));
        }
        let ts: Vec<f64> = mesh.vertices().iter().map(|p| p.x).collect();
        atomic_write(&out, |f| write_csv_1d(f, &ts, &field.values))?;
    } else {
        let gain = match (mode, args.gain) {
            (ExportMode::Scalar, _) => 0.0,
            (_, Some(g)) => g,
            (_, None) => {
                let max = field.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if max > 0.0 {
                    0.1 * mesh.bounding_box_diagonal() / max
                } else {
                    0.0
                }
            }
        };
        atomic_write(&out, |f| write_ply(f, &mesh, &field.values, mode, gain))?;
    }
    println!(
        "synth: bc={} alpha={} n_terms={} seed={} tail~{:.3e} -> {}",
        field.bc,
        field.alpha,
        field.n_terms,
        cfg.seed,
        field.truncation_tail_estimate,
        out.display()
    );
    Ok(())
}

// ------------------------------------------------------------- rescale --

fn cmd_rescale(args: RescaleArgs) -> Result<()> {
    let input = require(args.input, "in")?;
    let out = require(args.out, "out")?;
    let c = require(args.c, "c")?;
    let alpha = require(args.alpha, "alpha")?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let factor = self_similar_factor(c, alpha)?;
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let text = std::fs::read_to_string(&input)?;
    match ext.as_str() {
        "csv" => {
            let (ts, mut values) = read_csv_1d(&text)?;
            values.iter_mut().for_each(|v| *v *= factor);
            atomic_write(&out, |f| write_csv_1d(f, &ts, &values))?;
        }
        "ply" => {
            let (positions, faces, mut values) = read_field_ply(&text)?;
            values.iter_mut().for_each(|v| *v *= factor);
            let mesh = Mesh::from_triangles(positions, faces)?;
            atomic_write(&out, |f| write_ply(f, &mesh, &values, ExportMode::Scalar, 0.0))?;
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "cannot rescale '.{other}' files (expected .csv or .ply)"
            )))
        }
    }
    println!("rescale: c={c} alpha={alpha} factor={factor} -> {}", out.display());
    Ok(())
}

// -------------------------------------------------------------- verify --

fn write_report(path: &Path, body: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(body).expect("report serialization");
    atomic_write(path, |f| Ok(f.write_all(text.as_bytes())?))
}

fn finish_check(path: &Path, check: &str, passed: bool, summary: String, body: serde_json::Value) -> Result<()> {
    write_report(path, &body)?;
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("{check}: {verdict} — {summary} (report: {})", path.display());
    if passed {
        Ok(())
    } else {
        Err(Error::StructureMismatch(format!("{check} check failed: {summary}")))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let check = require(args.check.clone(), "check")?;
    let report = require(args.report.clone(), "report")?;
    match check.as_str() {
        "covariance" => verify_covariance(&args, &report),
        "interval-convergence" => verify_convergence(&args, &report),
        "sphere-clusters" => verify_clusters(&args, &report),
        "weyl-tail" => verify_weyl(&args, &report),
        other => Err(Error::InvalidParameter(format!(
            "unknown check '{other}' (expected covariance, interval-convergence, sphere-clusters or weyl-tail)"
        ))),
    }
}

fn verify_covariance(args: &VerifyArgs, report_path: &Path) -> Result<()> {
    let alpha = args.alpha.unwrap_or(0.5);
    let n_terms = args.n_terms.unwrap_or(500);
    let samples = args.samples.unwrap_or(20000);
    let grid_points = args.grid_points.unwrap_or(101);
    let seed = args.seed.unwrap_or(1);
    let tolerance = args.tolerance.unwrap_or(0.02);
    let bc: IntervalBc = args.bc.as_deref().unwrap_or("mixed").parse()?;
    if grid_points < 2 {
        return Err(Error::InvalidParameter("grid_points must be >= 2".into()));
    }
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| i as f64 / (grid_points - 1) as f64)
        .collect();
    // Mixed BC with alpha = 1/2 is Brownian motion: compare against
    // min(s,t). Other settings use the exact truncated kernel so the
    // check isolates Monte-Carlo noise from truncation bias.
    let brownian = bc == IntervalBc::Mixed && alpha == 0.5;
    let kernel = |s: f64, t: f64| {
        if brownian {
            min_kernel(s, t)
        } else {
            truncated_interval_kernel(bc, alpha, n_terms, s, t)
        }
    };
    let generator =
        |s: u64| synthesize_path_1d(bc, alpha, n_terms, &grid, s).map(|f| f.values);
    let rep = covariance_test(generator, kernel, &grid, samples, seed)?;
    let passed = rep.max_abs_error <= tolerance;
    let summary = format!("max |cov error| = {:.4} (tolerance {tolerance})", rep.max_abs_error);
    let body = json!({
        "check": "covariance",
        "passed": passed,
        "alpha": alpha,
        "n_terms": n_terms,
        "bc": format!("{bc:?}").to_lowercase(),
        "kernel": if brownian { "min(s,t)" } else { "truncated series" },
        "tolerance": tolerance,
        "report": rep,
    });
    finish_check(report_path, "covariance", passed, summary, body)
}

fn verify_convergence(args: &VerifyArgs, report_path: &Path) -> Result<()> {
    let resolutions: Vec<usize> = match &args.resolutions {
        Some(s) => s
            .split(',')
            .map(|t| {
                t.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad resolution '{t}'"))
                })
            })
            .collect::<Result<_>>()?,
        None => vec![51, 101, 201, 401, 1001],
    };
    let n_modes = args.n_modes.unwrap_or(10);
    let bc: IntervalBc = args.bc.as_deref().unwrap_or("dirichlet").parse()?;
    let scheme: WeightScheme = args.scheme.as_deref().unwrap_or("invsq").parse()?;
    let tolerance = args.tolerance.unwrap_or(1e-3);
    let rep = spectral_convergence_study(bc, &resolutions, n_modes, scheme)?;

    // Relative eigenvalue error at the finest resolution.
    let analytic = |k: usize| match bc {
        IntervalBc::Dirichlet => (k as f64 * std::f64::consts::PI).powi(2),
        IntervalBc::Mixed => ((k as f64 - 0.5) * std::f64::consts::PI).powi(2),
    };
    let finest = rep.eigenvalue_errors.last().expect(">= 2 resolutions");
    let max_rel = finest
        .iter()
        .enumerate()
        .map(|(i, e)| e / analytic(i + 1))
        .fold(f64::NAN, f64::max);
    let rates_ok = !rep.fitted_rates.is_empty()
        && rep.fitted_rates.iter().all(|r| (r - 2.0).abs() <= 0.3);
    let passed = max_rel.is_finite() && max_rel <= tolerance && rates_ok;
    let summary = format!(
        "finest max rel eigenvalue error {max_rel:.2e} (tolerance {tolerance:.1e}), fitted rates {:?}",
        rep.fitted_rates.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    let body = json!({
        "check": "interval-convergence",
        "passed": passed,
        "bc": format!("{bc:?}").to_lowercase(),
        "scheme": scheme.tag(),
        "tolerance": tolerance,
        "max_relative_error_finest": max_rel,
        "report": rep,
    });
    finish_check(report_path, "interval-convergence", passed, summary, body)
}

fn verify_clusters(args: &VerifyArgs, report_path: &Path) -> Result<()> {
    let subdivisions = args.subdivisions.unwrap_or(3);
    let n_modes = args.n_modes.unwrap_or(9);
    let tol = args.tol.unwrap_or(1e-8);
    let scheme: WeightScheme = args.scheme.as_deref().unwrap_or("invsq").parse()?;
    let mesh = generate_sphere(subdivisions)?;
    let sys = assemble(&mesh, scheme, BoundaryCondition::Closed)?;
    let data = smallest_eigenpairs(&sys, &mesh, n_modes, tol)?;
    let rep = sphere_multiplicity_check(&data)?;
    let sizes: Vec<usize> = rep.clusters.iter().map(|&(_, n)| n).collect();
    let summary = format!(
        "cluster sizes {:?}, nonzero mean ratio {:.4}",
        sizes, rep.ratio_second_to_first
    );
    let body = json!({
        "check": "sphere-clusters",
        "passed": true,
        "subdivisions": subdivisions,
        "scheme": scheme.tag(),
        "eigenvalues": data.eigenvalues,
        "report": rep,
    });
    finish_check(report_path, "sphere-clusters", true, summary, body)
}

fn verify_weyl(args: &VerifyArgs, report_path: &Path) -> Result<()> {
    let alpha = args.alpha.unwrap_or(0.5);
    let tolerance = args.tolerance.unwrap_or(0.2);
    let domain = args.domain.as_deref().unwrap_or("interval");
    let (eigenvalues, dim): (Vec<f64>, u8) = match domain {
        "interval" => {
            let n_terms = args.n_terms.unwrap_or(400);
            let bc: IntervalBc = args.bc.as_deref().unwrap_or("dirichlet").parse()?;
            let evs = (1..=n_terms)
                .map(|k| rieszfield::spectral::analytic_interval_spectrum(bc, k, 0.5).0)
                .collect();
            (evs, 1)
        }
        "sphere" => {
            let subdivisions = args.subdivisions.unwrap_or(2);
            let n_modes = args.n_modes.unwrap_or(60);
            let mesh = generate_sphere(subdivisions)?;
            let sys = assemble(&mesh, WeightScheme::InvSquareDistance, BoundaryCondition::Closed)?;
            let data = smallest_eigenpairs(&sys, &mesh, n_modes, args.tol.unwrap_or(1e-8))?;
            let kernel = data.n_kernel_modes();
            (data.eigenvalues[kernel..].to_vec(), 2)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown weyl-tail domain '{other}' (expected interval or sphere)"
            )))
        }
    };
    let n_index = eigenvalues.len() / 2;
    let rep = weyl_tail_check(&eigenvalues, alpha, dim, n_index)?;
    let rel = (rep.fitted_exponent - rep.predicted_exponent).abs() / rep.predicted_exponent.abs();
    let passed = rel <= tolerance;
    let summary = format!(
        "fitted exponent {:.3} vs predicted {:.3} (rel dev {:.1}%, tolerance {:.0}%)",
        rep.fitted_exponent,
        rep.predicted_exponent,
        rel * 100.0,
        tolerance * 100.0
    );
    let body = json!({
        "check": "weyl-tail",
        "passed": passed,
        "domain": domain,
        "alpha": alpha,
        "tolerance": tolerance,
        "relative_deviation": rel,
        "report": rep,
    });
    finish_check(report_path, "weyl-tail", passed, summary, body)
}
