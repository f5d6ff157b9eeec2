//! Integration tests driving the compiled binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rieszfield::export::read_field_ply;
use rieszfield::laplacian::{system_hash, BoundaryCondition, WeightScheme};
use rieszfield::mesh::{generate_interval, load_mesh};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rieszfield")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn CLI")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "CLI {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Setup {
    _dir: tempfile::TempDir,
    mesh: PathBuf,
    cache: PathBuf,
}

fn interval_setup(n_modes: &str) -> Setup {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("interval.off");
    let cache = dir.path().join("interval.spec");
    run_ok(&["mesh", "--shape", "interval", "--params", "n=101", "--out", path_str(&mesh)]);
    run_ok(&[
        "eigs", "--mesh", path_str(&mesh), "--bc", "dirichlet", "--n-modes", n_modes,
        "--cache", path_str(&cache),
    ]);
    Setup { _dir: dir, mesh, cache }
}

#[test]
fn mesh_output_reloads_with_same_hash() {
    let setup = interval_setup("5");
    let reloaded = load_mesh(&setup.mesh, None).unwrap();
    let direct = generate_interval(101).unwrap();
    assert_eq!(reloaded.content_hash(), direct.content_hash());
    assert_eq!(
        system_hash(&reloaded, WeightScheme::InvSquareDistance, BoundaryCondition::Dirichlet),
        system_hash(&direct, WeightScheme::InvSquareDistance, BoundaryCondition::Dirichlet)
    );
}

#[test]
fn eigs_second_run_hits_cache() {
    let setup = interval_setup("5");
    let out = run_ok(&[
        "eigs", "--mesh", path_str(&setup.mesh), "--bc", "dirichlet", "--n-modes", "5",
        "--cache", path_str(&setup.cache),
    ]);
    assert!(out.contains("cache hit"), "expected cache hit, got: {out}");
    assert!(out.contains("source=cache"));
}

#[test]
fn synth_csv_pins_endpoints_and_repeats_exactly() {
    let setup = interval_setup("20");
    let out_a = setup.mesh.with_file_name("a.csv");
    let out_b = setup.mesh.with_file_name("b.csv");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "synth", "--cache", path_str(&setup.cache), "--mesh", path_str(&setup.mesh),
            "--alpha", "0.5", "--n-terms", "20", "--seed", "42", "--out", path_str(out),
        ]);
    }
    let a = std::fs::read(&out_a).unwrap();
    assert_eq!(a, std::fs::read(&out_b).unwrap());
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "0,0");
    assert_eq!(*lines.last().unwrap(), "1,0");
}

#[test]
fn sphere_synth_origin_vertex_is_zero_in_ply() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("sphere.off");
    let cache = dir.path().join("sphere.spec");
    let out = dir.path().join("field.ply");
    run_ok(&["mesh", "--shape", "sphere", "--params", "subdivisions=2", "--out", path_str(&mesh)]);
    run_ok(&[
        "eigs", "--mesh", path_str(&mesh), "--bc", "closed", "--n-modes", "9",
        "--cache", path_str(&cache),
    ]);
    run_ok(&[
        "synth", "--cache", path_str(&cache), "--mesh", path_str(&mesh), "--alpha", "0.9",
        "--n-terms", "8", "--seed", "3", "--origin", "0", "--out", path_str(&out),
    ]);
    let (_, _, values) = read_field_ply(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(values[0], 0.0);
}

#[test]
fn stale_cache_is_rejected_with_category() {
    let setup = interval_setup("5");
    let other_mesh = setup.mesh.with_file_name("other.off");
    run_ok(&["mesh", "--shape", "interval", "--params", "n=51", "--out", path_str(&other_mesh)]);
    let out = run(&[
        "synth", "--cache", path_str(&setup.cache), "--mesh", path_str(&other_mesh),
        "--alpha", "0.5", "--n-terms", "5", "--seed", "1",
        "--out", path_str(&setup.mesh.with_file_name("x.csv")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stale-cache"));
}

#[test]
fn config_file_supplies_flags_and_flags_override() {
    let setup = interval_setup("20");
    let cfg = setup.mesh.with_file_name("run.toml");
    std::fs::write(
        &cfg,
        "[synth]\nalpha = 0.5\nn_terms = 20\nseed = 42\n",
    )
    .unwrap();
    let from_cfg = setup.mesh.with_file_name("cfg.csv");
    let from_flags = setup.mesh.with_file_name("flags.csv");
    run_ok(&[
        "--config", path_str(&cfg), "synth", "--cache", path_str(&setup.cache),
        "--mesh", path_str(&setup.mesh), "--out", path_str(&from_cfg),
    ]);
    run_ok(&[
        "synth", "--cache", path_str(&setup.cache), "--mesh", path_str(&setup.mesh),
        "--alpha", "0.5", "--n-terms", "20", "--seed", "42", "--out", path_str(&from_flags),
    ]);
    assert_eq!(std::fs::read(&from_cfg).unwrap(), std::fs::read(&from_flags).unwrap());

    // A flag overrides the config value: different seed changes the output.
    let overridden = setup.mesh.with_file_name("override.csv");
    run_ok(&[
        "--config", path_str(&cfg), "synth", "--cache", path_str(&setup.cache),
        "--mesh", path_str(&setup.mesh), "--seed", "43", "--out", path_str(&overridden),
    ]);
    assert_ne!(std::fs::read(&from_cfg).unwrap(), std::fs::read(&overridden).unwrap());
}

#[test]
fn rescale_cli_applies_factor() {
    let setup = interval_setup("20");
    let field = setup.mesh.with_file_name("f.csv");
    let scaled = setup.mesh.with_file_name("scaled.csv");
    run_ok(&[
        "synth", "--cache", path_str(&setup.cache), "--mesh", path_str(&setup.mesh),
        "--alpha", "0.5", "--n-terms", "20", "--seed", "7", "--out", path_str(&field),
    ]);
    run_ok(&[
        "rescale", "--in", path_str(&field), "--c", "2", "--alpha", "0.5",
        "--out", path_str(&scaled),
    ]);
    let (_, orig) = rieszfield::export::read_csv_1d(&std::fs::read_to_string(&field).unwrap()).unwrap();
    let (_, new) = rieszfield::export::read_csv_1d(&std::fs::read_to_string(&scaled).unwrap()).unwrap();
    let factor = 2.0_f64.powf(0.5);
    for (a, b) in orig.iter().zip(&new) {
        assert_eq!(*b, a * factor);
    }
}

#[test]
fn missing_flag_reports_configuration_error() {
    let out = run(&["synth", "--alpha", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration"));
}

#[test]
fn displacement_on_interval_rejected() {
    let setup = interval_setup("5");
    let out = run(&[
        "synth", "--cache", path_str(&setup.cache), "--mesh", path_str(&setup.mesh),
        "--alpha", "0.5", "--n-terms", "5", "--seed", "1", "--export", "displace",
        "--out", path_str(&setup.mesh.with_file_name("x.csv")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration"));
}

#[test]
fn verify_covariance_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("cov.json");
    run_ok(&[
        "verify", "--check", "covariance", "--samples", "2000", "--n-terms", "100",
        "--tolerance", "0.08", "--report", path_str(&report),
    ]);
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(body["check"], "covariance");
    assert_eq!(body["passed"], true);
    assert!(body["report"]["max_abs_error"].as_f64().unwrap() <= 0.08);
}
