use std::path::Path;
use std::process::{Command, Output};

use ridgelet_core::io;

fn ridgelet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgelet")).args(args).current_dir(dir).output().expect("spawn ridgelet")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &[&str] = &["--res", "48", "--ndir", "16", "--nb", "65", "--na", "12"];

#[test]
fn transform_then_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["transform", "--gallery", "gaussian", "--out", "c.rcf", "--csv", "c.csv"];
    args.extend_from_slice(SMALL);
    let out = ridgelet(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let coeffs = io::read_coefficients(dir.path().join("c.rcf")).unwrap();
    assert_eq!(coeffs.values.len(), 16 * 65 * 12);
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("theta,b,a,re,im"));

    let out = ridgelet(&["reconstruct", "--input", "c.rcf", "--res", "32", "--out", "r.rfld"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("K = "));
    let field = io::read_field(dir.path().join("r.rfld")).unwrap();
    assert_eq!(field.values.len(), 32 * 32);
    assert!(field.values.iter().all(|v| v.is_finite()));
}

#[test]
fn both_paths_report_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["transform", "--gallery", "gaussian", "--method", "both", "--out", "c.rcf"];
    args.extend_from_slice(SMALL);
    let out = ridgelet(&args, dir.path());
    assert_eq!(code(&out), 0);
    let line = stdout(&out).lines().next().unwrap().to_string();
    let gap: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(gap < 1e-2, "{line}");
    assert!(dir.path().join("c.via_radon.rcf").exists());
}

#[test]
fn radon_writes_sinogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelet(
        &["radon", "--gallery", "ridge:0.3", "--res", "48", "--ndir", "12", "--nb", "33", "--method", "fourier_slice", "--out", "s.rsg"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let sino = io::read_sinogram(dir.path().join("s.rsg")).unwrap();
    assert_eq!((sino.sphere.count, sino.grid_p.count), (12, 33));
}

#[test]
fn riesz_scaling_is_quasiasymptotic() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelet(
        &["scaling", "--gallery", "riesz:-1", "--probes", "4", "--out", "rep.json", "--csv", "orb.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "quasiasymptotic");
    assert!((report["alpha_hat"].as_f64().unwrap() + 1.0).abs() < 0.05);
    assert_eq!(report["probes"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(dir.path().join("orb.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 24);
}

#[test]
fn oscillatory_scaling_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelet(&["scaling", "--gallery", "oscillatory_counterexample", "--probes", "4"], dir.path());
    assert_eq!(code(&out), 5);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"], "not_quasiasymptotic");
}

#[test]
fn seeded_probes_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scaling", "--gallery", "riesz:-1", "--probes", "3", "--seed", "7"];
    let a = ridgelet(&args, dir.path());
    let b = ridgelet(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let unseeded = ridgelet(&args[..5], dir.path());
    assert_ne!(a.stdout, unseeded.stdout);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.rcf"), b"not a coefficient file").unwrap();
    for args in [
        &["reconstruct", "--input", "missing.rcf", "--out", "r.rfld"][..],
        &["reconstruct", "--input", "junk.rcf", "--out", "r.rfld"][..],
        &["transform", "--gallery", "no_such_field", "--out", "x.rcf"][..],
        &["radon", "--gallery", "gaussian", "--method", "sideways", "--out", "x.rsg"][..],
        &["scaling", "--gallery", "riesz:-1", "--lambdas", "1:64"][..],
        &["transform", "--out", "x.rcf"][..],
        &["bogus"][..],
    ] {
        let out = ridgelet(args, dir.path());
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn degenerate_pair_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["transform", "--gallery", "gaussian", "--out", "c.rcf"];
    args.extend_from_slice(SMALL);
    assert_eq!(code(&ridgelet(&args, dir.path())), 0);
    // Disjoint Fourier bands give K = 0.
    let out = ridgelet(
        &["reconstruct", "--input", "c.rcf", "--wavelet", "fourier_bump:1.5:0.5", "--eta", "fourier_bump:4:1", "--out", "r.rfld"],
        dir.path(),
    );
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn zero_field_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["scaling", "--gallery", "zero", "--probes", "3", "--lambdas", "1:8:8"];
    args.extend_from_slice(&["--res", "32", "--ndir", "8", "--nb", "33", "--na", "8"]);
    let out = ridgelet(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["degree_verdict"], "degenerate");
    assert_eq!(report["alpha_hat"], 0.0);
    for p in report["probes"].as_array().unwrap() {
        assert_eq!(p["verdict"], "converged");
        assert_eq!(p["M_re"], 0.0);
    }
}
