use std::path::Path;
use std::process::{Command, Output};

use hqm_cli::{bundled, parse_config, run, SCENARIOS};

fn hqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn lists_every_bundled_scenario() {
    let o = hqm(&["list-scenarios"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for (name, _) in SCENARIOS {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn dry_run_prints_resolved_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = hqm(&["run", "--scenario", "ho_ground_right", "--out", out.to_str().unwrap(), "--dry-run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!out.exists());
    let resolved = parse_config(&stdout(&o)).unwrap();
    assert_eq!(resolved, bundled("ho_ground_right").unwrap());
}

#[test]
fn print_config_applies_resolution_scale() {
    let o = hqm(&["print-config", "--scenario", "ho_ground_right", "--resolution-scale", "2"]);
    assert!(o.status.success());
    let c = parse_config(&stdout(&o)).unwrap();
    assert_eq!(c.grid.n, 512);
    assert!((c.evolve.dt - 5e-4).abs() < 1e-18);
}

#[test]
fn run_writes_artifacts_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = hqm(&["run", "--scenario", "ho_ground_right", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["series.csv", "report.txt", "meta.txt"] {
        assert_eq!(read(&a, f), read(&b, f), "{f} differs");
    }
    let csv = String::from_utf8(read(&a, "series.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,norm,energy,x,p_x"));
    let report: toml::Table = String::from_utf8(read(&a, "report.txt")).unwrap().parse().unwrap();
    let virial = report["virial"].as_table().unwrap();
    assert!(virial["relative_residual"].as_float().unwrap() < 1e-3);
    let meta = String::from_utf8(read(&a, "meta.txt")).unwrap();
    assert!(meta.contains(&format!("hqm-cli {}", env!("CARGO_PKG_VERSION"))));
}

#[test]
fn config_file_with_snapshot_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    std::fs::write(
        &cfg,
        r#"
name = "tiny"
[grid]
dims = 1
n = 16
length = 8.0
[initial]
kind = "plane-wave"
k = [0.7853981633974483, 0.0, 0.0]
[evolve]
dt = 1e-2
t_final = 0.1
record_every = 5
[output]
formats = ["snapshot"]
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = hqm(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!out.join("series.csv").exists());
    let snap = String::from_utf8(read(&out, "snapshot.txt")).unwrap();
    let lines: Vec<&str> = snap.lines().collect();
    assert_eq!(lines[0], "# t = 1.0000000000000001e-1");
    assert_eq!(lines[1], "index x y z q0 q1 q2 q3");
    assert_eq!(lines.len(), 2 + 16);
    // Plane waves keep |Ψ|² = 1/L.
    for row in &lines[2..] {
        let v: Vec<f64> = row.split(' ').skip(4).map(|x| x.parse().unwrap()).collect();
        let rho: f64 = v.iter().map(|x| x * x).sum();
        assert!((rho - 1.0 / 8.0).abs() < 1e-6, "{row}");
    }
}

#[test]
fn bad_config_reports_all_errors_with_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "name = \"bad\"\nequation = \"sideways\"\n[grid]\ndims = 4\nn = 64\nlength = 8.0\n[initial]\nkind = \"gaussian\"\nsigma = 1.0\n[evolve]\ndt = 1e-3\nt_final = 1.0\n",
    )
    .unwrap();
    let o = hqm(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2: `equation`"), "{err}");
    assert!(err.contains("right, left"), "{err}");
    assert!(err.contains("line 4: `grid.dims`"), "{err}");
}

#[test]
fn missing_file_and_unknown_scenario() {
    let o = hqm(&["run", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/nonexistent/scenario.toml"));
    let o = hqm(&["run", "--scenario", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown scenario `nope`"));
}

#[test]
fn divergence_exits_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("unstable.toml");
    std::fs::write(
        &cfg,
        "name = \"unstable\"\n[grid]\ndims = 1\nn = 256\nlength = 4.0\n[initial]\nkind = \"gaussian\"\nsigma = 0.3\n[evolve]\ndt = 1e-2\nt_final = 5.0\n",
    )
    .unwrap();
    let o = hqm(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(err.contains("evolve.dt"), "{err}");
    assert!(err.contains("diverged"), "{err}");
}

#[test]
fn check_identities_one_dimensional_skips_gauge() {
    let o = hqm(&["check-identities", "--scenario", "identities_1d"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("v3") && l.contains("PASS")));
    assert!(text.lines().any(|l| l.starts_with("l8") && l.contains("SKIP")));
    assert!(!text.contains("FAIL"));
}

#[test]
fn flipped_kappa_fails_check_identities() {
    let o = hqm(&["check-identities", "--scenario", "identities_3d", "--flip-kappa", "--only", "l8"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("l8") && l.contains("FAIL")), "{text}");
}

#[test]
fn library_run_matches_resolution_scale() {
    let c = bundled("ho_ground_right").unwrap();
    let out = run(&c, 2).unwrap();
    assert_eq!(out.config.grid.n, 512);
    assert!(out.meta_text().contains("resolution_scale = 2"));
    assert_eq!(out.report.float(&["run", "n"]), Some(512.0));
}
