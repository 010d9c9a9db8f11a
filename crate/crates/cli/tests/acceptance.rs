//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use hqm_cli::config::InitialKind;
use hqm_cli::{bundled, run, RunOutput, SCENARIOS};
use hqm_core::convergence::{verdict, Verdict};
use hqm_core::gauge::{magnetic_field, monopole_density, sample_potentials, GaugeFamily, PotentialSpec, Units};
use hqm_core::lattice::integrate;
use hqm_core::quaternion::{qcross, rcross, QVector3};
use hqm_core::{Boundary, Grid, Quaternion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 10_000;
const ALGEBRA_TOL: f64 = 1e-12;
/// Residuals below this (times the term scale) count as exact.
const FLOOR: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Scale-1 runs are shared between criteria and reused for determinism.
struct Runs(BTreeMap<(String, usize), RunOutput>);

impl Runs {
    fn get(&mut self, name: &str, scale: usize) -> &RunOutput {
        self.0.entry((name.to_string(), scale)).or_insert_with(|| {
            let cfg = bundled(name).expect("bundled scenario");
            run(&cfg, scale).unwrap_or_else(|e| panic!("{name} at scale {scale}: {e}"))
        })
    }
}

fn f(out: &RunOutput, key: &[&str]) -> f64 {
    out.report.float(key).unwrap_or_else(|| panic!("report key {} missing", key.join(".")))
}

fn flag(out: &RunOutput, key: &[&str]) -> bool {
    out.report.flag(key).unwrap_or_else(|| panic!("report key {} missing", key.join(".")))
}

fn random_q(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn close(a: Quaternion, b: Quaternion) -> bool {
    (a - b).max_abs() < ALGEBRA_TOL
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (i, j, k, one) = (Quaternion::I, Quaternion::J, Quaternion::K, Quaternion::ONE);
    let mut failures = 0;
    for q in [i * i, j * j, k * k, i * j * k] {
        failures += usize::from(q != -one);
    }
    failures += usize::from(i * j != k || j * k != i || k * i != j || j * i != -k);
    for _ in 0..CASES {
        let (a, b, c) = (random_q(&mut rng), random_q(&mut rng), random_q(&mut rng));
        let s: f64 = rng.gen_range(-2.0..2.0);
        let ok = close((a * b) * c, a * (b * c))
            && close(a * (b + c), a * b + a * c)
            && close((a + b) * c, a * c + b * c)
            && close(a * one, a)
            && close(one * a, a)
            && close(a * s, a.scale(s))
            && close(a.conj().conj(), a)
            && close((a * b).conj(), b.conj() * a.conj())
            && ((a * b).norm() - a.norm() * b.norm()).abs() < ALGEBRA_TOL
            && a.normalized().is_none_or(|u| close(u * u.conj(), one));
        failures += usize::from(!ok);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 1.0,
        format!("{CASES} random cases, {failures} failures, {secs:.3} s"),
    )
}

fn cross_products() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut real_ok = true;
    for _ in 0..CASES {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let q = qcross(QVector3::from_real(a), QVector3::from_real(b));
        real_ok &= q == QVector3::from_real(rcross(&a, &b));
    }
    let z = Quaternion::ZERO;
    let x = QVector3::new(Quaternion::K, z, z);
    let y = QVector3::new(z, Quaternion::J, z);
    let minus_i_z = QVector3::new(z, z, -Quaternion::I);
    let xy = qcross(x, y);
    let yx = qcross(y, x);
    let witness = xy == minus_i_z && yx == minus_i_z;
    outcome(
        real_ok && witness,
        format!("real inputs exact: {real_ok}; k ex × j ey = j ey × k ex = −i ez: {witness}"),
    )
}

fn identities(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let out = runs.get("identities_3d", 1);
    let secs = start.elapsed().as_secs_f64();
    let text = out.report_text();
    let table: toml::Table = text.parse().expect("report is TOML");
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    let mut failed = Vec::new();
    for (name, settings) in table["identities"].as_table().unwrap() {
        let Some(settings) = settings.as_table() else { continue };
        for (setting, v) in settings {
            let v = v.as_table().unwrap();
            let status = v["status"].as_str().unwrap();
            cases += 1;
            let (c, fi) = (v["coarse"].as_float().unwrap(), v["fine"].as_float().unwrap());
            if let Verdict::Order(p) = verdict(c, fi, 0.0) {
                if status == "passed" && v["verdict"].as_str().unwrap() != "exact" {
                    worst = worst.min(p);
                }
            }
            if status != "passed" {
                failed.push(format!("{name}/{setting}: {status}"));
            }
        }
    }
    outcome(
        failed.is_empty() && cases > 0 && secs < 180.0,
        format!("{cases} cases, minimum order {worst:.3}, {secs:.1} s{}", if failed.is_empty() { String::new() } else { format!(", failed: {failed:?}") }),
    )
}

fn conservation(runs: &mut Runs) -> Outcome {
    let coarse = runs.get("ho_packet_right", 1);
    let drift = (f(coarse, &["norm", "final"]) - 1.0).abs();
    let c = f(coarse, &["continuity", "max_residual"]);
    let fine = f(runs.get("ho_packet_right", 2), &["continuity", "max_residual"]);
    let v = verdict(c, fine, FLOOR);
    outcome(
        drift < 1e-6 && v.passed(),
        format!("|norm(T) − 1| = {drift:.2e}; continuity {c:.3e} → {fine:.3e} ({v})"),
    )
}

fn source_law(runs: &mut Runs) -> Outcome {
    let out = runs.get("absorber", 1);
    let err = f(out, &["norm", "max_rel_decay_error"]);
    let rate = f(out, &["norm", "decay_rate"]);
    let t_final = out.config.evolve.t_final;
    outcome(
        err < 0.01 && (rate - 0.1).abs() < 1e-15 && t_final >= 30.0,
        format!("max |norm/e^(−0.1t) − 1| = {err:.2e} for t ≤ {t_final}"),
    )
}

fn virial() -> Outcome {
    let base = bundled("ho_ground_right").unwrap();
    let q0s = [Quaternion::ONE, Quaternion::J, Quaternion::new(0.5, 0.5, 0.5, 0.5)];
    let mut kinetic = Vec::new();
    let mut ok = true;
    let mut worst_rel: f64 = 0.0;
    let mut worst_imag: f64 = 0.0;
    for q0 in q0s {
        let mut cfg = base.clone();
        cfg.initial.q0 = q0;
        let out = run(&cfg, 1).unwrap();
        let kin = f(&out, &["virial", "kinetic"]);
        let grad = f(&out, &["virial", "real_grad"]);
        let imag = f(&out, &["virial", "imag_grad"]).abs();
        let rel = ((kin - 0.5) / 0.5).abs().max(((grad - 0.5) / 0.5).abs());
        worst_rel = worst_rel.max(rel);
        worst_imag = worst_imag.max(imag);
        ok &= rel < 1e-3 && imag < 1e-12;
        kinetic.push(kin);
    }
    let spread = kinetic.iter().fold(0.0_f64, |m, k| m.max((k - kinetic[0]).abs()));
    let mut excited = base.clone();
    excited.initial.kind = InitialKind::HoEigenstate { n: 1, omega: 1.0 };
    let out = run(&excited, 1).unwrap();
    let k1 = f(&out, &["virial", "kinetic"]);
    let rel1 = ((k1 - 1.5) / 1.5).abs();
    outcome(
        ok && spread < 1e-6 && rel1 < 1e-3,
        format!(
            "n = 0: worst relative error {worst_rel:.2e}, q0 spread {spread:.1e}, imag_grad ≤ {worst_imag:.1e}; n = 1: relative error {rel1:.2e}"
        ),
    )
}

fn expectation_dynamics(runs: &mut Runs) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut additivity: f64 = 0.0;
    for obs in ["x", "p", "rp"] {
        additivity = additivity.max(f(runs.get("ho_packet_right", 1), &["expectation", obs, "additivity"]));
        for form in ["r9", "r10", "i110"] {
            let key = ["expectation", obs, form, "max_residual"];
            let c = f(runs.get("ho_packet_right", 1), &key);
            let fi = f(runs.get("ho_packet_right", 2), &key);
            let v = verdict(c, fi, FLOOR);
            ok &= v.passed();
            parts.push(format!("{obs}/{form} {v}"));
        }
    }
    ok &= additivity < FLOOR;
    outcome(ok, format!("additivity {additivity:.1e}; {}", parts.join(", ")))
}

fn lorentz(runs: &mut Runs) -> Outcome {
    let coarse = runs.get("lorentz_uniform_b", 1);
    let c = f(coarse, &["lorentz", "max_residual"]);
    let single = f(coarse, &["lorentz", "max_residual_pi"]).min(f(coarse, &["lorentz", "max_residual_pi_bar"]));
    let fine = f(runs.get("lorentz_uniform_b", 2), &["lorentz", "max_residual"]);
    let v = verdict(c, fine, FLOOR);
    outcome(
        v.passed() && single > 10.0 * c,
        format!("summed residual {c:.3e} → {fine:.3e} ({v}); single-sided {single:.3e} = {:.0}× summed", single / c),
    )
}

fn monopole(runs: &mut Runs) -> Outcome {
    let grid = Grid::cubic(3, 32, 8.0, Boundary::Periodic).unwrap();
    let beta = [Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4), Complex64::new(0.25, 0.0)];
    let catalog = [
        vec![GaugeFamily::UniformB { b0: 0.8 }],
        vec![GaugeFamily::ConstBeta { beta }],
        vec![GaugeFamily::MonopoleDemo { scale: 0.5 }],
        vec![
            GaugeFamily::UniformB { b0: 0.8 },
            GaugeFamily::ConstBeta { beta },
            GaugeFamily::MonopoleDemo { scale: 0.5 },
        ],
    ];
    let mut worst: f64 = 0.0;
    for gauge in catalog {
        let spec = PotentialSpec { scalar: Vec::new(), gauge };
        let (a, _) = sample_potentials(&spec, grid, Units::default()).unwrap();
        let d = monopole_density(&magnetic_field(&a).unwrap()).unwrap();
        worst = worst.max(integrate(&d.divergence).max_abs());
    }
    let out = runs.get("monopole_demo", 1);
    let i_max = f(out, &["monopole", "i_projected_max"]);
    let floor = f(out, &["monopole", "noise_floor"]);
    // ∇·(β×β*) = i(4πs²/L) sin(2πz/L) cos(2πx/L), with 2π/L → sin(2πh/L)/h
    // for the centered stencil; the nodes hit the extrema.
    let (s, l, h) = (0.5, out.config.grid.length, out.config.grid.length / out.config.grid.n as f64);
    let analytic = 2.0 * s * s * (std::f64::consts::TAU * h / l).sin() / h;
    let oracle = (i_max - analytic).abs();
    outcome(
        worst < 1e-10 && i_max > 10.0 * floor && oracle < 1e-12,
        format!("catalog divergence integral ≤ {worst:.1e}; i-projected max {i_max:.6e} = {:.1e}× floor, oracle error {oracle:.1e}", i_max / floor),
    )
}

fn left_variant(runs: &mut Runs) -> Outcome {
    let limit = runs.get("left_complex_limit", 1);
    let equivalent = flag(limit, &["equivalence", "equivalent"]);
    let sep0 = f(limit, &["equivalence", "max_position_separation"]);
    let w0 = f(limit, &["virial", "w_channel"]);
    let w = f(runs.get("virial_complex_w_left", 1), &["virial", "w_channel"]);
    let witness = runs.get("left_witness", 1);
    let separated = flag(witness, &["equivalence", "separated"]);
    let ratio = f(witness, &["equivalence", "separation_ratio"]);
    outcome(
        equivalent && w0 == 0.0 && w.abs() > 1e-6 && separated,
        format!("complex-limit separation {sep0:.1e}; W channel {w0:.1e} (W = 0) vs {w:.3e} (W ≠ 0); witness separation {ratio:.1e}× solver tolerance"),
    )
}

fn determinism(runs: &mut Runs) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for (name, _) in SCENARIOS {
        let first = runs.get(name, 1).clone();
        let second = run(&bundled(name).unwrap(), 1).unwrap();
        let a = dir.path().join(name).join("a");
        let b = dir.path().join(name).join("b");
        let fa = first.write(&a).unwrap();
        let fb = second.write(&b).unwrap();
        for (x, y) in fa.iter().zip(&fb) {
            if std::fs::read(x).unwrap() != std::fs::read(y).unwrap() {
                differing.push(x.display().to_string());
            }
        }
        if fa.len() != fb.len() {
            differing.push(format!("{name}: file sets differ"));
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} bundled scenarios rerun{}", SCENARIOS.len(), if differing.is_empty() { String::from(", byte-identical") } else { format!(", differing: {differing:?}") }),
    )
}

type Criterion = Box<dyn FnOnce(&mut Runs) -> Outcome>;

fn main() -> ExitCode {
    let mut runs = Runs(BTreeMap::new());
    let criteria: Vec<(&str, Criterion)> = vec![
        ("algebra suite", Box::new(|_| algebra())),
        ("cross-product suite", Box::new(|_| cross_products())),
        ("operator identities", Box::new(identities)),
        ("conservation", Box::new(conservation)),
        ("source law", Box::new(source_law)),
        ("virial", Box::new(|_| virial())),
        ("expectation dynamics", Box::new(expectation_dynamics)),
        ("Lorentz force", Box::new(lorentz)),
        ("monopole pair", Box::new(monopole)),
        ("left variant", Box::new(left_variant)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.into_iter().enumerate() {
        let o = check(&mut runs);
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", n + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
