//! Runs a scenario and renders its artifacts.
//!
//! # `series.csv`
//!
//! Header row then one row per recorded time. Columns, in this order:
//!
//! | column | present when |
//! |---|---|
//! | `t` | always |
//! | `norm` | always, `∫ρ` |
//! | `energy` | always, `⟨ℋ⟩` of the evolving equation |
//! | `x`, `y`, `z` | one per active axis |
//! | `p_x`, `p_y`, `p_z` | one per active axis, `p = −ħ∂Ψi` |
//! | `pi_x … pi_z`, `pi_bar_x … pi_bar_z` | a gauge is configured |
//! | `other_norm`, `other_x …` | the `equivalence` check, evolved with the other equation |
//!
//! Values use `{:.16e}` (17 significant digits).
//!
//! # `report.txt`
//!
//! TOML: one table per section (`run`, `norm`, then one per check), floats
//! as `{:.16e}`. Keys follow the term names, e.g. `virial.imag_grad`,
//! `lorentz.U_A_bar_commutator`.
//!
//! # `meta.txt`
//!
//! The resolved configuration followed by a `[meta]` table (code version,
//! resolution scale, spacing, step count). No timestamps.
//!
//! # `snapshot.txt`
//!
//! Last recorded state: a `# t = …` line, a header
//! `index x y z q0 q1 q2 q3`, then one row per node in storage order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hqm_core::dynamics::{
    continuity_residual, ehrenfest_check, evolve, expectation_dynamics_residual, gaussian_packet, ho_eigenfunction,
    lorentz_report, virial_report_with, Equation, EvolveOptions, ExpectationForm, Observable, ObservationSeries,
    Observer, VirialOptions, VirialReport,
};
use hqm_core::gauge::{magnetic_field, monopole_density, sample_potentials, GaugePotential, ScalarFamily, ScalarPotential};
use hqm_core::identities::{run_battery, BatteryOptions};
use hqm_core::lattice::integrate;
use hqm_core::left::{expectation_dynamics_left, hamiltonian_left, r_dot_p_left, virial_left, LeftForm};
use hqm_core::operators::{bar_i, generalized_momentum, hamiltonian, momentum, norm, position, r_dot_p, LinearOp};
use hqm_core::{Boundary, Grid, HqmError, QField, Quaternion, Result};
use num_complex::Complex64;

use crate::config::{Check, Format, InitialKind, ScenarioConfig};

const AXES: [&str; 3] = ["x", "y", "z"];
/// Relative size of boundary values that triggers the dirichlet warning.
const EDGE_WARN: f64 = 1e-12;
/// Lower bound on the solver tolerance used by the equivalence check.
const SOLVER_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportValue {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Floats(Vec<f64>),
    Vectors(Vec<[f64; 3]>),
    Texts(Vec<String>),
}

fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn key_segment(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        s.to_string()
    } else {
        quote(s)
    }
}

impl ReportValue {
    fn render(&self) -> String {
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        match self {
            ReportValue::Float(x) => float(*x),
            ReportValue::Int(i) => i.to_string(),
            ReportValue::Bool(b) => b.to_string(),
            ReportValue::Text(s) => quote(s),
            ReportValue::Floats(v) => list(v.iter().map(|x| float(*x)).collect()),
            ReportValue::Vectors(v) => list(v.iter().map(|a| list(a.iter().map(|x| float(*x)).collect())).collect()),
            ReportValue::Texts(v) => list(v.iter().map(|s| quote(s)).collect()),
        }
    }
}

/// Ordered key/value report; the first key segment is the section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(Vec<String>, ReportValue)>,
}

impl Report {
    pub fn push(&mut self, key: &[&str], value: ReportValue) {
        self.entries.push((key.iter().map(|s| s.to_string()).collect(), value));
    }

    fn f(&mut self, key: &[&str], x: f64) {
        self.push(key, ReportValue::Float(x));
    }

    pub fn get(&self, key: &[&str]) -> Option<&ReportValue> {
        self.entries.iter().find(|(k, _)| k.iter().map(String::as_str).eq(key.iter().copied())).map(|(_, v)| v)
    }

    pub fn float(&self, key: &[&str]) -> Option<f64> {
        match self.get(key)? {
            ReportValue::Float(x) => Some(*x),
            ReportValue::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn flag(&self, key: &[&str]) -> Option<bool> {
        match self.get(key)? {
            ReportValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Sections appear in first-use order, keys in insertion order.
    pub fn render(&self) -> String {
        let mut sections: Vec<&str> = Vec::new();
        for (k, _) in &self.entries {
            if !sections.contains(&k[0].as_str()) {
                sections.push(&k[0]);
            }
        }
        let mut out = String::new();
        for (n, s) in sections.iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", key_segment(s));
            for (k, v) in self.entries.iter().filter(|(k, _)| k[0] == *s) {
                let key: Vec<String> = k[1..].iter().map(|x| key_segment(x)).collect();
                let _ = writeln!(out, "{} = {}", key.join("."), v.render());
            }
        }
        out
    }
}

/// Everything a run produces, before anything touches the filesystem.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub resolution_scale: usize,
    pub series: ObservationSeries,
    pub report: Report,
    pub warnings: Vec<String>,
    pub steps: usize,
    final_state: Option<(f64, QField)>,
}

struct Setup {
    grid: Grid,
    g: GaugePotential,
    u: ScalarPotential,
    psi0: QField,
    gauged: bool,
}

fn setup(cfg: &ScenarioConfig) -> Result<Setup> {
    let gc = &cfg.grid;
    let grid = Grid::cubic(gc.dims, gc.n, gc.length, gc.boundary)?;
    let (g, u) = sample_potentials(&cfg.potential, grid, cfg.units)?;
    let q0 = cfg.initial.q0;
    let psi0 = match &cfg.initial.kind {
        InitialKind::Gaussian { x0, k0, sigma } => gaussian_packet(grid, *x0, *k0, *sigma, q0)?,
        InitialKind::PlaneWave { k } => {
            let k = *k;
            let wave = QField::from_fn(grid, move |x| {
                let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
                Quaternion::from_complex(Complex64::from_polar(1.0, phase))
            });
            let nn = norm(&wave).sqrt();
            wave.right_mul(q0).scale(1.0 / nn)
        }
        InitialKind::HoEigenstate { n, omega } => ho_eigenfunction(grid, *n, *omega, cfg.units)?.0.right_mul(q0),
    };
    Ok(Setup {
        grid,
        g,
        u,
        psi0,
        gauged: !cfg.potential.gauge.is_empty(),
    })
}

fn hamiltonian_for(eq: Equation, s: &Setup, cfg: &ScenarioConfig) -> Result<LinearOp> {
    match eq {
        Equation::Right => hamiltonian(&s.g, &s.u, cfg.units),
        Equation::Left => hamiltonian_left(&s.g, &s.u, cfg.units),
    }
}

fn other(eq: Equation) -> Equation {
    match eq {
        Equation::Right => Equation::Left,
        Equation::Left => Equation::Right,
    }
}

fn observers(s: &Setup, h: &LinearOp, cfg: &ScenarioConfig) -> Result<Vec<Observer>> {
    let dims = s.grid.dims();
    let mut obs = vec![Observer::norm(), Observer::expectation("energy", h.clone())];
    for (a, name) in AXES.iter().enumerate().take(dims) {
        obs.push(Observer::expectation(*name, position(a)));
    }
    for (a, name) in AXES.iter().enumerate().take(dims) {
        obs.push(Observer::expectation(format!("p_{name}"), momentum(&s.grid, a, cfg.units)?));
    }
    if s.gauged {
        let pis: Vec<LinearOp> = (0..dims).map(|a| generalized_momentum(&s.g, a, cfg.units)).collect::<Result<_>>()?;
        for (pi, name) in pis.iter().zip(AXES) {
            obs.push(Observer::expectation(format!("pi_{name}"), pi.clone()));
        }
        for (pi, name) in pis.iter().zip(AXES) {
            obs.push(Observer::expectation(format!("pi_bar_{name}"), bar_i(pi)));
        }
    }
    Ok(obs)
}

fn edge_ratio(psi: &QField) -> f64 {
    let grid = psi.grid();
    let n = grid.n();
    let dims = grid.dims();
    let mut edge: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (idx, q) in psi.values().iter().enumerate() {
        let m = q.norm();
        peak = peak.max(m);
        let i = grid.multi_index(idx);
        if (0..dims).any(|a| i[a] == 0 || i[a] + 1 == n[a]) {
            edge = edge.max(m);
        }
    }
    if peak > 0.0 {
        edge / peak
    } else {
        0.0
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn evolve_opts(cfg: &ScenarioConfig, keep: bool) -> EvolveOptions {
    EvolveOptions {
        dt: cfg.evolve.dt,
        t_final: cfg.evolve.t_final,
        record_every: cfg.evolve.record_every,
        keep_snapshots: keep,
    }
}

/// Runs `cfg` refined by `resolution_scale` (n × s, dt / s).
pub fn run(cfg: &ScenarioConfig, resolution_scale: usize) -> Result<RunOutput> {
    if resolution_scale == 0 {
        return Err(HqmError::config("resolution-scale", "must be at least 1"));
    }
    let cfg = cfg.scaled(resolution_scale);
    let s = setup(&cfg)?;
    let eq = cfg.equation;
    let units = cfg.units;
    let mut warnings = cfg.warnings.clone();
    if s.grid.boundary() == Boundary::DirichletZero {
        let r = edge_ratio(&s.psi0);
        if r > EDGE_WARN {
            warnings.push(format!(
                "initial state reaches {r:e} of its peak on the dirichlet boundary; enlarge grid.length"
            ));
        }
    }
    let h = hamiltonian_for(eq, &s, &cfg)?;
    let obs = observers(&s, &h, &cfg)?;
    let keep = cfg.checks.iter().any(|c| c.needs_snapshots()) || cfg.output.formats.contains(&Format::Snapshot);
    let mut series = evolve(s.psi0.clone(), &h, eq, units, evolve_opts(&cfg, keep), &obs)?;
    warnings.extend(series.warnings.iter().cloned());
    let steps = (cfg.evolve.t_final / cfg.evolve.dt).round() as usize;

    let mut rep = Report::default();
    let gc = &cfg.grid;
    rep.push(&["run", "scenario"], ReportValue::Text(cfg.name.clone()));
    rep.push(&["run", "equation"], ReportValue::Text(eq.name().into()));
    rep.push(&["run", "dims"], ReportValue::Int(gc.dims as i64));
    rep.push(&["run", "n"], ReportValue::Int(gc.n as i64));
    rep.f(&["run", "length"], gc.length);
    rep.f(&["run", "spacing"], s.grid.spacing(0));
    rep.f(&["run", "dt"], cfg.evolve.dt);
    rep.f(&["run", "t_final"], cfg.evolve.t_final);
    rep.push(&["run", "steps"], ReportValue::Int(steps as i64));
    rep.push(&["run", "records"], ReportValue::Int(series.times.len() as i64));

    let norms = series.channel("norm").expect("norm observer").to_vec();
    let n0 = norms[0];
    rep.f(&["norm", "initial"], n0);
    rep.f(&["norm", "final"], *norms.last().expect("t = 0 is recorded"));
    rep.f(&["norm", "max_drift"], norms.iter().fold(0.0, |m: f64, n| m.max((n - n0).abs())));
    let gamma: f64 = cfg
        .potential
        .scalar
        .iter()
        .map(|f| match f {
            ScalarFamily::Absorber { gamma } => *gamma,
            _ => 0.0,
        })
        .sum();
    if gamma != 0.0 {
        // Complex states decay as e^{−Γt/ħ}.
        let rate = gamma / units.hbar;
        let err = series
            .times
            .iter()
            .zip(&norms)
            .map(|(t, n)| (n / n0 / (-rate * t).exp() - 1.0).abs())
            .fold(0.0, f64::max);
        rep.f(&["norm", "decay_rate"], rate);
        rep.f(&["norm", "max_rel_decay_error"], err);
    }

    for check in &cfg.checks {
        match check {
            Check::Continuity => {
                let c = continuity_residual(&series, &s.g, &s.u, units)?;
                rep.f(&["continuity", "max_residual"], c.overall_max());
                rep.push(&["continuity", "times"], ReportValue::Floats(c.times.clone()));
                rep.push(&["continuity", "max_abs"], ReportValue::Floats(c.max_abs.clone()));
            }
            Check::Ehrenfest => {
                let e = ehrenfest_check(&series, &s.g, &s.u, units)?;
                rep.f(&["ehrenfest", "max_position_residual"], e.max_position_residual());
                rep.f(&["ehrenfest", "max_momentum_integral_residual"], max_abs(&e.momentum_integral_residual));
                rep.f(&["ehrenfest", "max_momentum_expectation_residual"], max_abs(&e.momentum_expectation_residual));
                rep.push(&["ehrenfest", "times"], ReportValue::Floats(e.times.clone()));
                rep.push(&["ehrenfest", "momentum_rate"], ReportValue::Floats(e.momentum_rate.clone()));
                rep.push(&["ehrenfest", "momentum_integral"], ReportValue::Floats(e.momentum_integral.clone()));
                rep.push(&["ehrenfest", "minus_grad_u"], ReportValue::Floats(e.minus_grad_u.clone()));
            }
            Check::Expectation => expectation_section(&mut rep, &series, &s, &h, &cfg)?,
            Check::Virial => {
                let opts = VirialOptions {
                    dt: cfg.evolve.dt,
                    require_stationary: false,
                };
                let v = match eq {
                    Equation::Right => virial_report_with(&s.psi0, &s.u, units, opts)?,
                    Equation::Left => virial_left(&s.psi0, &s.u, units, opts)?,
                };
                virial_section(&mut rep, &v);
                if eq == Equation::Left {
                    let r = virial_report_with(&s.psi0, &s.u, units, opts)?;
                    rep.f(&["virial", "right_form_residual"], r.residual);
                }
            }
            Check::Lorentz => {
                let l = lorentz_report(&series, &s.g, &s.u, units, None)?;
                rep.push(&["lorentz", "times"], ReportValue::Floats(l.times.clone()));
                for (name, v) in [
                    ("pi_rate", &l.pi_rate),
                    ("pi_bar_rate", &l.pi_bar_rate),
                    ("force", &l.force),
                    ("magnetic", &l.magnetic),
                    ("gauge_cross", &l.gauge_cross),
                    ("dA_dt", &l.da_dt),
                    ("real_grad", &l.real_grad),
                    ("imag_grad", &l.imag_grad),
                    ("U_A_bar_commutator", &l.u_a_bar_commutator),
                    ("commutator_form", &l.commutator_form),
                    ("curl_B", &l.curl_b),
                    ("residual_pi", &l.residual_pi),
                    ("residual_pi_bar", &l.residual_pi_bar),
                    ("residual", &l.residual),
                ] {
                    rep.push(&["lorentz", name], ReportValue::Vectors(v.clone()));
                }
                rep.f(&["lorentz", "max_residual"], l.max_residual());
                rep.f(&["lorentz", "max_residual_pi"], l.max_residual_pi());
                rep.f(&["lorentz", "max_residual_pi_bar"], l.max_residual_pi_bar());
            }
            Check::Monopole => monopole_section(&mut rep, &s.g)?,
            Check::Equivalence => {
                let other_series = equivalence_section(&mut rep, &series, &s, &cfg)?;
                series.channels.push(("other_norm".into(), other_series.channel("norm").expect("norm").to_vec()));
                for name in AXES.iter().take(s.grid.dims()) {
                    let v = other_series.channel(name).expect("position observer").to_vec();
                    series.channels.push((format!("other_{name}"), v));
                }
            }
            Check::Identities => identities_section(&mut rep, &cfg)?,
        }
    }
    rep.push(&["run", "warnings"], ReportValue::Texts(warnings.clone()));

    let final_state = if keep {
        let t = *series.times.last().expect("t = 0 is recorded");
        let psi = series.snapshots.last().expect("snapshots kept").clone();
        Some((t, psi))
    } else {
        None
    };
    series.snapshots.clear();
    Ok(RunOutput {
        config: cfg,
        resolution_scale,
        series,
        report: rep,
        warnings,
        steps,
        final_state,
    })
}

fn virial_section(rep: &mut Report, v: &VirialReport) {
    rep.f(&["virial", "lhs_rate"], v.lhs_rate);
    rep.f(&["virial", "kinetic"], v.kinetic);
    rep.f(&["virial", "real_grad"], v.real_grad);
    rep.f(&["virial", "imag_grad"], v.imag_grad);
    if let Some(w) = v.w_channel {
        rep.f(&["virial", "w_channel"], w);
    }
    rep.f(&["virial", "residual"], v.residual);
    let scale = v.kinetic.abs().max(v.real_grad.abs());
    rep.f(&["virial", "relative_residual"], if scale > 0.0 { v.residual.abs() / scale } else { v.residual.abs() });
    rep.f(&["virial", "stationarity"], v.stationarity);
    rep.push(&["virial", "decaying"], ReportValue::Bool(v.decaying));
}

fn expectation_section(rep: &mut Report, series: &ObservationSeries, s: &Setup, h: &LinearOp, cfg: &ScenarioConfig) -> Result<()> {
    let units = cfg.units;
    let rp = match cfg.equation {
        Equation::Right => r_dot_p(&s.grid, units)?,
        Equation::Left => r_dot_p_left(&s.grid, units)?,
    };
    let observables = [("x", position(0)), ("p", momentum(&s.grid, 0, units)?), ("rp", rp)];
    for (name, op) in observables {
        let obs = Observable::from(op);
        match cfg.equation {
            Equation::Right => {
                let mut res = Vec::new();
                for form in [ExpectationForm::R9, ExpectationForm::R10, ExpectationForm::I110] {
                    let r = expectation_dynamics_residual(&obs, series, h, &s.u, units, form)?;
                    rep.f(&["expectation", name, form.name(), "max_residual"], r.max_abs());
                    rep.f(&["expectation", name, form.name(), "max_corrected"], max_abs(&r.corrected()));
                    res.push(r.residual);
                }
                let additivity = (0..res[0].len()).map(|k| res[2][k] - res[0][k] - res[1][k]).collect::<Vec<_>>();
                rep.f(&["expectation", name, "additivity"], max_abs(&additivity));
            }
            Equation::Left => {
                for form in LeftForm::ALL {
                    let r = expectation_dynamics_left(&obs, series, h, units, form)?;
                    let corrected: Vec<f64> = r.residual.iter().zip(&r.correction).map(|(a, b)| a - b).collect();
                    rep.f(&["expectation", name, form.name(), "max_residual"], r.max_abs());
                    rep.f(&["expectation", name, form.name(), "max_corrected"], max_abs(&corrected));
                }
            }
        }
    }
    Ok(())
}

fn monopole_section(rep: &mut Report, g: &GaugePotential) -> Result<()> {
    let b = magnetic_field(g)?;
    let d = monopole_density(&b)?;
    let total = integrate(&d.divergence);
    let grid = g.grid();
    let h = (0..3).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let b_max = b.as_qvector().max_abs();
    // Rounding scale of a centered difference of 𝓑.
    let floor = 64.0 * f64::EPSILON * b_max.max(1.0) / h;
    let i_max = d.i_projected.max_abs();
    rep.f(&["monopole", "divergence_integral"], [total.x0, total.x1, total.x2, total.x3].iter().fold(0.0, |m: f64, x| m.max(x.abs())));
    rep.f(&["monopole", "i_projected_integral"], integrate(&d.i_projected).x0);
    rep.f(&["monopole", "i_projected_max"], i_max);
    rep.f(&["monopole", "max_B"], b_max);
    rep.f(&["monopole", "noise_floor"], floor);
    rep.push(&["monopole", "detected"], ReportValue::Bool(i_max > 10.0 * floor));
    Ok(())
}

fn equivalence_section(rep: &mut Report, series: &ObservationSeries, s: &Setup, cfg: &ScenarioConfig) -> Result<ObservationSeries> {
    let units = cfg.units;
    let dims = s.grid.dims();
    let track = |eq: Equation, dt_div: usize| -> Result<ObservationSeries> {
        let h = hamiltonian_for(eq, s, cfg)?;
        let mut obs = vec![Observer::norm()];
        for (a, name) in AXES.iter().enumerate().take(dims) {
            obs.push(Observer::expectation(*name, position(a)));
        }
        let mut o = evolve_opts(cfg, false);
        o.dt /= dt_div as f64;
        o.record_every *= dt_div;
        evolve(s.psi0.clone(), &h, eq, units, o, &obs)
    };
    let other_series = track(other(cfg.equation), 1)?;
    // Step doubling of the primary run estimates the time-stepping error.
    let half = track(cfg.equation, 2)?;
    let mut sep: f64 = 0.0;
    let mut tol: f64 = 0.0;
    for name in AXES.iter().take(dims) {
        let a = series.channel(name).expect("position observer");
        let b = other_series.channel(name).expect("position observer");
        let c = half.channel(name).expect("position observer");
        for k in 0..a.len().min(b.len()).min(c.len()) {
            sep = sep.max((a[k] - b[k]).abs());
            tol = tol.max((a[k] - c[k]).abs());
        }
    }
    let na = series.channel("norm").expect("norm");
    let nb = other_series.channel("norm").expect("norm");
    let norm_sep = na.iter().zip(nb).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let tol = tol.max(SOLVER_FLOOR);
    rep.push(&["equivalence", "other_equation"], ReportValue::Text(other(cfg.equation).name().into()));
    rep.f(&["equivalence", "max_position_separation"], sep);
    rep.f(&["equivalence", "max_norm_separation"], norm_sep);
    rep.f(&["equivalence", "solver_tolerance"], tol);
    rep.f(&["equivalence", "separation_ratio"], sep / tol);
    rep.push(&["equivalence", "equivalent"], ReportValue::Bool(sep <= tol));
    rep.push(&["equivalence", "separated"], ReportValue::Bool(sep > 10.0 * tol));
    Ok(other_series)
}

/// Battery options drawn from a scenario's grid and units.
pub fn battery_options(cfg: &ScenarioConfig, flip_kappa: bool) -> BatteryOptions {
    let d = BatteryOptions::default();
    BatteryOptions {
        dims: cfg.grid.dims,
        n1d: if cfg.grid.dims == 1 { cfg.grid.n } else { d.n1d },
        n3d: if cfg.grid.dims == 3 { cfg.grid.n } else { d.n3d },
        length: cfg.grid.length,
        units: cfg.units,
        flip_kappa,
        ..d
    }
}

fn identities_section(rep: &mut Report, cfg: &ScenarioConfig) -> Result<()> {
    let cases = run_battery(&battery_options(cfg, false))?;
    let mut all = true;
    for c in &cases {
        let key = |leaf: &'static str| [String::from("identities"), c.name.clone(), c.setting.clone(), leaf.to_string()];
        let push = |rep: &mut Report, leaf: &'static str, v: ReportValue| {
            let k = key(leaf);
            rep.push(&k.iter().map(String::as_str).collect::<Vec<_>>(), v);
        };
        push(rep, "coarse", ReportValue::Float(c.coarse));
        push(rep, "fine", ReportValue::Float(c.fine));
        push(rep, "verdict", ReportValue::Text(c.verdict.to_string()));
        let status = if c.verdict == hqm_core::convergence::Verdict::Skipped {
            "skipped"
        } else if c.verdict.passed() {
            "passed"
        } else {
            all = false;
            "failed"
        };
        push(rep, "status", ReportValue::Text(status.into()));
    }
    rep.push(&["identities", "all_passed"], ReportValue::Bool(all));
    Ok(())
}

impl RunOutput {
    pub fn series_csv(&self) -> String {
        let mut out = String::from("t");
        for (name, _) in &self.series.channels {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (k, t) in self.series.times.iter().enumerate() {
            out.push_str(&float(*t));
            for (_, v) in &self.series.channels {
                out.push(',');
                out.push_str(&float(v[k]));
            }
            out.push('\n');
        }
        out
    }

    pub fn report_text(&self) -> String {
        self.report.render()
    }

    pub fn meta_text(&self) -> String {
        let mut out = self.config.to_toml();
        let _ = writeln!(out, "\n[meta]");
        let _ = writeln!(out, "code_version = {}", quote(&format!("hqm-cli {}", env!("CARGO_PKG_VERSION"))));
        let _ = writeln!(out, "resolution_scale = {}", self.resolution_scale);
        let g = &self.config.grid;
        let _ = writeln!(out, "spacing = {}", float(g.length / g.n as f64));
        let _ = writeln!(out, "steps = {}", self.steps);
        let _ = writeln!(out, "records = {}", self.series.times.len());
        out
    }

    pub fn snapshot_text(&self) -> Option<String> {
        let (t, psi) = self.final_state.as_ref()?;
        let mut out = format!("# t = {}\nindex x y z q0 q1 q2 q3\n", float(*t));
        for (idx, q) in psi.values().iter().enumerate() {
            let x = psi.grid().coords(idx);
            let _ = writeln!(
                out,
                "{idx} {} {} {} {} {} {} {}",
                float(x[0]),
                float(x[1]),
                float(x[2]),
                float(q.x0),
                float(q.x1),
                float(q.x2),
                float(q.x3)
            );
        }
        Some(out)
    }

    /// Writes the configured artifacts into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        let mut put = |name: &str, text: String| -> std::io::Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, text)?;
            files.push(p);
            Ok(())
        };
        for f in &self.config.output.formats {
            match f {
                Format::Csv => put("series.csv", self.series_csv())?,
                Format::Report => put("report.txt", self.report_text())?,
                Format::Snapshot => put("snapshot.txt", self.snapshot_text().unwrap_or_default())?,
            }
        }
        put("meta.txt", self.meta_text())?;
        Ok(files)
    }
}
