//! Scenario files: strict TOML with every error collected.
//!
//! ```toml
//! name = "ho_ground_right"       # required
//! description = "..."            # optional
//! equation = "right"             # right | left            (default right)
//! checks = ["virial"]            # see `Check`              (default [])
//!
//! [grid]                         # required
//! dims = 1                       # 1 | 2 | 3
//! n = 256                        # nodes per axis, ≥ 4
//! length = 12.0                  # box edge
//! boundary = "periodic"          # periodic | dirichlet    (default periodic)
//!
//! [units]                        # optional, defaults ħ = m = 1
//! hbar = 1.0
//! mass = 1.0
//!
//! [potential]                    # optional; families are summed
//! harmonic = { omega = 1.0 }
//! quartic = { lambda = 0.1 }
//! absorber = { gamma = 0.1 }     # V = −iγ/2
//! complex_w = { w0 = [0.1, 0.05] }
//!
//! [gauge]                        # optional, 3D only
//! uniform_b = { b0 = 0.8 }
//! const_beta = { re = [0.3, -0.1, 0.25], im = [0.2, 0.4, 0.0] }
//! monopole_demo = { scale = 0.5 }
//!
//! [initial]                      # required
//! kind = "gaussian"              # gaussian | plane-wave | ho-eigenstate
//! x0 = [1.0, 0.0, 0.0]           # gaussian                 (default 0)
//! k0 = [0.5, 0.0, 0.0]           # gaussian                 (default 0)
//! sigma = 0.8                    # gaussian
//! k = [1.0, 0.0, 0.0]            # plane-wave
//! n = 0                          # ho-eigenstate, 0..=2
//! omega = 1.0                    # ho-eigenstate (default: harmonic ω)
//! q0 = [1.0, 0.0, 0.0, 0.0]      # right factor, normalized on load
//!
//! [evolve]                       # required
//! dt = 1e-3
//! t_final = 5.0
//! record_every = 100             # default 1
//!
//! [output]                       # optional
//! dir = "out"                    # default "out/<name>"
//! formats = ["csv", "report"]    # csv | report | snapshot; default csv + report
//!                                # meta.txt is always written
//! ```

use std::fmt;

use hqm_core::dynamics::Equation;
use hqm_core::gauge::{GaugeFamily, PotentialSpec, ScalarFamily, Units};
use hqm_core::{Boundary, Quaternion};
use num_complex::Complex64;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub dims: usize,
    pub n: usize,
    pub length: f64,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialKind {
    Gaussian { x0: [f64; 3], k0: [f64; 3], sigma: f64 },
    PlaneWave { k: [f64; 3] },
    HoEigenstate { n: usize, omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub kind: InitialKind,
    pub q0: Quaternion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Continuity,
    Ehrenfest,
    Expectation,
    Virial,
    Lorentz,
    Monopole,
    /// Evolves the same initial state under the other equation.
    Equivalence,
    Identities,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Continuity,
        Check::Ehrenfest,
        Check::Expectation,
        Check::Virial,
        Check::Lorentz,
        Check::Monopole,
        Check::Equivalence,
        Check::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Continuity => "continuity",
            Check::Ehrenfest => "ehrenfest",
            Check::Expectation => "expectation",
            Check::Virial => "virial",
            Check::Lorentz => "lorentz",
            Check::Monopole => "monopole",
            Check::Equivalence => "equivalence",
            Check::Identities => "identities",
        }
    }

    /// Checks that differentiate recorded states in time.
    pub fn needs_snapshots(self) -> bool {
        matches!(self, Check::Continuity | Check::Ehrenfest | Check::Expectation | Check::Lorentz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Report,
    /// Final state as a text table, see `runner::write_snapshot`.
    Snapshot,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Report => "report",
            Format::Snapshot => "snapshot",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub equation: Equation,
    pub grid: GridConfig,
    pub units: Units,
    pub potential: PotentialSpec,
    pub initial: InitialState,
    pub evolve: EvolveConfig,
    pub checks: Vec<Check>,
    pub output: OutputConfig,
    /// Non-fatal notes produced while loading.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

/// All problems found in one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const Q0_RENORM_WARN: f64 = 1e-9;

struct Reader<'a> {
    text: &'a str,
    errors: Vec<ConfigError>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl<'a> Reader<'a> {
    /// First line that assigns `key` or opens `[key]`, for error messages.
    fn line_of(&self, key: &str) -> Option<usize> {
        let last = key.rsplit('.').next().unwrap_or(key);
        self.text.lines().position(|l| {
            let t = l.trim_start();
            t.starts_with(&format!("[{key}]"))
                || t.strip_prefix(last).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
    }

    fn error(&mut self, key: &str, message: impl Into<String>) {
        let line = self.line_of(key);
        self.errors.push(ConfigError {
            key: key.to_string(),
            message: message.into(),
            line,
        });
    }

    fn allow(&mut self, t: &Table, path: &str, allowed: &[&str]) {
        for k in t.keys() {
            if !allowed.contains(&k.as_str()) {
                self.error(&join(path, k), format!("unknown key; expected one of: {}", allowed.join(", ")));
            }
        }
    }

    fn table<'t>(&mut self, t: &'t Table, path: &str, key: &str, required: bool) -> Option<&'t Table> {
        match t.get(key) {
            Some(Value::Table(s)) => Some(s),
            Some(_) => {
                self.error(&join(path, key), "must be a table");
                None
            }
            None => {
                if required {
                    self.error(&join(path, key), "missing required section");
                }
                None
            }
        }
    }

    fn float(&mut self, t: &Table, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let full = join(path, key);
        match t.get(key) {
            Some(Value::Float(x)) if x.is_finite() => Some(*x),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(Value::Float(_)) => {
                self.error(&full, "must be finite");
                None
            }
            Some(_) => {
                self.error(&full, "must be a number");
                None
            }
            None if default.is_some() => default,
            None => {
                self.error(&full, "missing required value");
                None
            }
        }
    }

    fn positive(&mut self, t: &Table, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let v = self.float(t, path, key, default)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.error(&join(path, key), format!("must be positive, got {v}"));
            None
        }
    }

    fn uint(&mut self, t: &Table, path: &str, key: &str, default: Option<usize>, min: usize, max: usize) -> Option<usize> {
        let full = join(path, key);
        let v = match t.get(key) {
            Some(Value::Integer(i)) => *i,
            Some(_) => {
                self.error(&full, "must be an integer");
                return None;
            }
            None if default.is_some() => return default,
            None => {
                self.error(&full, "missing required value");
                return None;
            }
        };
        if v < min as i64 || v > max as i64 {
            self.error(&full, format!("must be in {min}..={max}, got {v}"));
            return None;
        }
        Some(v as usize)
    }

    fn string(&mut self, t: &Table, path: &str, key: &str, default: Option<&str>) -> Option<String> {
        match t.get(key) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.error(&join(path, key), "must be a string");
                None
            }
            None => match default {
                Some(d) => Some(d.to_string()),
                None => {
                    self.error(&join(path, key), "missing required value");
                    None
                }
            },
        }
    }

    fn choice<T: Copy>(&mut self, t: &Table, path: &str, key: &str, default: Option<&str>, options: &[(&str, T)]) -> Option<T> {
        let s = self.string(t, path, key, default)?;
        match options.iter().find(|(n, _)| *n == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.error(&join(path, key), format!("`{s}` is not allowed; expected one of: {}", names.join(", ")));
                None
            }
        }
    }

    fn floats<const N: usize>(&mut self, t: &Table, path: &str, key: &str, default: Option<[f64; N]>) -> Option<[f64; N]> {
        let full = join(path, key);
        let arr = match t.get(key) {
            Some(Value::Array(a)) => a,
            Some(_) => {
                self.error(&full, format!("must be an array of {N} numbers"));
                return None;
            }
            None if default.is_some() => return default,
            None => {
                self.error(&full, "missing required value");
                return None;
            }
        };
        if arr.len() != N {
            self.error(&full, format!("must have {N} entries, got {}", arr.len()));
            return None;
        }
        let mut out = [0.0; N];
        for (o, v) in out.iter_mut().zip(arr) {
            *o = match v {
                Value::Float(x) if x.is_finite() => *x,
                Value::Integer(i) => *i as f64,
                _ => {
                    self.error(&full, "entries must be finite numbers");
                    return None;
                }
            };
        }
        Some(out)
    }

    fn strings(&mut self, t: &Table, path: &str, key: &str) -> Vec<String> {
        match t.get(key) {
            None => Vec::new(),
            Some(Value::Array(a)) => {
                let mut out = Vec::new();
                for v in a {
                    match v {
                        Value::String(s) => out.push(s.clone()),
                        _ => self.error(&join(path, key), "entries must be strings"),
                    }
                }
                out
            }
            Some(_) => {
                self.error(&join(path, key), "must be an array of strings");
                Vec::new()
            }
        }
    }
}

fn syntax_line(text: &str, err: &toml::de::Error) -> Option<usize> {
    err.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
}

/// Parses and validates a scenario, reporting every problem found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigErrors> {
    let root: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let e: toml::de::Error = e;
            return Err(ConfigErrors(vec![ConfigError {
                key: "syntax".into(),
                message: e.message().to_string(),
                line: syntax_line(text, &e),
            }]));
        }
    };
    let mut r = Reader { text, errors: Vec::new() };
    let mut warnings = Vec::new();
    r.allow(
        &root,
        "",
        &["name", "description", "equation", "checks", "grid", "units", "potential", "gauge", "initial", "evolve", "output"],
    );
    let name = r.string(&root, "", "name", None);
    if let Some(n) = &name {
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            r.error("name", "must be non-empty and use only letters, digits, `_` or `-`");
        }
    }
    let description = r.string(&root, "", "description", Some("")).unwrap_or_default();
    let equation = r.choice(&root, "", "equation", Some("right"), &[("right", Equation::Right), ("left", Equation::Left)]);

    let grid = r.table(&root, "", "grid", true).and_then(|g| {
        r.allow(g, "grid", &["dims", "n", "length", "boundary"]);
        let dims = r.uint(g, "grid", "dims", None, 1, 3);
        let n = r.uint(g, "grid", "n", None, 4, 1 << 16);
        let length = r.positive(g, "grid", "length", None);
        let boundary = r.choice(
            g,
            "grid",
            "boundary",
            Some("periodic"),
            &[("periodic", Boundary::Periodic), ("dirichlet", Boundary::DirichletZero)],
        );
        Some(GridConfig {
            dims: dims?,
            n: n?,
            length: length?,
            boundary: boundary?,
        })
    });

    let units = match r.table(&root, "", "units", false) {
        Some(u) => {
            r.allow(u, "units", &["hbar", "mass"]);
            let hbar = r.positive(u, "units", "hbar", Some(1.0));
            let mass = r.positive(u, "units", "mass", Some(1.0));
            Units {
                hbar: hbar.unwrap_or(1.0),
                mass: mass.unwrap_or(1.0),
            }
        }
        None => Units::default(),
    };

    let mut scalar = Vec::new();
    if let Some(p) = r.table(&root, "", "potential", false) {
        r.allow(p, "potential", &["harmonic", "quartic", "absorber", "complex_w"]);
        if let Some(t) = r.table(p, "potential", "harmonic", false) {
            r.allow(t, "potential.harmonic", &["omega"]);
            if let Some(omega) = r.positive(t, "potential.harmonic", "omega", None) {
                scalar.push(ScalarFamily::Harmonic { omega });
            }
        }
        if let Some(t) = r.table(p, "potential", "quartic", false) {
            r.allow(t, "potential.quartic", &["lambda"]);
            if let Some(lambda) = r.float(t, "potential.quartic", "lambda", None) {
                scalar.push(ScalarFamily::Quartic { lambda });
            }
        }
        if let Some(t) = r.table(p, "potential", "absorber", false) {
            r.allow(t, "potential.absorber", &["gamma"]);
            if let Some(gamma) = r.float(t, "potential.absorber", "gamma", None) {
                scalar.push(ScalarFamily::Absorber { gamma });
            }
        }
        if let Some(t) = r.table(p, "potential", "complex_w", false) {
            r.allow(t, "potential.complex_w", &["w0"]);
            if let Some([re, im]) = r.floats::<2>(t, "potential.complex_w", "w0", None) {
                scalar.push(ScalarFamily::ComplexW { w0: Complex64::new(re, im) });
            }
        }
    }

    let mut gauge = Vec::new();
    if let Some(gt) = r.table(&root, "", "gauge", false) {
        r.allow(gt, "gauge", &["uniform_b", "const_beta", "monopole_demo"]);
        if let Some(t) = r.table(gt, "gauge", "uniform_b", false) {
            r.allow(t, "gauge.uniform_b", &["b0"]);
            if let Some(b0) = r.float(t, "gauge.uniform_b", "b0", None) {
                gauge.push(GaugeFamily::UniformB { b0 });
            }
        }
        if let Some(t) = r.table(gt, "gauge", "const_beta", false) {
            r.allow(t, "gauge.const_beta", &["re", "im"]);
            let re = r.floats::<3>(t, "gauge.const_beta", "re", Some([0.0; 3]));
            let im = r.floats::<3>(t, "gauge.const_beta", "im", Some([0.0; 3]));
            if let (Some(re), Some(im)) = (re, im) {
                gauge.push(GaugeFamily::ConstBeta {
                    beta: std::array::from_fn(|a| Complex64::new(re[a], im[a])),
                });
            }
        }
        if let Some(t) = r.table(gt, "gauge", "monopole_demo", false) {
            r.allow(t, "gauge.monopole_demo", &["scale"]);
            if let Some(scale) = r.float(t, "gauge.monopole_demo", "scale", None) {
                gauge.push(GaugeFamily::MonopoleDemo { scale });
            }
        }
    }
    if !gauge.is_empty() && grid.as_ref().is_some_and(|g| g.dims != 3) {
        r.error("gauge", "gauge potentials need a 3D grid");
    }

    let harmonic_omega = scalar.iter().find_map(|s| match s {
        ScalarFamily::Harmonic { omega } => Some(*omega),
        _ => None,
    });
    let initial = r.table(&root, "", "initial", true).and_then(|t| {
        let p = "initial";
        let kind = r.choice(t, p, "kind", None, &[("gaussian", 0), ("plane-wave", 1), ("ho-eigenstate", 2)])?;
        let q = r.floats::<4>(t, p, "q0", Some([1.0, 0.0, 0.0, 0.0]));
        let kind = match kind {
            0 => {
                r.allow(t, p, &["kind", "q0", "x0", "k0", "sigma"]);
                let x0 = r.floats::<3>(t, p, "x0", Some([0.0; 3]));
                let k0 = r.floats::<3>(t, p, "k0", Some([0.0; 3]));
                let sigma = r.positive(t, p, "sigma", None);
                Some(InitialKind::Gaussian {
                    x0: x0?,
                    k0: k0?,
                    sigma: sigma?,
                })
            }
            1 => {
                r.allow(t, p, &["kind", "q0", "k"]);
                let k = r.floats::<3>(t, p, "k", None)?;
                Some(InitialKind::PlaneWave { k })
            }
            _ => {
                r.allow(t, p, &["kind", "q0", "n", "omega"]);
                let n = r.uint(t, p, "n", Some(0), 0, 2);
                let omega = match (t.contains_key("omega"), harmonic_omega) {
                    (false, Some(w)) => Some(w),
                    _ => r.positive(t, p, "omega", None),
                };
                Some(InitialKind::HoEigenstate { n: n?, omega: omega? })
            }
        };
        let q = q?;
        let q0 = Quaternion::new(q[0], q[1], q[2], q[3]);
        let norm = q0.norm();
        if norm == 0.0 {
            r.error("initial.q0", "must be nonzero");
            return None;
        }
        if (norm - 1.0).abs() > Q0_RENORM_WARN {
            warnings.push(format!("initial.q0 renormalized from |q0| = {norm}"));
        }
        Some(InitialState {
            kind: kind?,
            q0: q0 * (1.0 / norm),
        })
    });

    let evolve = r.table(&root, "", "evolve", true).and_then(|t| {
        r.allow(t, "evolve", &["dt", "t_final", "record_every"]);
        let dt = r.positive(t, "evolve", "dt", None);
        let t_final = r.float(t, "evolve", "t_final", None);
        if t_final.is_some_and(|x| x < 0.0) {
            r.error("evolve.t_final", "must be non-negative");
        }
        let record_every = r.uint(t, "evolve", "record_every", Some(1), 1, usize::MAX >> 1);
        Some(EvolveConfig {
            dt: dt?,
            t_final: t_final.filter(|x| *x >= 0.0)?,
            record_every: record_every?,
        })
    });

    let mut checks = Vec::new();
    for s in r.strings(&root, "", "checks") {
        match Check::ALL.iter().find(|c| c.name() == s) {
            Some(c) if !checks.contains(c) => checks.push(*c),
            Some(_) => {}
            None => {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                r.error("checks", format!("unknown check `{s}`; expected one of: {}", names.join(", ")));
            }
        }
    }
    checks.sort();
    if let (Some(g), Some(eq)) = (&grid, equation) {
        if checks.contains(&Check::Lorentz) && (g.dims != 3 || eq != Equation::Right) {
            r.error("checks", "`lorentz` needs a 3D grid and the right equation");
        }
        if checks.contains(&Check::Ehrenfest) && eq != Equation::Right {
            r.error("checks", "`ehrenfest` needs the right equation; `expectation` covers the left one");
        }
        if checks.contains(&Check::Monopole) && (g.dims != 3 || gauge.is_empty()) {
            r.error("checks", "`monopole` needs a 3D grid and a gauge potential");
        }
    }

    let output = match r.table(&root, "", "output", false) {
        Some(t) => {
            r.allow(t, "output", &["dir", "formats"]);
            let dir = t.contains_key("dir").then(|| r.string(t, "output", "dir", None)).flatten();
            let mut formats = Vec::new();
            let listed = t.contains_key("formats");
            for s in r.strings(t, "output", "formats") {
                match s.as_str() {
                    "csv" => formats.push(Format::Csv),
                    "report" => formats.push(Format::Report),
                    "snapshot" => formats.push(Format::Snapshot),
                    _ => r.error("output.formats", format!("unknown format `{s}`; expected csv, report or snapshot")),
                }
            }
            if !listed {
                formats = vec![Format::Csv, Format::Report];
            }
            formats.sort();
            formats.dedup();
            OutputConfig { dir, formats }
        }
        None => OutputConfig {
            dir: None,
            formats: vec![Format::Csv, Format::Report],
        },
    };

    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    Ok(ScenarioConfig {
        name: name.expect("checked"),
        description,
        equation: equation.expect("checked"),
        grid: grid.expect("checked"),
        units,
        potential: PotentialSpec { scalar, gauge },
        initial: initial.expect("checked"),
        evolve: evolve.expect("checked"),
        checks,
        output,
        warnings,
    })
}

fn arr(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
}

fn table(entries: Vec<(&str, Value)>) -> Value {
    Value::Table(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

impl ScenarioConfig {
    /// Applies `--resolution-scale`: `n × s`, `dt / s`.
    pub fn scaled(&self, s: usize) -> Self {
        let mut c = self.clone();
        c.grid.n *= s;
        c.evolve.dt /= s as f64;
        c
    }

    /// The fully resolved configuration, defaults included, as TOML.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("name".into(), Value::String(self.name.clone()));
        root.insert("description".into(), Value::String(self.description.clone()));
        root.insert("equation".into(), Value::String(self.equation.name().into()));
        root.insert(
            "checks".into(),
            Value::Array(self.checks.iter().map(|c| Value::String(c.name().into())).collect()),
        );
        let g = &self.grid;
        root.insert(
            "grid".into(),
            table(vec![
                ("dims", Value::Integer(g.dims as i64)),
                ("n", Value::Integer(g.n as i64)),
                ("length", Value::Float(g.length)),
                ("boundary", Value::String(boundary_name(g.boundary).into())),
            ]),
        );
        root.insert(
            "units".into(),
            table(vec![("hbar", Value::Float(self.units.hbar)), ("mass", Value::Float(self.units.mass))]),
        );
        let mut pot = Table::new();
        for s in &self.potential.scalar {
            let (k, v) = match *s {
                ScalarFamily::Harmonic { omega } => ("harmonic", table(vec![("omega", Value::Float(omega))])),
                ScalarFamily::Quartic { lambda } => ("quartic", table(vec![("lambda", Value::Float(lambda))])),
                ScalarFamily::Absorber { gamma } => ("absorber", table(vec![("gamma", Value::Float(gamma))])),
                ScalarFamily::ComplexW { w0 } => ("complex_w", table(vec![("w0", arr(&[w0.re, w0.im]))])),
                ScalarFamily::None => continue,
            };
            pot.insert(k.into(), v);
        }
        root.insert("potential".into(), Value::Table(pot));
        let mut gauge = Table::new();
        for f in &self.potential.gauge {
            let (k, v) = match *f {
                GaugeFamily::UniformB { b0 } => ("uniform_b", table(vec![("b0", Value::Float(b0))])),
                GaugeFamily::ConstBeta { beta } => (
                    "const_beta",
                    table(vec![("re", arr(&beta.map(|z| z.re))), ("im", arr(&beta.map(|z| z.im)))]),
                ),
                GaugeFamily::MonopoleDemo { scale } => ("monopole_demo", table(vec![("scale", Value::Float(scale))])),
                GaugeFamily::None => continue,
            };
            gauge.insert(k.into(), v);
        }
        root.insert("gauge".into(), Value::Table(gauge));
        let q = self.initial.q0;
        let mut init = vec![("q0", arr(&[q.x0, q.x1, q.x2, q.x3]))];
        match &self.initial.kind {
            InitialKind::Gaussian { x0, k0, sigma } => {
                init.push(("kind", Value::String("gaussian".into())));
                init.push(("x0", arr(x0)));
                init.push(("k0", arr(k0)));
                init.push(("sigma", Value::Float(*sigma)));
            }
            InitialKind::PlaneWave { k } => {
                init.push(("kind", Value::String("plane-wave".into())));
                init.push(("k", arr(k)));
            }
            InitialKind::HoEigenstate { n, omega } => {
                init.push(("kind", Value::String("ho-eigenstate".into())));
                init.push(("n", Value::Integer(*n as i64)));
                init.push(("omega", Value::Float(*omega)));
            }
        }
        root.insert("initial".into(), table(init));
        let e = &self.evolve;
        root.insert(
            "evolve".into(),
            table(vec![
                ("dt", Value::Float(e.dt)),
                ("t_final", Value::Float(e.t_final)),
                ("record_every", Value::Integer(e.record_every as i64)),
            ]),
        );
        let mut out = vec![(
            "formats",
            Value::Array(
                self.output
                    .formats
                    .iter()
                    .map(|f| Value::String(f.name().into()))
                    .collect(),
            ),
        )];
        if let Some(d) = &self.output.dir {
            out.push(("dir", Value::String(d.clone())));
        }
        root.insert("output".into(), table(out));
        toml::to_string(&root).expect("plain values serialize")
    }
}

pub fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::DirichletZero => "dirichlet",
    }
}
