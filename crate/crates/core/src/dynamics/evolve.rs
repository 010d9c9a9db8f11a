use std::sync::Arc;

use crate::error::{HqmError, Result};
use crate::gauge::Units;
use crate::lattice::QField;
use crate::operators::{expect_raw, norm, LinearOp};
use crate::quaternion::Quaternion;

/// Which side the imaginary unit of the time derivative acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `ħ ∂Ψ/∂t i = ℋΨ`, i.e. `Ψ̇ = −(ℋΨ)i/ħ`.
    Right,
    /// `iħ ∂Ψ/∂t = ℋΨ`, i.e. `Ψ̇ = −i(ℋΨ)/ħ`.
    Left,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Right => "right",
            Equation::Left => "left",
        }
    }

    pub fn rate(self, h: &LinearOp, psi: &QField, hbar: f64) -> QField {
        let hp = h.apply(psi);
        match self {
            Equation::Right => hp.right_mul_i().scale(-1.0 / hbar),
            Equation::Left => hp.left_mul_i().scale(-1.0 / hbar),
        }
    }
}

const NORM_HISTORY: usize = 16;

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub psi: QField,
    pub dt: f64,
    /// Most recent norms, oldest first.
    pub norm_history: Vec<f64>,
}

impl EvolutionState {
    pub fn new(psi: QField, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(HqmError::config("dt", "must be positive and finite"));
        }
        let n = norm(&psi);
        Ok(Self {
            t: 0.0,
            psi,
            dt,
            norm_history: vec![n],
        })
    }
}

/// Largest step the explicit scheme is comfortable with: `0.5 m h²/ħ` on the
/// finest axis.
pub fn cfl_limit(psi: &QField, units: Units) -> f64 {
    let g = psi.grid();
    let h = (0..g.dims()).map(|a| g.spacing(a)).fold(f64::INFINITY, f64::min);
    0.5 * units.mass * h * h / units.hbar
}

/// One classical RK4 step.
pub fn step(state: EvolutionState, h: &LinearOp, eq: Equation, units: Units) -> Result<EvolutionState> {
    let EvolutionState {
        t,
        psi,
        dt,
        mut norm_history,
    } = state;
    let f = |p: &QField| eq.rate(h, p, units.hbar);
    let k1 = f(&psi);
    let k2 = f(&psi.axpy(0.5 * dt, &k1));
    let k3 = f(&psi.axpy(0.5 * dt, &k2));
    let k4 = f(&psi.axpy(dt, &k3));
    let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
    let next = psi.axpy(dt / 6.0, &incr);
    let t_next = t + dt;
    if !next.is_finite() {
        return Err(HqmError::Divergence {
            t: t_next,
            norm_history,
            last_finite: Box::new(psi),
        });
    }
    norm_history.push(norm(&next));
    if norm_history.len() > NORM_HISTORY {
        norm_history.remove(0);
    }
    Ok(EvolutionState {
        t: t_next,
        psi: next,
        dt,
        norm_history,
    })
}

type ObserveFn = dyn Fn(&QField) -> Result<f64> + Send + Sync;

/// A named real channel evaluated on each recorded state.
#[derive(Clone)]
pub struct Observer {
    name: String,
    f: Arc<ObserveFn>,
}

impl std::fmt::Debug for Observer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observer").field("name", &self.name).finish()
    }
}

impl Observer {
    pub fn new(name: impl Into<String>, f: impl Fn(&QField) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `∫ρ`.
    pub fn norm() -> Self {
        Self::new("norm", |psi| Ok(norm(psi)))
    }

    /// Raw expectation value (no normalization check; the absorber decays).
    pub fn expectation(name: impl Into<String>, op: LinearOp) -> Self {
        Self::new(name, move |psi| expect_raw(&op, psi))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observe(&self, psi: &QField) -> Result<f64> {
        (self.f)(psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub keep_snapshots: bool,
}

/// Recorded channels, optionally with the states they were computed from.
#[derive(Debug, Clone)]
pub struct ObservationSeries {
    pub times: Vec<f64>,
    pub channels: Vec<(String, Vec<f64>)>,
    pub snapshots: Vec<QField>,
    pub warnings: Vec<String>,
    pub equation: Equation,
}

impl ObservationSeries {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Sampling interval, or 0 for a single record.
    pub fn interval(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub(crate) fn require_snapshots(&self, min: usize, what: &str) -> Result<()> {
        if self.snapshots.len() != self.times.len() || self.snapshots.is_empty() {
            return Err(HqmError::config("snapshots", format!("{what} needs recorded states")));
        }
        if self.snapshots.len() < min {
            return Err(HqmError::Precondition(format!(
                "{what} needs at least {min} snapshots, got {}",
                self.snapshots.len()
            )));
        }
        Ok(())
    }
}

/// Integrates from t = 0 to `t_final` with fixed `dt`, recording every
/// `record_every` steps (and always at t = 0).
pub fn evolve(
    psi0: QField,
    h: &LinearOp,
    eq: Equation,
    units: Units,
    opts: EvolveOptions,
    observers: &[Observer],
) -> Result<ObservationSeries> {
    if !(opts.t_final.is_finite() && opts.t_final >= 0.0) {
        return Err(HqmError::config("t_final", "must be non-negative and finite"));
    }
    if opts.record_every == 0 {
        return Err(HqmError::config("record_every", "must be at least 1"));
    }
    let mut state = EvolutionState::new(psi0, opts.dt)?;
    let mut warnings = Vec::new();
    let limit = cfl_limit(&state.psi, units);
    if opts.dt > limit {
        warnings.push(format!("dt = {} exceeds the stability guide 0.5·m·h²/ħ = {limit}", opts.dt));
    }
    let steps = (opts.t_final / opts.dt).round() as usize;
    let mut series = ObservationSeries {
        times: Vec::new(),
        channels: observers.iter().map(|o| (o.name.clone(), Vec::new())).collect(),
        snapshots: Vec::new(),
        warnings: Vec::new(),
        equation: eq,
    };
    let record = |series: &mut ObservationSeries, state: &EvolutionState, k: usize| -> Result<()> {
        series.times.push(k as f64 * opts.dt);
        for (o, (_, vals)) in observers.iter().zip(series.channels.iter_mut()) {
            vals.push(o.observe(&state.psi)?);
        }
        if opts.keep_snapshots {
            series.snapshots.push(state.psi.clone());
        }
        Ok(())
    };
    record(&mut series, &state, 0)?;
    for k in 1..=steps {
        state = step(state, h, eq, units)?;
        if k % opts.record_every == 0 {
            record(&mut series, &state, k)?;
        }
    }
    series.warnings.append(&mut warnings);
    Ok(series)
}

/// Centered first differences at the interior samples.
pub fn centered_rate(values: &[f64], interval: f64) -> Vec<f64> {
    values.windows(3).map(|w| (w[2] - w[0]) / (2.0 * interval)).collect()
}

/// `Ψ(t) = φ q0 e^{−iEt/ħ}` for a real eigenfunction φ of a right-linear ℋ.
#[derive(Debug, Clone)]
pub struct StationaryState {
    phi: QField,
    energy: f64,
    q0: Quaternion,
    hbar: f64,
    residual: f64,
}

const STATIONARY_TOL: f64 = 1e-3;

impl StationaryState {
    pub fn new(phi: QField, energy: f64, q0: Quaternion, h: &LinearOp, units: Units) -> Result<Self> {
        if (q0.norm() - 1.0).abs() > 1e-12 {
            return Err(HqmError::Precondition(format!("q0 must be a unit quaternion, |q0| = {}", q0.norm())));
        }
        let residual = h.apply(&phi).sub(&phi.scale(energy)).l2_norm() / phi.l2_norm();
        if !(residual < STATIONARY_TOL) {
            return Err(HqmError::Precondition(format!(
                "‖ℋφ − Eφ‖/‖φ‖ = {residual:e} exceeds {STATIONARY_TOL:e}"
            )));
        }
        Ok(Self {
            phi,
            energy,
            q0,
            hbar: units.hbar,
            residual,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn at(&self, t: f64) -> QField {
        let phase = Quaternion::from_complex(num_complex::Complex64::from_polar(1.0, -self.energy * t / self.hbar));
        self.phi.right_mul(self.q0 * phase)
    }
}

/// Harmonic-oscillator eigenfunction with quantum number `n ≤ 2` along x and
/// the ground state on the other active axes, normalized on the grid.
/// Returns `(φ, E)` with `E = ħω(n + dims/2)`.
pub fn ho_eigenfunction(grid: crate::lattice::Grid, n: usize, omega: f64, units: Units) -> Result<(QField, f64)> {
    if n > 2 {
        return Err(HqmError::config("n", "harmonic eigenstates are available for n = 0, 1, 2"));
    }
    let s = (units.mass * omega / units.hbar).sqrt();
    let phi = QField::from_fn(grid, |x| {
        let xi = s * x[0];
        let herm = match n {
            0 => 1.0,
            1 => 2.0 * xi,
            _ => 4.0 * xi * xi - 2.0,
        };
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Quaternion::real(herm * (-0.5 * s * s * r2).exp())
    });
    let nn = norm(&phi).sqrt();
    let energy = units.hbar * omega * (n as f64 + 0.5 * grid.dims() as f64);
    Ok((phi.scale(1.0 / nn), energy))
}

/// Normalized `Ψ = exp(−|r − r0|²/4σ² + i k0·r)·q0`, with the phase on the
/// left of the constant right factor `q0`.
pub fn gaussian_packet(grid: crate::lattice::Grid, r0: [f64; 3], k0: [f64; 3], sigma: f64, q0: Quaternion) -> Result<QField> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(HqmError::config("sigma", "must be positive and finite"));
    }
    let dims = grid.dims();
    let psi = QField::from_fn(grid, |x| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for a in 0..dims {
            let d = x[a] - r0[a];
            r2 += d * d;
            phase += k0[a] * x[a];
        }
        Quaternion::from_complex(num_complex::Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), phase)) * q0
    });
    let nn = norm(&psi).sqrt();
    if !(nn > 0.0) {
        return Err(HqmError::config("initial_state", "packet has no weight on the grid"));
    }
    Ok(psi.scale(1.0 / nn))
}
