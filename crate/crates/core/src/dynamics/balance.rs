use std::str::FromStr;
use std::sync::Arc;

use crate::error::{HqmError, Result};
use crate::gauge::{GaugePotential, ScalarPotential, Units};
use crate::lattice::{gradient, integrate, Grid, QField};
use crate::operators::{
    bar_i, commutator, continuity_fields, expect_raw, generalized_momentum, identity, momentum, multiply_left,
    partial, position, ContinuityFields, LinearOp,
};
use crate::quaternion::Quaternion;

use super::evolve::{centered_rate, Equation, ObservationSeries};

fn real_field(grid: Grid, v: &[f64]) -> QField {
    QField::new(grid, v.iter().map(|&x| Quaternion::real(x)).collect()).expect("one value per node")
}

fn dot(a: &QField, b: &QField) -> f64 {
    integrate(&a.zip_map(b, |p, q| Quaternion::real(p.dot(q)))).x0
}

/// Nodewise residual of `∂ρ/∂t + ∇·J = g` at the interior samples.
#[derive(Debug, Clone)]
pub struct ContinuityResidual {
    pub times: Vec<f64>,
    pub fields: Vec<Vec<f64>>,
    pub max_abs: Vec<f64>,
}

impl ContinuityResidual {
    pub fn overall_max(&self) -> f64 {
        self.max_abs.iter().copied().fold(0.0, f64::max)
    }
}

/// Uses the densities of the equation the series was evolved with.
pub fn continuity_residual(
    series: &ObservationSeries,
    g: &GaugePotential,
    u: &ScalarPotential,
    units: Units,
) -> Result<ContinuityResidual> {
    match series.equation {
        Equation::Right => continuity_residual_with(series, |psi| continuity_fields(psi, g, u, units)),
        Equation::Left => continuity_residual_with(series, |psi| crate::left::continuity_left(psi, g, u, units)),
    }
}

pub fn continuity_residual_with(
    series: &ObservationSeries,
    fields: impl Fn(&QField) -> Result<ContinuityFields>,
) -> Result<ContinuityResidual> {
    series.require_snapshots(3, "continuity residual")?;
    let dt = series.interval();
    let all: Vec<ContinuityFields> = series.snapshots.iter().map(&fields).collect::<Result<_>>()?;
    let mut out = ContinuityResidual {
        times: Vec::new(),
        fields: Vec::new(),
        max_abs: Vec::new(),
    };
    for k in 1..all.len() - 1 {
        let c = &all[k];
        let grid = c.grid;
        let mut div = vec![0.0; grid.len()];
        for (a, j) in c.j.iter().enumerate() {
            let d = gradient(&real_field(grid, j), a)?;
            for (acc, q) in div.iter_mut().zip(d.values()) {
                *acc += q.x0;
            }
        }
        let res: Vec<f64> = (0..grid.len())
            .map(|i| (all[k + 1].rho[i] - all[k - 1].rho[i]) / (2.0 * dt) + div[i] - c.g[i])
            .collect();
        out.max_abs.push(res.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        out.times.push(series.times[k]);
        out.fields.push(res);
    }
    Ok(out)
}

/// Position and momentum balance laws.
#[derive(Debug, Clone)]
pub struct EhrenfestReport {
    pub times: Vec<f64>,
    /// `d⟨r_a⟩/dt`, per active axis.
    pub position_rate: Vec<Vec<f64>>,
    pub pi_over_m: Vec<Vec<f64>>,
    /// `⟨(U r_a|i)⟩`.
    pub u_r_bar: Vec<Vec<f64>>,
    /// `d⟨r⟩/dt − ⟨Π⟩/m + (2/ħ)⟨(U r|i)⟩`.
    pub position_residual: Vec<Vec<f64>>,
    /// `d⟨p_x⟩/dt`.
    pub momentum_rate: Vec<f64>,
    /// `∫(UΨ∂Ψ* + ∂ΨΨ*U*)`.
    pub momentum_integral: Vec<f64>,
    /// `2⟨−∂U/∂x⟩ + 2⟨−U∂/∂x⟩`.
    pub momentum_expectation_form: Vec<f64>,
    /// `⟨−∂U/∂x⟩`.
    pub minus_grad_u: Vec<f64>,
    pub momentum_integral_residual: Vec<f64>,
    pub momentum_expectation_residual: Vec<f64>,
}

impl EhrenfestReport {
    pub fn max_position_residual(&self) -> f64 {
        self.position_residual.iter().flatten().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

/// Compares measured rates of ⟨r⟩ and ⟨p_x⟩ against their balance laws at
/// every interior snapshot. Expectations are raw so decaying states are
/// handled.
pub fn ehrenfest_check(
    series: &ObservationSeries,
    g: &GaugePotential,
    u: &ScalarPotential,
    units: Units,
) -> Result<EhrenfestReport> {
    series.require_snapshots(3, "Ehrenfest check")?;
    let grid = *series.snapshots[0].grid();
    grid.check_same(g.grid())?;
    grid.check_same(u.grid())?;
    let dims = grid.dims();
    let dt = series.interval();
    let uq = u.as_qfield();
    let grad_u = gradient(&uq, 0)?;
    let minus_grad_u_op = multiply_left("−∂U", grad_u.scale(-1.0));
    let minus_u_d = multiply_left("−U", uq.scale(-1.0)).compose(&partial(&grid, 0)?);
    let p0 = momentum(&grid, 0, units)?;
    let pis: Vec<LinearOp> = (0..dims).map(|a| generalized_momentum(g, a, units)).collect::<Result<_>>()?;
    let u_r_bar_ops: Vec<LinearOp> = (0..dims)
        .map(|a| bar_i(&multiply_left("U", uq.clone()).compose(&position(a))))
        .collect();

    let snaps = &series.snapshots;
    let mut r_exp = vec![Vec::new(); dims];
    let mut p_exp = Vec::new();
    for psi in snaps {
        for (a, r) in r_exp.iter_mut().enumerate() {
            r.push(expect_raw(&position(a), psi)?);
        }
        p_exp.push(expect_raw(&p0, psi)?);
    }
    let position_rate: Vec<Vec<f64>> = r_exp.iter().map(|r| centered_rate(r, dt)).collect();
    let momentum_rate = centered_rate(&p_exp, dt);

    let mut rep = EhrenfestReport {
        times: series.times[1..snaps.len() - 1].to_vec(),
        position_rate,
        pi_over_m: vec![Vec::new(); dims],
        u_r_bar: vec![Vec::new(); dims],
        position_residual: vec![Vec::new(); dims],
        momentum_rate,
        momentum_integral: Vec::new(),
        momentum_expectation_form: Vec::new(),
        minus_grad_u: Vec::new(),
        momentum_integral_residual: Vec::new(),
        momentum_expectation_residual: Vec::new(),
    };
    for (k, psi) in snaps.iter().enumerate().take(snaps.len() - 1).skip(1) {
        for a in 0..dims {
            let pm = expect_raw(&pis[a], psi)? / units.mass;
            let ur = expect_raw(&u_r_bar_ops[a], psi)?;
            rep.pi_over_m[a].push(pm);
            rep.u_r_bar[a].push(ur);
            rep.position_residual[a].push(rep.position_rate[a][k - 1] - pm + 2.0 / units.hbar * ur);
        }
        let dpsi = gradient(psi, 0)?;
        let upsi = psi.left_mul_field(&uq);
        let integral = integrate(&upsi.zip_map(&dpsi, |a, d| a * d.conj() + d * a.conj())).x0;
        let mg = expect_raw(&minus_grad_u_op, psi)?;
        let form = 2.0 * mg + 2.0 * expect_raw(&minus_u_d, psi)?;
        let rate = rep.momentum_rate[k - 1];
        rep.momentum_integral.push(integral);
        rep.momentum_expectation_form.push(form);
        rep.minus_grad_u.push(mg);
        rep.momentum_integral_residual.push(rate - integral);
        rep.momentum_expectation_residual.push(rate - form);
    }
    Ok(rep)
}

/// The balance law being tested for an observable 𝒪.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpectationForm {
    /// `d⟨(𝒪|i)⟩/dt = (1/ħ)⟨[𝒪, ℋ]⟩`.
    R9,
    /// `d⟨𝒪⟩/dt = (1/ħ)⟨[ℋ, (𝒪|i)]⟩`.
    R10,
    /// `d⟨𝒪 + (𝒪|i)⟩/dt = (1/ħ)⟨[𝒪 − (𝒪|i), ℋ]⟩`.
    I110,
}

impl ExpectationForm {
    pub fn name(self) -> &'static str {
        match self {
            ExpectationForm::R9 => "r9",
            ExpectationForm::R10 => "r10",
            ExpectationForm::I110 => "i110",
        }
    }
}

impl FromStr for ExpectationForm {
    type Err = HqmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r9" => Ok(Self::R9),
            "r10" => Ok(Self::R10),
            "i110" => Ok(Self::I110),
            _ => Err(HqmError::config("form", format!("unknown form `{s}`; expected r9, r10 or i110"))),
        }
    }
}

type OpAt = dyn Fn(f64) -> LinearOp + Send + Sync;

/// An observable, optionally time dependent with a supplied rate `∂𝒪/∂t`.
#[derive(Clone)]
pub enum Observable {
    Static(LinearOp),
    TimeDependent { op: Arc<OpAt>, rate: Arc<OpAt> },
}

impl Observable {
    pub fn at(&self, t: f64) -> LinearOp {
        match self {
            Observable::Static(op) => op.clone(),
            Observable::TimeDependent { op, .. } => op(t),
        }
    }

    pub fn rate_at(&self, t: f64) -> Option<LinearOp> {
        match self {
            Observable::Static(_) => None,
            Observable::TimeDependent { rate, .. } => Some(rate(t)),
        }
    }
}

impl From<LinearOp> for Observable {
    fn from(op: LinearOp) -> Self {
        Observable::Static(op)
    }
}

/// Measured minus predicted rate at each interior snapshot.
#[derive(Debug, Clone)]
pub struct ExpectationResidual {
    pub form: ExpectationForm,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Contribution of the anti-symmetric part `U_a = (U − U*)/2` that the
    /// commutator forms omit; zero for real U. Valid for observables that
    /// commute with right multiplication by i.
    pub correction: Vec<f64>,
    /// `lhs − rhs`.
    pub residual: Vec<f64>,
}

impl ExpectationResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// `lhs − rhs − correction`.
    pub fn corrected(&self) -> Vec<f64> {
        self.residual.iter().zip(&self.correction).map(|(r, c)| r - c).collect()
    }
}

/// Right-form expectation dynamics. `h` must be the Hamiltonian the series
/// was evolved with.
pub fn expectation_dynamics_residual(
    obs: &Observable,
    series: &ObservationSeries,
    h: &LinearOp,
    u: &ScalarPotential,
    units: Units,
    form: ExpectationForm,
) -> Result<ExpectationResidual> {
    if series.equation != Equation::Right {
        return Err(HqmError::config(
            "equation",
            "r9/r10/i110 apply to the right equation; use the left-variant forms",
        ));
    }
    series.require_snapshots(3, "expectation dynamics")?;
    let hbar = units.hbar;
    let ua = u.as_qfield().map(|q| q.imag());
    let measured = |op: &LinearOp, psi: &QField| -> Result<f64> {
        Ok(match form {
            ExpectationForm::R9 => expect_raw(&bar_i(op), psi)?,
            ExpectationForm::R10 => expect_raw(op, psi)?,
            ExpectationForm::I110 => expect_raw(&op.add(&bar_i(op)), psi)?,
        })
    };
    let mut values = Vec::with_capacity(series.snapshots.len());
    for (psi, &t) in series.snapshots.iter().zip(&series.times) {
        values.push(measured(&obs.at(t), psi)?);
    }
    let lhs = centered_rate(&values, series.interval());
    let n = lhs.len();
    let mut out = ExpectationResidual {
        form,
        times: series.times[1..=n].to_vec(),
        lhs,
        rhs: Vec::with_capacity(n),
        correction: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
    };
    for k in 1..=n {
        let (psi, t) = (&series.snapshots[k], series.times[k]);
        let op = obs.at(t);
        let rhs_op = match form {
            ExpectationForm::R9 => commutator(&op, h),
            ExpectationForm::R10 => commutator(h, &bar_i(&op)),
            ExpectationForm::I110 => commutator(&op.sub(&bar_i(&op)), h),
        };
        let mut rhs = expect_raw(&rhs_op, psi)? / hbar;
        if let Some(rate) = obs.rate_at(t) {
            rhs += measured(&rate, psi)?;
        }
        let o_psi = op.apply(psi);
        let ua_psi = psi.left_mul_field(&ua);
        let c10 = 2.0 / hbar * dot(&o_psi.right_mul_i(), &ua_psi);
        let c9 = -2.0 / hbar * dot(&o_psi, &ua_psi);
        let corr = match form {
            ExpectationForm::R9 => c9,
            ExpectationForm::R10 => c10,
            ExpectationForm::I110 => c9 + c10,
        };
        out.rhs.push(rhs);
        out.correction.push(corr);
        out.residual.push(out.lhs[k - 1] - rhs);
    }
    Ok(out)
}

/// The identity observable, for the trivial `0 = 0` check.
pub fn identity_observable() -> Observable {
    Observable::Static(identity())
}
