use crate::error::{HqmError, Result};
use crate::gauge::{GaugePotential, ScalarPotential, Units};
use crate::lattice::{gradient, Boundary, QField};
use crate::operators::{bar_i, expect_raw, hamiltonian, multiply_left, norm, p_squared, r_dot_p, LinearOp};
use crate::quaternion::Quaternion;

use super::evolve::{step, Equation, EvolutionState};

/// Channels of the stationary-state virial balance.
#[derive(Debug, Clone, PartialEq)]
pub struct VirialReport {
    /// `d/dt⟨r·p + (r·p|i)⟩`, measured by evolving the state two steps.
    pub lhs_rate: f64,
    /// `⟨p²⟩/m`.
    pub kinetic: f64,
    /// `½⟨r·∇(U + U*)⟩`.
    pub real_grad: f64,
    /// `½⟨(r·∇(U − U*)|i)⟩`.
    pub imag_grad: f64,
    /// Extra channel of the left equation, `⟨2W r·p⟩`; `None` for the right
    /// equation.
    pub w_channel: Option<f64>,
    /// `lhs_rate − kinetic + real_grad − imag_grad` (minus `w_channel` when
    /// present).
    pub residual: f64,
    /// `‖ℋΨ − EΨ‖/‖Ψ‖` with `E = ⟨ℋ⟩/⟨1⟩`.
    pub stationarity: f64,
    /// False when the state carries non-negligible density on the edge of a
    /// periodic grid, where the virial argument does not apply.
    pub decaying: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirialOptions {
    pub dt: f64,
    /// Diagnostic runs on non-stationary states turn this off.
    pub require_stationary: bool,
}

impl Default for VirialOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            require_stationary: true,
        }
    }
}

const STATIONARY_TOL: f64 = 1e-3;
const EDGE_FRACTION: f64 = 1e-8;

pub(crate) fn stationarity(h: &LinearOp, psi: &QField) -> Result<f64> {
    let e = expect_raw(h, psi)? / norm(psi);
    Ok(h.apply(psi).sub(&psi.scale(e)).l2_norm() / psi.l2_norm())
}

pub(crate) fn decays_at_edges(psi: &QField) -> bool {
    let g = psi.grid();
    if g.boundary() == Boundary::DirichletZero {
        return true;
    }
    let peak = psi.values().iter().map(|q| q.norm_sqr()).fold(0.0, f64::max);
    (0..g.len()).all(|i| {
        let m = g.multi_index(i);
        let edge = (0..g.dims()).any(|a| m[a] == 0 || m[a] + 1 == g.n()[a]);
        !edge || psi.values()[i].norm_sqr() <= EDGE_FRACTION * peak
    })
}

/// `Σ_a x_a ∂_a f`.
pub(crate) fn r_dot_grad(f: &QField) -> Result<QField> {
    let mut acc = QField::zeros(*f.grid());
    for a in 0..f.grid().dims() {
        acc = acc.add(&gradient(f, a)?.times_coord(a));
    }
    Ok(acc)
}

/// `½⟨r·∇(U+U*)⟩` and `½⟨(r·∇(U−U*)|i)⟩`.
pub(crate) fn gradient_channels(u: &ScalarPotential, psi: &QField) -> Result<(f64, f64)> {
    let uq = u.as_qfield();
    let sym = r_dot_grad(&uq.map(|q| Quaternion::real(q.x0)))?;
    let anti = r_dot_grad(&uq.map(|q| q.imag()))?;
    let real_grad = expect_raw(&multiply_left("r·∇(U+U*)", sym), psi)?;
    let imag_grad = expect_raw(&bar_i(&multiply_left("r·∇(U−U*)", anti)), psi)?;
    Ok((real_grad, imag_grad))
}

/// Two-step centered estimate of `d/dt⟨op⟩` along the given evolution.
pub(crate) fn measured_rate(
    psi: &QField,
    h: &LinearOp,
    eq: Equation,
    units: Units,
    dt: f64,
    op: &LinearOp,
) -> Result<f64> {
    let s0 = EvolutionState::new(psi.clone(), dt)?;
    let s2 = step(step(s0, h, eq, units)?, h, eq, units)?;
    Ok((expect_raw(op, &s2.psi)? - expect_raw(op, psi)?) / (2.0 * dt))
}

/// Virial balance of the right equation for 𝓐 = 0.
pub fn virial_report(psi: &QField, u: &ScalarPotential, units: Units) -> Result<VirialReport> {
    virial_report_with(psi, u, units, VirialOptions::default())
}

pub fn virial_report_with(psi: &QField, u: &ScalarPotential, units: Units, opts: VirialOptions) -> Result<VirialReport> {
    let grid = *psi.grid();
    grid.check_same(u.grid())?;
    let h = hamiltonian(&GaugePotential::zero(grid), u, units)?;
    let stat = stationarity(&h, psi)?;
    if opts.require_stationary && !(stat < STATIONARY_TOL) {
        return Err(HqmError::Precondition(format!(
            "virial balance needs a stationary state; ‖ℋΨ − EΨ‖/‖Ψ‖ = {stat:e}"
        )));
    }
    let rp = r_dot_p(&grid, units)?;
    let lhs_rate = measured_rate(psi, &h, Equation::Right, units, opts.dt, &rp.add(&bar_i(&rp)))?;
    let kinetic = expect_raw(&p_squared(&grid, units)?, psi)? / units.mass;
    let (rg, ig) = gradient_channels(u, psi)?;
    let (real_grad, imag_grad) = (rg, ig);
    Ok(VirialReport {
        lhs_rate,
        kinetic,
        real_grad,
        imag_grad,
        w_channel: None,
        residual: lhs_rate - kinetic + real_grad - imag_grad,
        stationarity: stat,
        decaying: decays_at_edges(psi),
    })
}
