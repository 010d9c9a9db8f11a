//! The left-complex wave equation `iħ ∂Ψ/∂t = ℋΨ` with
//! `ℋ = (ħ²/2m) i(∇ − 𝓐)·i(∇ − 𝓐) + U`, its continuity densities,
//! expectation-value dynamics, virial balance and Π-brackets.

use std::str::FromStr;

use crate::dynamics::{
    centered_rate, decays_at_edges, gradient_channels, measured_rate, stationarity, Equation, ObservationSeries,
    Observable, VirialOptions, VirialReport,
};
use crate::error::{HqmError, Result};
use crate::gauge::{GaugePotential, ScalarPotential, Units};
use crate::lattice::{gradient, integrate, laplacian, Grid, QField, QVectorField};
use crate::operators::{
    anticommutator, bar_i, commutator, expect_raw, i_then, multiply_left, p_squared, position, then_i, zero,
    ContinuityFields, LinearOp, OpKind,
};
use crate::quaternion::Quaternion;

fn diff(f: &QField, axis: usize) -> QField {
    gradient(f, axis).expect("axis validated when the operator was built")
}

/// `(ħ²/2m)[−∇²Ψ − i∂_a(i𝓐_aΨ) − i𝓐_a i∂_aΨ + i𝓐_a i𝓐_aΨ] + UΨ`.
pub fn hamiltonian_left(g: &GaugePotential, u: &ScalarPotential, units: Units) -> Result<LinearOp> {
    let grid = *g.grid();
    grid.check_same(u.grid())?;
    for a in 0..grid.dims() {
        grid.check_differentiable(a)?;
    }
    let c = units.hbar * units.hbar / (2.0 * units.mass);
    let uq = u.as_qfield();
    let gauge = (!g.is_zero()).then(|| g.as_qvector());
    let dims = grid.dims();
    Ok(LinearOp::new("ℋ_L", OpKind::Composite, move |psi| {
        let mut k = laplacian(psi).expect("validated").scale(-1.0);
        if let Some(av) = &gauge {
            for a in 0..dims {
                let ia = av.component(a).map(|q| Quaternion::I * q);
                let ia_psi = psi.left_mul_field(&ia);
                k = k
                    .sub(&diff(&ia_psi, a).left_mul_i())
                    .sub(&diff(psi, a).left_mul_field(&ia).left_mul_i())
                    .add(&ia_psi.left_mul_field(&ia));
            }
        }
        k.scale(c).add(&psi.left_mul_field(&uq))
    }))
}

/// `Π_a Ψ = −iħ(∂_a − 𝓐_a)Ψ`.
pub fn momentum_left(g: &GaugePotential, axis: usize, units: Units) -> Result<LinearOp> {
    g.grid().check_differentiable(axis)?;
    let a = g.as_qvector().component(axis).clone();
    let hbar = units.hbar;
    Ok(LinearOp::new(format!("Π_L{axis}"), OpKind::Differential, move |psi| {
        diff(psi, axis).sub(&psi.left_mul_field(&a)).left_mul_i().scale(-hbar)
    }))
}

/// `r·p` with the left momentum `p = −iħ∇`.
pub fn r_dot_p_left(grid: &Grid, units: Units) -> Result<LinearOp> {
    let zero_a = GaugePotential::zero(*grid);
    let mut acc = zero();
    for a in 0..grid.dims() {
        acc = acc.add(&position(a).compose(&momentum_left(&zero_a, a, units)?));
    }
    Ok(acc.with_label("r·p_L"))
}

const DENSITY_RESIDUE_TOL: f64 = 1e-12;

fn real_checked(q: Quaternion, scale: f64, what: &'static str) -> Result<f64> {
    let residue = q.imag().max_abs();
    if residue > DENSITY_RESIDUE_TOL * scale.max(1.0) {
        return Err(HqmError::NonReal {
            what,
            residue,
            tolerance: DENSITY_RESIDUE_TOL,
        });
    }
    Ok(q.x0)
}

/// `ρ = Ψ*Ψ`, `g = Ψ*((V*i − iV)/ħ)Ψ`, `J = (1/2m)[Ψ*(ΠΨ) + (ΠΨ)*Ψ]`.
pub fn continuity_left(psi: &QField, g: &GaugePotential, u: &ScalarPotential, units: Units) -> Result<ContinuityFields> {
    let grid = *psi.grid();
    grid.check_same(g.grid())?;
    grid.check_same(u.grid())?;
    let mut rho = Vec::with_capacity(grid.len());
    let mut src = Vec::with_capacity(grid.len());
    for (&p, &v) in psi.values().iter().zip(u.v()) {
        let vq = Quaternion::from_complex(v);
        let factor = (vq.conj() * Quaternion::I - Quaternion::I * vq) * (1.0 / units.hbar);
        let n2 = p.norm_sqr();
        rho.push(real_checked(p.conj() * p, n2, "density ρ")?);
        src.push(real_checked(p.conj() * factor * p, n2 * factor.norm(), "source g")?);
    }
    let mut j = Vec::with_capacity(grid.dims());
    for a in 0..grid.dims() {
        let pp = momentum_left(g, a, units)?.apply(psi);
        let mut comp = Vec::with_capacity(grid.len());
        for (&x, &p) in pp.values().iter().zip(psi.values()) {
            let q = (p.conj() * x + x.conj() * p) * (0.5 / units.mass);
            comp.push(real_checked(q, x.norm() * p.norm() / units.mass, "current J")?);
        }
        j.push(comp);
    }
    Ok(ContinuityFields { grid, rho, g: src, j })
}

/// The four balance laws of the left equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeftForm {
    /// `d⟨𝒪 − i𝒪i⟩/dt = (1/ħ)⟨[ℋ, 𝒪i + i𝒪]⟩`.
    A3,
    /// `d⟨𝒪i + i𝒪⟩/dt = −(1/ħ)⟨[ℋ, 𝒪 − i𝒪i]⟩`.
    A4,
    /// `d⟨𝒪 + i𝒪i⟩/dt = −(1/ħ)⟨{ℋ, 𝒪i − i𝒪}⟩`.
    A5,
    /// `d⟨𝒪i − i𝒪⟩/dt = (1/ħ)⟨{ℋ, 𝒪 + i𝒪i}⟩`.
    A6,
}

impl LeftForm {
    pub const ALL: [LeftForm; 4] = [LeftForm::A3, LeftForm::A4, LeftForm::A5, LeftForm::A6];

    pub fn name(self) -> &'static str {
        match self {
            LeftForm::A3 => "a3",
            LeftForm::A4 => "a4",
            LeftForm::A5 => "a5",
            LeftForm::A6 => "a6",
        }
    }
}

impl FromStr for LeftForm {
    type Err = HqmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a3" => Ok(Self::A3),
            "a4" => Ok(Self::A4),
            "a5" => Ok(Self::A5),
            "a6" => Ok(Self::A6),
            _ => Err(HqmError::config("form", format!("unknown form `{s}`; expected a3, a4, a5 or a6"))),
        }
    }
}

/// `(measured combination, predicted-rate operator)`. Here `𝒪i` is
/// `𝒪∘(i·)`, `i𝒪` is `(i·)∘𝒪` and `i𝒪i` is `(i·)∘𝒪∘(i·)`.
fn left_form_ops(op: &LinearOp, h: &LinearOp, form: LeftForm, hbar: f64) -> (LinearOp, LinearOp) {
    let oi = then_i(op);
    let io = i_then(op);
    let ioi = i_then(&then_i(op));
    match form {
        LeftForm::A3 => (op.sub(&ioi), commutator(h, &oi.add(&io)).scale(1.0 / hbar)),
        LeftForm::A4 => (oi.add(&io), commutator(h, &op.sub(&ioi)).scale(-1.0 / hbar)),
        LeftForm::A5 => (op.add(&ioi), anticommutator(h, &oi.sub(&io)).scale(-1.0 / hbar)),
        LeftForm::A6 => (oi.sub(&io), anticommutator(h, &op.add(&ioi)).scale(1.0 / hbar)),
    }
}

#[derive(Debug, Clone)]
pub struct LeftExpectationResidual {
    pub form: LeftForm,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `(1/ħ)[(XΨ, ℋΨ) − (ℋXΨ, Ψ)]` with `X = i·(measured combination)`:
    /// the part the forms omit when ℋ is not symmetric.
    pub correction: Vec<f64>,
    pub residual: Vec<f64>,
}

impl LeftExpectationResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

fn dot(a: &QField, b: &QField) -> f64 {
    integrate(&a.zip_map(b, |p, q| Quaternion::real(p.dot(q)))).x0
}

/// Left-form expectation dynamics along a series produced by the left
/// evolver; `h` must be the Hamiltonian used for the evolution.
pub fn expectation_dynamics_left(
    obs: &Observable,
    series: &ObservationSeries,
    h: &LinearOp,
    units: Units,
    form: LeftForm,
) -> Result<LeftExpectationResidual> {
    if series.equation != Equation::Left {
        return Err(HqmError::config("equation", "a3–a6 apply to series of the left equation"));
    }
    if series.snapshots.len() != series.times.len() || series.snapshots.len() < 3 {
        return Err(HqmError::Precondition(
            "left expectation dynamics needs at least 3 recorded states".into(),
        ));
    }
    let hbar = units.hbar;
    let mut values = Vec::with_capacity(series.times.len());
    for (psi, &t) in series.snapshots.iter().zip(&series.times) {
        let (m, _) = left_form_ops(&obs.at(t), h, form, hbar);
        values.push(expect_raw(&m, psi)?);
    }
    let lhs = centered_rate(&values, series.interval());
    let n = lhs.len();
    let mut out = LeftExpectationResidual {
        form,
        times: series.times[1..=n].to_vec(),
        lhs,
        rhs: Vec::with_capacity(n),
        correction: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
    };
    for k in 1..=n {
        let (psi, t) = (&series.snapshots[k], series.times[k]);
        let (m, r) = left_form_ops(&obs.at(t), h, form, hbar);
        let mut rhs = expect_raw(&r, psi)?;
        if let Some(rate) = obs.rate_at(t) {
            rhs += expect_raw(&left_form_ops(&rate, h, form, hbar).0, psi)?;
        }
        let x_psi = m.apply(psi).left_mul_i();
        let corr = (dot(&x_psi, &h.apply(psi)) - dot(&h.apply(&x_psi), psi)) / hbar;
        out.rhs.push(rhs);
        out.correction.push(corr);
        out.residual.push(out.lhs[k - 1] - rhs);
    }
    Ok(out)
}

const STATIONARY_TOL: f64 = 1e-3;

/// Virial balance of the left equation for 𝓐 = 0, with the extra channel
/// `⟨2W r·p⟩`. The imaginary-gradient channel is `½⟨r·∇(iU − U*i)⟩`.
pub fn virial_left(psi: &QField, u: &ScalarPotential, units: Units, opts: VirialOptions) -> Result<VirialReport> {
    let grid = *psi.grid();
    grid.check_same(u.grid())?;
    let h = hamiltonian_left(&GaugePotential::zero(grid), u, units)?;
    let stat = stationarity(&h, psi)?;
    if opts.require_stationary && !(stat < STATIONARY_TOL) {
        return Err(HqmError::Precondition(format!(
            "left virial balance needs a stationary state; ‖ℋΨ − EΨ‖/‖Ψ‖ = {stat:e}"
        )));
    }
    let rp = r_dot_p_left(&grid, units)?;
    let lhs_rate = measured_rate(psi, &h, Equation::Left, units, opts.dt, &rp.add(&bar_i(&rp)))?;
    let kinetic = expect_raw(&p_squared(&grid, units)?, psi)? / units.mass;
    let (real_grad, _) = gradient_channels(u, psi)?;
    let uq = u.as_qfield();
    let combo = uq.map(|q| Quaternion::I * q - q.conj() * Quaternion::I);
    let mut r_grad = QField::zeros(grid);
    for a in 0..grid.dims() {
        r_grad = r_grad.add(&gradient(&combo, a)?.times_coord(a));
    }
    let imag_grad = 0.5 * expect_raw(&multiply_left("r·∇(iU − U*i)", r_grad), psi)?;
    let two_w = u.w_field().scale(2.0);
    let w_channel = expect_raw(&multiply_left("2W", two_w).compose(&rp), psi)?;
    Ok(VirialReport {
        lhs_rate,
        kinetic,
        real_grad,
        imag_grad,
        w_channel: Some(w_channel),
        residual: lhs_rate - kinetic + real_grad - imag_grad - w_channel,
        stationarity: stat,
        decaying: decays_at_edges(psi),
    })
}

/// The four left Π-brackets and their closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeftBracket {
    /// `[Π_a, Π_b]`.
    Plain,
    /// `[Π_a, Π_b i]`.
    RightI,
    /// `[Π_a, iΠ_b]`.
    LeftI,
    /// `[Π_a, iΠ_b i]`.
    BothI,
}

impl LeftBracket {
    pub const ALL: [LeftBracket; 4] = [LeftBracket::Plain, LeftBracket::RightI, LeftBracket::LeftI, LeftBracket::BothI];

    pub fn name(self) -> &'static str {
        match self {
            LeftBracket::Plain => "[Π_a, Π_b]",
            LeftBracket::RightI => "[Π_a, Π_b i]",
            LeftBracket::LeftI => "[Π_a, iΠ_b]",
            LeftBracket::BothI => "[Π_a, iΠ_b i]",
        }
    }
}

fn q_mul(x: &QField, y: &QField) -> QField {
    y.left_mul_field(x)
}

fn iq(x: &QField) -> QField {
    x.left_mul_i()
}

fn qi(x: &QField) -> QField {
    x.right_mul_i()
}

/// Multiplication by `m` after `∂_axis`.
fn times_after_partial(m: QField, axis: usize) -> LinearOp {
    LinearOp::new("m∂", OpKind::Composite, move |psi| diff(psi, axis).left_mul_field(&m))
}

/// The bracket itself and its closed form for the axis pair (a, b).
pub fn left_bracket(g: &GaugePotential, units: Units, which: LeftBracket, a: usize, b: usize) -> Result<(LinearOp, LinearOp)> {
    let pa = momentum_left(g, a, units)?;
    let pb = momentum_left(g, b, units)?;
    let av: QVectorField = g.as_qvector();
    let (aa, ab) = (av.component(a).clone(), av.component(b).clone());
    let da_b = gradient(&ab, a)?;
    let db_a = gradient(&aa, b)?;
    let h2 = units.hbar * units.hbar;
    let mul = |label: &str, f: QField| multiply_left(label.to_string(), f);
    let (lhs, rhs) = match which {
        LeftBracket::Plain => {
            let rhs = mul("∂_[aA_b]", da_b.sub(&db_a))
                .sub(&times_after_partial(aa.add(&qi(&iq(&aa))), b))
                .add(&times_after_partial(ab.add(&qi(&iq(&ab))), a))
                .add(&mul("iA_[a iA_b]", q_mul(&iq(&aa), &iq(&ab)).sub(&q_mul(&iq(&ab), &iq(&aa)))));
            (commutator(&pa, &pb), rhs)
        }
        LeftBracket::RightI => {
            let rhs = mul("∂_aA_b i", qi(&da_b))
                .sub(&mul("i∂_bA_a", iq(&db_a)))
                .add(&times_after_partial(qi(&ab).sub(&iq(&ab)), a))
                .add(&mul("iA_a iA_b i", qi(&q_mul(&iq(&aa), &iq(&ab)))))
                .add(&mul("iA_bA_a", q_mul(&iq(&ab), &aa)));
            (commutator(&pa, &then_i(&pb)), rhs)
        }
        LeftBracket::LeftI => {
            let rhs = mul("i∂_[aA_b]", iq(&da_b.sub(&db_a)))
                .sub(&times_after_partial(qi(&ab).sub(&iq(&ab)), a))
                .sub(&mul("iA_aA_b", iq(&q_mul(&aa, &ab))))
                .add(&mul("A_b iA_a", q_mul(&ab, &iq(&aa))));
            (commutator(&pa, &i_then(&pb)), rhs)
        }
        LeftBracket::BothI => {
            let rhs = mul("i∂_aA_b i", qi(&iq(&da_b)))
                .add(&mul("∂_bA_a", db_a))
                .add(&times_after_partial(aa.add(&qi(&iq(&aa))), b))
                .add(&times_after_partial(ab.add(&qi(&iq(&ab))), a))
                .sub(&mul("iA_aA_b i", qi(&iq(&q_mul(&aa, &ab)))))
                .sub(&mul("A_bA_a", q_mul(&ab, &aa)));
            (commutator(&pa, &i_then(&then_i(&pb))), rhs)
        }
    };
    Ok((lhs, rhs.scale(h2)))
}

/// Maximum nodewise residual of each bracket over all axis pairs, on the
/// nodes selected by `mask`.
pub fn commutators_left(g: &GaugePotential, units: Units, psi: &QField, mask: &[bool]) -> Result<Vec<(LeftBracket, f64)>> {
    g.grid().require_3d("left Π-brackets")?;
    let mut out = Vec::new();
    for which in LeftBracket::ALL {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let (l, r) = left_bracket(g, units, which, a, b)?;
                worst = worst.max(l.apply(psi).sub(&r.apply(psi)).max_abs_masked(mask));
            }
        }
        out.push((which, worst));
    }
    Ok(out)
}
