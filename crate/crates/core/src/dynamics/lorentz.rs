use crate::error::{HqmError, Result};
use crate::gauge::{magnetic_field, GaugePotential, ScalarPotential, Units};
use crate::lattice::{curl, gradient, QField};
use crate::operators::{
    bar_i, commutator, expect_raw, generalized_momentum, hamiltonian, momentum, multiply_left, op_cross, LinearOp,
};
use crate::quaternion::{qcross, Quaternion};

use super::evolve::{centered_rate, Equation, ObservationSeries};

pub type Vec3 = [f64; 3];

/// Force balance for ⟨Π⟩ and ⟨(Π|i)⟩ at the interior snapshots.
#[derive(Debug, Clone)]
pub struct LorentzReport {
    pub times: Vec<f64>,
    /// `d/dt⟨Π⟩`.
    pub pi_rate: Vec<Vec3>,
    /// `d/dt⟨(Π|i)⟩`.
    pub pi_bar_rate: Vec<Vec3>,
    /// `d/dt⟨Π + (Π|i)⟩`.
    pub force: Vec<Vec3>,
    /// `(ħ/2m)⟨(𝓑|i)×p − p×(𝓑|i)⟩`.
    pub magnetic: Vec<Vec3>,
    /// `(ħ²/2m)⟨𝓐×𝓑 − 𝓑×𝓐⟩`.
    pub gauge_cross: Vec<Vec3>,
    /// `ħ⟨(∂𝓐/∂t|i)⟩`.
    pub da_dt: Vec<Vec3>,
    /// `−½⟨∇(U+U*)⟩`.
    pub real_grad: Vec<Vec3>,
    /// `½⟨(∇(U−U*)|i)⟩`.
    pub imag_grad: Vec<Vec3>,
    /// `⟨[U, (𝓐|i)]⟩`.
    pub u_a_bar_commutator: Vec<Vec3>,
    /// `(1/ħ)⟨[ℋ, (Π|i)]⟩`, the unreduced commutator form of `d⟨Π⟩/dt`.
    pub commutator_form: Vec<Vec3>,
    /// `⟨∇×𝓑⟩`.
    pub curl_b: Vec<Vec3>,
    /// `d⟨Π⟩/dt − (gauge_cross + real_grad + da_dt)`.
    pub residual_pi: Vec<Vec3>,
    /// `d⟨(Π|i)⟩/dt − (magnetic + imag_grad + u_a_bar_commutator)`.
    pub residual_pi_bar: Vec<Vec3>,
    /// `force − Σ terms`.
    pub residual: Vec<Vec3>,
}

fn max_abs(v: &[Vec3]) -> f64 {
    v.iter().flatten().fold(0.0, |m: f64, x| m.max(x.abs()))
}

impl LorentzReport {
    pub fn max_residual(&self) -> f64 {
        max_abs(&self.residual)
    }

    pub fn max_residual_pi(&self) -> f64 {
        max_abs(&self.residual_pi)
    }

    pub fn max_residual_pi_bar(&self) -> f64 {
        max_abs(&self.residual_pi_bar)
    }
}

struct Terms {
    magnetic: [LinearOp; 3],
    gauge_cross: [LinearOp; 3],
    da_dt: Option<[LinearOp; 3]>,
    real_grad: [LinearOp; 3],
    imag_grad: [LinearOp; 3],
    u_a_bar: [LinearOp; 3],
    commutator_form: [LinearOp; 3],
    curl_b: [LinearOp; 3],
    pi: [LinearOp; 3],
}

fn build_terms(g: &GaugePotential, u: &ScalarPotential, units: Units, da_dt: Option<&GaugePotential>) -> Result<Terms> {
    let grid = *g.grid();
    let (hbar, m) = (units.hbar, units.mass);
    let b = magnetic_field(g)?.as_qvector();
    let a = g.as_qvector();
    let uq = u.as_qfield();
    let h = hamiltonian(g, u, units)?;
    let p: Vec<LinearOp> = (0..3).map(|c| momentum(&grid, c, units)).collect::<Result<_>>()?;
    let b_bar: Vec<LinearOp> = (0..3)
        .map(|c| bar_i(&multiply_left(format!("𝓑{c}"), b.component(c).clone())))
        .collect();
    let bp = op_cross(&b_bar, &p);
    let pb = op_cross(&p, &b_bar);
    let ab = a.zip_nodes(&b, |x, y| qcross(x, y) - qcross(y, x));
    let sym_u = uq.map(|q| Quaternion::real(q.x0));
    let anti_u = uq.map(|q| q.imag());
    let curl_b_field = curl(&b)?;
    let rate = da_dt.map(|d| d.as_qvector());
    let pi: Vec<LinearOp> = (0..3).map(|c| generalized_momentum(g, c, units)).collect::<Result<_>>()?;
    let u_op = multiply_left("U", uq.clone());
    Ok(Terms {
        magnetic: std::array::from_fn(|c| bp[c].sub(&pb[c]).scale(1.0 / (2.0 * m))),
        gauge_cross: std::array::from_fn(|c| {
            multiply_left("𝓐×𝓑 − 𝓑×𝓐", ab.component(c).scale(hbar * hbar / (2.0 * m)))
        }),
        da_dt: rate.map(|r| std::array::from_fn(|c| bar_i(&multiply_left("∂𝓐/∂t", r.component(c).scale(hbar))))),
        real_grad: {
            let grads: Vec<QField> = (0..3).map(|c| gradient(&sym_u, c)).collect::<Result<_>>()?;
            std::array::from_fn(|c| multiply_left("−∇U_s", grads[c].scale(-1.0)))
        },
        imag_grad: {
            let grads: Vec<QField> = (0..3).map(|c| gradient(&anti_u, c)).collect::<Result<_>>()?;
            std::array::from_fn(|c| bar_i(&multiply_left("∇U_a", grads[c].clone())))
        },
        u_a_bar: std::array::from_fn(|c| {
            commutator(&u_op, &bar_i(&multiply_left(format!("𝓐{c}"), a.component(c).clone())))
        }),
        commutator_form: std::array::from_fn(|c| commutator(&h, &bar_i(&pi[c])).scale(1.0 / hbar)),
        curl_b: std::array::from_fn(|c| multiply_left("∇×𝓑", curl_b_field.component(c).clone())),
        pi: std::array::from_fn(|c| pi[c].clone()),
    })
}

fn eval3(ops: &[LinearOp; 3], psi: &QField) -> Result<Vec3> {
    Ok([expect_raw(&ops[0], psi)?, expect_raw(&ops[1], psi)?, expect_raw(&ops[2], psi)?])
}

fn add3(a: Vec3, b: Vec3) -> Vec3 {
    std::array::from_fn(|c| a[c] + b[c])
}

fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    std::array::from_fn(|c| a[c] - b[c])
}

/// Evaluates every force term at each interior snapshot and the three
/// residual groupings. `da_dt` is the optional time derivative of 𝓐.
pub fn lorentz_report(
    series: &ObservationSeries,
    g: &GaugePotential,
    u: &ScalarPotential,
    units: Units,
    da_dt: Option<&GaugePotential>,
) -> Result<LorentzReport> {
    if series.equation != Equation::Right {
        return Err(HqmError::config("equation", "the Lorentz balance is defined for the right equation"));
    }
    g.grid().require_3d("Lorentz force")?;
    series.require_snapshots(3, "Lorentz force")?;
    g.grid().check_same(series.snapshots[0].grid())?;
    let t = build_terms(g, u, units, da_dt)?;
    let dt = series.interval();
    let mut pi_vals = [Vec::new(), Vec::new(), Vec::new()];
    let mut bar_vals = [Vec::new(), Vec::new(), Vec::new()];
    for psi in &series.snapshots {
        for c in 0..3 {
            pi_vals[c].push(expect_raw(&t.pi[c], psi)?);
            bar_vals[c].push(expect_raw(&bar_i(&t.pi[c]), psi)?);
        }
    }
    let pi_r: Vec<Vec<f64>> = pi_vals.iter().map(|v| centered_rate(v, dt)).collect();
    let bar_r: Vec<Vec<f64>> = bar_vals.iter().map(|v| centered_rate(v, dt)).collect();
    let n = pi_r[0].len();
    let mut rep = LorentzReport {
        times: series.times[1..=n].to_vec(),
        pi_rate: Vec::new(),
        pi_bar_rate: Vec::new(),
        force: Vec::new(),
        magnetic: Vec::new(),
        gauge_cross: Vec::new(),
        da_dt: Vec::new(),
        real_grad: Vec::new(),
        imag_grad: Vec::new(),
        u_a_bar_commutator: Vec::new(),
        commutator_form: Vec::new(),
        curl_b: Vec::new(),
        residual_pi: Vec::new(),
        residual_pi_bar: Vec::new(),
        residual: Vec::new(),
    };
    for k in 0..n {
        let psi = &series.snapshots[k + 1];
        let pr: Vec3 = std::array::from_fn(|c| pi_r[c][k]);
        let br: Vec3 = std::array::from_fn(|c| bar_r[c][k]);
        let magnetic = eval3(&t.magnetic, psi)?;
        let gauge_cross = eval3(&t.gauge_cross, psi)?;
        let da = match &t.da_dt {
            Some(ops) => eval3(ops, psi)?,
            None => [0.0; 3],
        };
        let real_grad = eval3(&t.real_grad, psi)?;
        let imag_grad = eval3(&t.imag_grad, psi)?;
        let uab = eval3(&t.u_a_bar, psi)?;
        let pi_side = add3(add3(gauge_cross, real_grad), da);
        let bar_side = add3(add3(magnetic, imag_grad), uab);
        let force = add3(pr, br);
        rep.residual_pi.push(sub3(pr, pi_side));
        rep.residual_pi_bar.push(sub3(br, bar_side));
        rep.residual.push(sub3(force, add3(pi_side, bar_side)));
        rep.pi_rate.push(pr);
        rep.pi_bar_rate.push(br);
        rep.force.push(force);
        rep.magnetic.push(magnetic);
        rep.gauge_cross.push(gauge_cross);
        rep.da_dt.push(da);
        rep.real_grad.push(real_grad);
        rep.imag_grad.push(imag_grad);
        rep.u_a_bar_commutator.push(uab);
        rep.commutator_form.push(eval3(&t.commutator_form, psi)?);
        rep.curl_b.push(eval3(&t.curl_b, psi)?);
    }
    Ok(rep)
}
