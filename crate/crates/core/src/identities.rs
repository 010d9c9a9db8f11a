//! Nodewise operator identities evaluated on band-limited random fields at
//! two resolutions, with a convergence verdict for each.

use num_complex::Complex64;

use crate::convergence::{verdict, Verdict};
use crate::error::Result;
use crate::gauge::{
    magnetic_field_with, sample_potentials, GaugeFamily, GaugePotential, MagneticOptions, PotentialSpec,
    ScalarFamily, ScalarPotential, Units,
};
use crate::lattice::{gradient, random_smooth_field, Boundary, Grid, QField};
use crate::left::{left_bracket, LeftBracket};
use crate::operators::{
    bar_i, commutator, generalized_momentum, hamiltonian, momentum, multiply_left, op_cross, p_squared, position,
    r_dot_p, LinearOp,
};
use crate::quaternion::levi_civita;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCase {
    pub name: String,
    /// Potential setting the identity was evaluated in.
    pub setting: String,
    pub coarse: f64,
    pub fine: f64,
    /// Largest magnitude of the compared terms on the coarse grid.
    pub scale: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryOptions {
    /// 1 runs the one-dimensional identities only and reports the gauge
    /// identities as skipped; 3 runs everything.
    pub dims: usize,
    pub n1d: usize,
    pub n3d: usize,
    pub length: f64,
    pub seed: u64,
    pub units: Units,
    pub flip_kappa: bool,
    /// Restricts the run to the named identities; empty runs all.
    pub only: Vec<String>,
}

impl BatteryOptions {
    fn selected(&self, name: &str) -> bool {
        self.only.is_empty() || self.only.iter().any(|n| n == name)
    }
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self {
            dims: 3,
            n1d: 256,
            n3d: 32,
            length: 8.0,
            seed: 20240611,
            units: Units::default(),
            flip_kappa: false,
            only: Vec::new(),
        }
    }
}

const MAX_MODE: i32 = 2;
/// Physical width excluded at the edges, where non-periodic potentials wrap.
const MARGIN: f64 = 1.0;
const FLOOR: f64 = 1e-10;

type Pairs = Vec<(QField, QField)>;

struct Setting {
    name: &'static str,
    spec: PotentialSpec,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quaternionic_u() -> Vec<ScalarFamily> {
    vec![
        ScalarFamily::Harmonic { omega: 0.5 },
        ScalarFamily::Absorber { gamma: 0.3 },
        ScalarFamily::ComplexW { w0: c(0.2, 0.1) },
    ]
}

fn gauge_settings() -> Vec<Setting> {
    let beta = [c(0.3, 0.2), c(-0.1, 0.4), c(0.25, 0.0)];
    let families = [
        ("uniform-b", vec![GaugeFamily::UniformB { b0: 0.8 }]),
        ("const-beta", vec![GaugeFamily::ConstBeta { beta }]),
        ("monopole-demo", vec![GaugeFamily::MonopoleDemo { scale: 0.5 }]),
        (
            "combined",
            vec![
                GaugeFamily::UniformB { b0: 0.8 },
                GaugeFamily::ConstBeta { beta },
                GaugeFamily::MonopoleDemo { scale: 0.5 },
            ],
        ),
    ];
    families
        .into_iter()
        .map(|(name, gauge)| Setting {
            name,
            spec: PotentialSpec {
                scalar: quaternionic_u(),
                gauge,
            },
        })
        .collect()
}

struct Ctx<'a> {
    grid: Grid,
    a: &'a GaugePotential,
    u: &'a ScalarPotential,
    psi: &'a QField,
    units: Units,
    flip_kappa: bool,
}

type IdentityFn = fn(&Ctx) -> Result<Pairs>;
type BoxedIdentity = Box<dyn Fn(&Ctx) -> Result<Pairs>>;

fn apply_pair(l: &LinearOp, r: &LinearOp, psi: &QField) -> (QField, QField) {
    (l.apply(psi), r.apply(psi))
}

/// `[p_a, r_b]Ψ = −ħ δ_ab Ψ i`.
fn v3(cx: &Ctx) -> Result<Pairs> {
    let d = cx.grid.dims();
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let l = commutator(&momentum(&cx.grid, a, cx.units)?, &position(b));
            let delta = if a == b { -cx.units.hbar } else { 0.0 };
            let r = bar_i(&crate::operators::identity()).scale(delta);
            out.push(apply_pair(&l, &r, cx.psi));
        }
    }
    Ok(out)
}

/// `[p², r_b] = −2ħ(p_b|i)`.
fn v4(cx: &Ctx) -> Result<Pairs> {
    let p2 = p_squared(&cx.grid, cx.units)?;
    (0..cx.grid.dims())
        .map(|b| {
            let l = commutator(&p2, &position(b));
            let r = bar_i(&momentum(&cx.grid, b, cx.units)?).scale(-2.0 * cx.units.hbar);
            Ok(apply_pair(&l, &r, cx.psi))
        })
        .collect()
}

/// `[ℋ, (r·p|i)] = (ħ/m)p² − ħ r·∇U` for 𝓐 = 0.
fn v4_virial(cx: &Ctx) -> Result<Pairs> {
    let zero = GaugePotential::zero(cx.grid);
    let h = hamiltonian(&zero, cx.u, cx.units)?;
    let l = commutator(&h, &bar_i(&r_dot_p(&cx.grid, cx.units)?));
    let uq = cx.u.as_qfield();
    let mut r_grad_u = QField::zeros(cx.grid);
    for a in 0..cx.grid.dims() {
        r_grad_u = r_grad_u.add(&gradient(&uq, a)?.times_coord(a));
    }
    let r = p_squared(&cx.grid, cx.units)?
        .scale(cx.units.hbar / cx.units.mass)
        .sub(&multiply_left("r·∇U", r_grad_u).scale(cx.units.hbar));
    Ok(vec![apply_pair(&l, &r, cx.psi)])
}

fn pis(cx: &Ctx) -> Result<Vec<LinearOp>> {
    (0..3).map(|a| generalized_momentum(cx.a, a, cx.units)).collect()
}

fn b_field(cx: &Ctx) -> Result<crate::lattice::QVectorField> {
    Ok(magnetic_field_with(
        cx.a,
        MagneticOptions {
            flip_kappa: cx.flip_kappa,
        },
    )?
    .as_qvector())
}

/// `[Π_a, (Π_b|i)] = ħ²(∂_[a𝓐_b] − 𝓐_[a𝓐_b] | i)`.
fn l5(cx: &Ctx) -> Result<Pairs> {
    let pi = pis(cx)?;
    let av = cx.a.as_qvector();
    let h2 = cx.units.hbar * cx.units.hbar;
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            let (aa, ab) = (av.component(a), av.component(b));
            let curl_ab = gradient(ab, a)?.sub(&gradient(aa, b)?);
            let prod = ab.left_mul_field(aa).sub(&aa.left_mul_field(ab));
            let l = commutator(&pi[a], &bar_i(&pi[b]));
            let r = bar_i(&multiply_left("∂_[a𝓐_b] − 𝓐_[a𝓐_b]", curl_ab.sub(&prod).scale(h2)));
            out.push(apply_pair(&l, &r, cx.psi));
        }
    }
    Ok(out)
}

/// `[Π_a, (Π_b|i)] = ħ² ε_abc (𝓑_c|i)`.
fn l8(cx: &Ctx) -> Result<Pairs> {
    let pi = pis(cx)?;
    let bv = b_field(cx)?;
    let h2 = cx.units.hbar * cx.units.hbar;
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            let mut f = QField::zeros(cx.grid);
            for cc in 0..3 {
                let e = levi_civita(a, b, cc);
                if e != 0.0 {
                    f = f.axpy(e * h2, bv.component(cc));
                }
            }
            let l = commutator(&pi[a], &bar_i(&pi[b]));
            let r = bar_i(&multiply_left("ε𝓑", f));
            out.push(apply_pair(&l, &r, cx.psi));
        }
    }
    Ok(out)
}

/// `[Π², (Π|i)] = ħ²[(𝓑|i)×Π − Π×(𝓑|i)]`.
fn l10(cx: &Ctx) -> Result<Pairs> {
    let pi = pis(cx)?;
    let bv = b_field(cx)?;
    let h2 = cx.units.hbar * cx.units.hbar;
    let pi2 = pi[0].compose(&pi[0]).add(&pi[1].compose(&pi[1])).add(&pi[2].compose(&pi[2]));
    let b_bar: Vec<LinearOp> = (0..3)
        .map(|k| bar_i(&multiply_left("𝓑", bv.component(k).clone())))
        .collect();
    let bp = op_cross(&b_bar, &pi);
    let pb = op_cross(&pi, &b_bar);
    Ok((0..3)
        .map(|k| {
            let l = commutator(&pi2, &bar_i(&pi[k]));
            let r = bp[k].sub(&pb[k]).scale(h2);
            apply_pair(&l, &r, cx.psi)
        })
        .collect())
}

/// `[U, (Π_a|i)] = ħ[𝓐_a, U] − ħ∂_aU`.
fn l12(cx: &Ctx) -> Result<Pairs> {
    let pi = pis(cx)?;
    let av = cx.a.as_qvector();
    let uq = cx.u.as_qfield();
    let u_op = multiply_left("U", uq.clone());
    let hbar = cx.units.hbar;
    (0..3)
        .map(|a| {
            let aa = av.component(a);
            let comm = uq.left_mul_field(aa).sub(&aa.left_mul_field(&uq));
            let f = comm.sub(&gradient(&uq, a)?).scale(hbar);
            let l = commutator(&u_op, &bar_i(&pi[a]));
            Ok(apply_pair(&l, &multiply_left("ħ[𝓐,U] − ħ∂U", f), cx.psi))
        })
        .collect()
}

/// `[U, Π_a] = ħ[U, (𝓐_a|i)] + ħ(∂_aU|i)`.
fn l16(cx: &Ctx) -> Result<Pairs> {
    let pi = pis(cx)?;
    let av = cx.a.as_qvector();
    let uq = cx.u.as_qfield();
    let u_op = multiply_left("U", uq.clone());
    let hbar = cx.units.hbar;
    (0..3)
        .map(|a| {
            let a_bar = bar_i(&multiply_left("𝓐", av.component(a).clone()));
            let du = bar_i(&multiply_left("∂U", gradient(&uq, a)?));
            let r = commutator(&u_op, &a_bar).add(&du).scale(hbar);
            Ok(apply_pair(&commutator(&u_op, &pi[a]), &r, cx.psi))
        })
        .collect()
}

fn left_brackets(which: LeftBracket) -> impl Fn(&Ctx) -> Result<Pairs> {
    move |cx: &Ctx| {
        let mut out = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let (l, r) = left_bracket(cx.a, cx.units, which, a, b)?;
                out.push(apply_pair(&l, &r, cx.psi));
            }
        }
        Ok(out)
    }
}

fn measure(pairs: &Pairs, mask: &[bool]) -> (f64, f64) {
    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (l, r) in pairs {
        res = res.max(l.sub(r).max_abs_masked(mask));
        scale = scale.max(l.max_abs_masked(mask)).max(r.max_abs_masked(mask));
    }
    (res, scale)
}

fn two_resolutions(
    dims: usize,
    n: usize,
    opts: &BatteryOptions,
    spec: &PotentialSpec,
    f: &dyn Fn(&Ctx) -> Result<Pairs>,
) -> Result<(f64, f64, f64)> {
    let mut out = [(0.0, 0.0); 2];
    for (k, nn) in [n, 2 * n].into_iter().enumerate() {
        let grid = Grid::cubic(dims, nn, opts.length, Boundary::Periodic)?;
        let (a, u) = sample_potentials(spec, grid, opts.units)?;
        let psi = random_smooth_field(grid, MAX_MODE, opts.seed);
        let cx = Ctx {
            grid,
            a: &a,
            u: &u,
            psi: &psi,
            units: opts.units,
            flip_kappa: opts.flip_kappa,
        };
        let pairs = f(&cx)?;
        out[k] = measure(&pairs, &grid.interior_mask(MARGIN));
    }
    Ok((out[0].0, out[1].0, out[0].1))
}

fn case(name: &str, setting: &str, (coarse, fine, scale): (f64, f64, f64)) -> IdentityCase {
    IdentityCase {
        name: name.to_string(),
        setting: setting.to_string(),
        coarse,
        fine,
        scale,
        verdict: verdict(coarse, fine, FLOOR * scale.max(1.0)),
    }
}

fn skipped(name: &str, setting: &str) -> IdentityCase {
    IdentityCase {
        name: name.to_string(),
        setting: setting.to_string(),
        coarse: f64::NAN,
        fine: f64::NAN,
        scale: f64::NAN,
        verdict: Verdict::Skipped,
    }
}

/// Names of the gauge identities, in report order.
pub const GAUGE_IDENTITIES: [&str; 9] = [
    "l5", "l8", "l10", "l12", "l16", "left [Π_a, Π_b]", "left [Π_a, Π_b i]", "left [Π_a, iΠ_b]", "left [Π_a, iΠ_b i]",
];

/// Runs every identity. One-dimensional identities use `n1d → 2·n1d`
/// nodes; gauge identities use `n3d³ → (2·n3d)³`.
pub fn run_battery(opts: &BatteryOptions) -> Result<Vec<IdentityCase>> {
    let mut out = Vec::new();
    let free = PotentialSpec::default();
    let quaternionic = PotentialSpec {
        scalar: quaternionic_u(),
        gauge: vec![],
    };
    let one_d: [(&str, &str, &PotentialSpec, IdentityFn); 3] = [
        ("v3", "free", &free, v3),
        ("v4", "free", &free, v4),
        ("v4 virial commutator", "quaternionic U", &quaternionic, v4_virial),
    ];
    for (name, setting, spec, f) in one_d.into_iter().filter(|c| opts.selected(c.0)) {
        out.push(case(name, setting, two_resolutions(1, opts.n1d, opts, spec, &f)?));
    }
    let gauge_fns: Vec<BoxedIdentity> = vec![
        Box::new(l5),
        Box::new(l8),
        Box::new(l10),
        Box::new(l12),
        Box::new(l16),
        Box::new(left_brackets(LeftBracket::Plain)),
        Box::new(left_brackets(LeftBracket::RightI)),
        Box::new(left_brackets(LeftBracket::LeftI)),
        Box::new(left_brackets(LeftBracket::BothI)),
    ];
    for setting in gauge_settings() {
        for (name, f) in GAUGE_IDENTITIES.iter().zip(&gauge_fns).filter(|c| opts.selected(c.0)) {
            if opts.dims < 3 {
                out.push(skipped(name, setting.name));
            } else {
                out.push(case(name, setting.name, two_resolutions(3, opts.n3d, opts, &setting.spec, f.as_ref())?));
            }
        }
    }
    Ok(out)
}
