//! Operators as composition closures on `QField`, the symmetrized
//! expectation value and the continuity-equation densities.

use std::fmt;
use std::sync::Arc;

use crate::error::{HqmError, Result};
use crate::gauge::{GaugePotential, ScalarPotential, Units};
use crate::lattice::{gradient, integrate, laplacian, Grid, QField};
use crate::quaternion::{levi_civita, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Multiplicative,
    Differential,
    Composite,
}

type ApplyFn = dyn Fn(&QField) -> QField + Send + Sync;

/// A real-linear map `QField → QField`.
#[derive(Clone)]
pub struct LinearOp {
    apply: Arc<ApplyFn>,
    label: String,
    kind: OpKind,
}

impl fmt::Debug for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOp")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .finish()
    }
}

impl LinearOp {
    pub fn new(label: impl Into<String>, kind: OpKind, f: impl Fn(&QField) -> QField + Send + Sync + 'static) -> Self {
        Self {
            apply: Arc::new(f),
            label: label.into(),
            kind,
        }
    }

    /// Applies the operator. Differential operators were validated against
    /// their grid at construction; applying one to a field on a different
    /// grid panics.
    pub fn apply(&self, psi: &QField) -> QField {
        (self.apply)(psi)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOp) -> LinearOp {
        let (a, b) = (self.clone(), other.clone());
        LinearOp::new(format!("{}∘{}", self.label, other.label), OpKind::Composite, move |psi| {
            a.apply(&b.apply(psi))
        })
    }

    pub fn add(&self, other: &LinearOp) -> LinearOp {
        let (a, b) = (self.clone(), other.clone());
        LinearOp::new(format!("({} + {})", self.label, other.label), combine(self.kind, other.kind), move |psi| {
            a.apply(psi).add(&b.apply(psi))
        })
    }

    pub fn sub(&self, other: &LinearOp) -> LinearOp {
        let (a, b) = (self.clone(), other.clone());
        LinearOp::new(format!("({} − {})", self.label, other.label), combine(self.kind, other.kind), move |psi| {
            a.apply(psi).sub(&b.apply(psi))
        })
    }

    pub fn scale(&self, s: f64) -> LinearOp {
        let a = self.clone();
        LinearOp::new(format!("{s}·{}", self.label), self.kind, move |psi| a.apply(psi).scale(s))
    }
}

fn combine(a: OpKind, b: OpKind) -> OpKind {
    if a == b {
        a
    } else {
        OpKind::Composite
    }
}

fn diff(f: &QField, axis: usize) -> QField {
    gradient(f, axis).expect("axis validated when the operator was built")
}

pub fn identity() -> LinearOp {
    LinearOp::new("1", OpKind::Multiplicative, |psi| psi.clone())
}

pub fn zero() -> LinearOp {
    LinearOp::new("0", OpKind::Multiplicative, |psi| QField::zeros(*psi.grid()))
}

/// `x_a Ψ`.
pub fn position(axis: usize) -> LinearOp {
    LinearOp::new(["x", "y", "z"][axis.min(2)], OpKind::Multiplicative, move |psi| psi.times_coord(axis))
}

/// `fΨ` with `f` on the left.
pub fn multiply_left(label: impl Into<String>, f: QField) -> LinearOp {
    LinearOp::new(label, OpKind::Multiplicative, move |psi| psi.left_mul_field(&f))
}

/// `Ψ ↦ iΨ`.
pub fn left_i() -> LinearOp {
    LinearOp::new("i·", OpKind::Multiplicative, |psi| psi.left_mul_i())
}

/// Central difference `∂_a`.
pub fn partial(grid: &Grid, axis: usize) -> Result<LinearOp> {
    grid.check_differentiable(axis)?;
    Ok(LinearOp::new(format!("∂{axis}"), OpKind::Differential, move |psi| diff(psi, axis)))
}

/// `p_a Ψ = −ħ (∂_a Ψ) i`.
pub fn momentum(grid: &Grid, axis: usize, units: Units) -> Result<LinearOp> {
    grid.check_differentiable(axis)?;
    let hbar = units.hbar;
    Ok(LinearOp::new(format!("p{axis}"), OpKind::Differential, move |psi| {
        diff(psi, axis).right_mul_i().scale(-hbar)
    }))
}

/// `Π_a Ψ = −ħ (∂_a Ψ − 𝓐_a Ψ) i`.
pub fn generalized_momentum(g: &GaugePotential, axis: usize, units: Units) -> Result<LinearOp> {
    g.grid().check_differentiable(axis)?;
    let a = g.as_qvector().component(axis).clone();
    let hbar = units.hbar;
    Ok(LinearOp::new(format!("Π{axis}"), OpKind::Differential, move |psi| {
        diff(psi, axis).sub(&psi.left_mul_field(&a)).right_mul_i().scale(-hbar)
    }))
}

/// The three components of Π, or of p when 𝓐 = 0, over the active axes.
pub fn momentum_vector(g: &GaugePotential, units: Units) -> Result<Vec<LinearOp>> {
    (0..g.grid().dims())
        .map(|a| generalized_momentum(g, a, units))
        .collect()
}

/// `p² Ψ = −ħ² ∇² Ψ` with the three-point Laplacian.
pub fn p_squared(grid: &Grid, units: Units) -> Result<LinearOp> {
    for a in 0..grid.dims() {
        grid.check_differentiable(a)?;
    }
    let h2 = units.hbar * units.hbar;
    Ok(LinearOp::new("p²", OpKind::Differential, move |psi| {
        laplacian(psi).expect("validated").scale(-h2)
    }))
}

/// `r·p = Σ_a x_a p_a`.
pub fn r_dot_p(grid: &Grid, units: Units) -> Result<LinearOp> {
    let mut acc = zero();
    for a in 0..grid.dims() {
        acc = acc.add(&position(a).compose(&momentum(grid, a, units)?));
    }
    Ok(acc.with_label("r·p"))
}

/// `ℋΨ = −(ħ²/2m)(∇ − 𝓐)²Ψ + UΨ`, expanded as
/// `∇²Ψ − Σ_a [∂_a(𝓐_aΨ) + 𝓐_a ∂_aΨ] + Σ_a 𝓐_a𝓐_aΨ`.
pub fn hamiltonian(g: &GaugePotential, u: &ScalarPotential, units: Units) -> Result<LinearOp> {
    let grid = *g.grid();
    grid.check_same(u.grid())?;
    for a in 0..grid.dims() {
        grid.check_differentiable(a)?;
    }
    let c = -units.hbar * units.hbar / (2.0 * units.mass);
    let uq = u.as_qfield();
    let gauge = (!g.is_zero()).then(|| g.as_qvector());
    let dims = grid.dims();
    Ok(LinearOp::new("ℋ", OpKind::Composite, move |psi| {
        let mut k = laplacian(psi).expect("validated");
        if let Some(av) = &gauge {
            for a in 0..dims {
                let aa = av.component(a);
                let a_psi = psi.left_mul_field(aa);
                k = k
                    .sub(&diff(&a_psi, a))
                    .sub(&diff(psi, a).left_mul_field(aa))
                    .add(&a_psi.left_mul_field(aa));
            }
        }
        k.scale(c).add(&psi.left_mul_field(&uq))
    }))
}

/// `(𝒪|i)Ψ = (𝒪Ψ)i`.
pub fn bar_i(op: &LinearOp) -> LinearOp {
    let a = op.clone();
    LinearOp::new(format!("({}|i)", op.label), op.kind, move |psi| a.apply(psi).right_mul_i())
}

/// `i(𝒪Ψ)`.
pub fn i_then(op: &LinearOp) -> LinearOp {
    left_i().compose(op)
}

/// `𝒪(iΨ)`.
pub fn then_i(op: &LinearOp) -> LinearOp {
    op.compose(&left_i())
}

pub fn commutator(a: &LinearOp, b: &LinearOp) -> LinearOp {
    a.compose(b).sub(&b.compose(a)).with_label(format!("[{}, {}]", a.label, b.label))
}

pub fn anticommutator(a: &LinearOp, b: &LinearOp) -> LinearOp {
    a.compose(b).add(&b.compose(a)).with_label(format!("{{{}, {}}}", a.label, b.label))
}

/// Ordered operator cross product `(X×Y)_c = ε_cab X_a ∘ Y_b`.
pub fn op_cross(x: &[LinearOp], y: &[LinearOp]) -> [LinearOp; 3] {
    std::array::from_fn(|c| {
        let mut acc = zero();
        for a in 0..3 {
            for b in 0..3 {
                let e = levi_civita(c, a, b);
                if e != 0.0 {
                    acc = acc.add(&x[a].compose(&y[b]).scale(e));
                }
            }
        }
        acc.with_label(format!("(×){c}"))
    })
}

const NORM_TOL: f64 = 1e-6;
const EXPECT_RESIDUE_TOL: f64 = 1e-10;
const DENSITY_RESIDUE_TOL: f64 = 1e-12;

pub fn norm(psi: &QField) -> f64 {
    integrate(&psi.map(|q| Quaternion::real(q.norm_sqr()))).x0
}

/// `½∫[(𝒪Ψ)Ψ* + Ψ(𝒪Ψ)*]` without a normalization check.
pub fn expect_raw(op: &LinearOp, psi: &QField) -> Result<f64> {
    let o = op.apply(psi);
    let integrand = o.zip_map(psi, |a, p| (a * p.conj() + p * a.conj()) * 0.5);
    let total = integrate(&integrand);
    let scale = integrate(&o.zip_map(psi, |a, p| Quaternion::real(a.norm() * p.norm()))).x0;
    let residue = total.imag().max_abs();
    if residue > EXPECT_RESIDUE_TOL * scale.max(1.0) {
        return Err(HqmError::NonReal {
            what: "expectation value",
            residue,
            tolerance: EXPECT_RESIDUE_TOL,
        });
    }
    Ok(total.x0)
}

/// Expectation value; Ψ must be normalized to 1e−6.
pub fn expect(op: &LinearOp, psi: &QField) -> Result<f64> {
    let n = norm(psi);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(HqmError::Precondition(format!(
            "expectation of {} needs a normalized state, ∫ρ = {n}",
            op.label
        )));
    }
    expect_raw(op, psi)
}

/// `⟨𝒪⟩ + ⟨(𝒪|i)⟩`.
pub fn expect_physical(op: &LinearOp, psi: &QField) -> Result<f64> {
    Ok(expect(op, psi)? + expect(&bar_i(op), psi)?)
}

/// Raw-mode variant of [`expect_physical`].
pub fn expect_physical_raw(op: &LinearOp, psi: &QField) -> Result<f64> {
    Ok(expect_raw(op, psi)? + expect_raw(&bar_i(op), psi)?)
}

/// Real densities of the continuity equation `∂ρ/∂t + ∇·J = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityFields {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    /// One entry per active axis.
    pub j: Vec<Vec<f64>>,
}

fn real_part_checked(q: Quaternion, scale: f64, what: &'static str) -> Result<f64> {
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

/// `ρ = ΨΨ*`, `g = (1/ħ)(ΨiΨ*U* − UΨiΨ*)`, `J = (1/2m)[(ΠΨ)Ψ* + Ψ(ΠΨ)*]`.
pub fn continuity_fields(psi: &QField, g: &GaugePotential, u: &ScalarPotential, units: Units) -> Result<ContinuityFields> {
    let grid = *psi.grid();
    grid.check_same(g.grid())?;
    grid.check_same(u.grid())?;
    let uq = u.as_qfield();
    let mut rho = Vec::with_capacity(grid.len());
    let mut src = Vec::with_capacity(grid.len());
    for (idx, (&p, &uu)) in psi.values().iter().zip(uq.values()).enumerate() {
        let _ = idx;
        let n2 = p.norm_sqr();
        rho.push(real_part_checked(p * p.conj(), n2, "density ρ")?);
        let pip = p * Quaternion::I * p.conj();
        let q = (pip * uu.conj() - uu * pip) * (1.0 / units.hbar);
        src.push(real_part_checked(q, n2 * uu.norm() / units.hbar, "source g")?);
    }
    let mut j = Vec::with_capacity(grid.dims());
    for op in momentum_vector(g, units)? {
        let pp = op.apply(psi);
        let mut comp = Vec::with_capacity(grid.len());
        for (&a, &p) in pp.values().iter().zip(psi.values()) {
            let q = (a * p.conj() + p * a.conj()) * (0.5 / units.mass);
            comp.push(real_part_checked(q, a.norm() * p.norm() / units.mass, "current J")?);
        }
        j.push(comp);
    }
    Ok(ContinuityFields { grid, rho, g: src, j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{sample_potentials, GaugeFamily, PotentialSpec, ScalarFamily};
    use crate::lattice::{random_smooth_field, Boundary};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::cubic(1, n, l, Boundary::Periodic).unwrap()
    }

    fn normalized(psi: QField) -> QField {
        let n = norm(&psi).sqrt();
        psi.scale(1.0 / n)
    }

    fn plane_wave(g: Grid, m: i32, q: Quaternion) -> QField {
        let k = 2.0 * PI * m as f64 / g.length()[0];
        normalized(QField::from_fn(g, |x| {
            Quaternion::from_complex(Complex64::from_polar(1.0, k * x[0])) * q
        }))
    }

    fn gaussian(g: Grid, q: Quaternion) -> QField {
        normalized(QField::from_fn(g, |x| q * (-0.5 * x[0] * x[0]).exp()))
    }

    #[test]
    fn momentum_of_plane_waves() {
        let g = grid1(128, 10.0);
        let u = Units::default();
        let p = momentum(&g, 0, u).unwrap();
        let k = 2.0 * PI * 3.0 / 10.0;
        let keff = (k * g.spacing(0)).sin() / g.spacing(0);
        let psi = plane_wave(g, 3, Quaternion::ONE);
        let diff = p.apply(&psi).sub(&psi.scale(keff));
        assert!(diff.max_abs() < 1e-12);
        assert!((expect(&p, &psi).unwrap() - keff).abs() < 1e-12);
        let psi_j = plane_wave(g, 3, Quaternion::J);
        assert!((expect(&p, &psi_j).unwrap() + keff).abs() < 1e-12);
        assert!(expect(&p, &gaussian(g, Quaternion::ONE)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn plain_momentum_equals_pi_without_gauge() {
        let g = Grid::cubic(3, 8, 4.0, Boundary::Periodic).unwrap();
        let psi = random_smooth_field(g, 1, 3);
        let zero = GaugePotential::zero(g);
        for a in 0..3 {
            let d = momentum(&g, a, Units::default())
                .unwrap()
                .apply(&psi)
                .sub(&generalized_momentum(&zero, a, Units::default()).unwrap().apply(&psi));
            assert_eq!(d.max_abs(), 0.0);
        }
    }

    #[test]
    fn generalized_momentum_on_constant_field() {
        let g = Grid::cubic(3, 6, 3.0, Boundary::Periodic).unwrap();
        let beta = [Complex64::new(0.3, -0.2), Complex64::new(0.0, 0.5), Complex64::new(1.0, 0.0)];
        let a = GaugePotential::from_fn(g, |_| ([0.7, -0.1, 0.4], beta));
        let hbar = 1.7;
        let units = Units { hbar, mass: 1.0 };
        let one = QField::constant(g, Quaternion::ONE);
        for axis in 0..3 {
            let pi = generalized_momentum(&a, axis, units).unwrap().apply(&one);
            let expect = a.node(0).0[axis] * Quaternion::I * hbar;
            for &q in pi.values() {
                assert!((q - expect).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let g = grid1(128, 10.0);
        let units = Units::default();
        let zero_a = GaugePotential::zero(g);
        let h = hamiltonian(&zero_a, &ScalarPotential::zero(g), units).unwrap();
        let k = 2.0 * PI * 2.0 / 10.0;
        let hh = g.spacing(0);
        let symbol = (2.0 * (0.5 * k * hh).sin() / hh).powi(2);
        let psi = plane_wave(g, 2, Quaternion::new(0.5, 0.5, 0.5, 0.5));
        assert!(h.apply(&psi).sub(&psi.scale(0.5 * symbol)).max_abs() < 1e-12);

        let (_, u) = sample_potentials(
            &PotentialSpec {
                scalar: vec![ScalarFamily::Harmonic { omega: 1.0 }],
                gauge: vec![],
            },
            g,
            units,
        )
        .unwrap();
        let h = hamiltonian(&zero_a, &u, units).unwrap();
        let c = QField::constant(g, Quaternion::new(0.1, 0.2, -0.3, 0.4));
        assert!(h.apply(&c).sub(&c.left_mul_field(&u.as_qfield())).max_abs() < 1e-12);

        // The three-point stencil leaves a relative residual of about
        // 0.107 h² on the Gaussian; at n = 256 the best extent gives 1.8e-4.
        for (n, l, tol) in [(256, 10.0, 2e-4), (512, 12.0, 1e-4)] {
            let g = grid1(n, l);
            let (_, u) = sample_potentials(
                &PotentialSpec {
                    scalar: vec![ScalarFamily::Harmonic { omega: 1.0 }],
                    gauge: vec![],
                },
                g,
                units,
            )
            .unwrap();
            let h = hamiltonian(&GaugePotential::zero(g), &u, units).unwrap();
            for q in [Quaternion::ONE, Quaternion::J, Quaternion::new(0.5, 0.5, 0.5, 0.5)] {
                let phi = gaussian(g, q);
                let r = h.apply(&phi).sub(&phi.scale(0.5)).l2_norm() / phi.l2_norm();
                assert!(r < tol, "n = {n}: residual {r}");
            }
        }
    }

    #[test]
    fn hamiltonian_is_symmetric_with_gauge_and_real_u() {
        let g = Grid::cubic(3, 8, 4.0, Boundary::Periodic).unwrap();
        let (a, u) = sample_potentials(
            &PotentialSpec {
                scalar: vec![ScalarFamily::Harmonic { omega: 0.5 }],
                gauge: vec![
                    GaugeFamily::MonopoleDemo { scale: 0.4 },
                    GaugeFamily::ConstBeta {
                        beta: [Complex64::new(0.2, 0.1), Complex64::new(0.0, 0.0), Complex64::new(-0.3, 0.2)],
                    },
                ],
            },
            g,
            Units::default(),
        )
        .unwrap();
        let h = hamiltonian(&a, &u, Units::default()).unwrap();
        let f1 = random_smooth_field(g, 1, 11);
        let f2 = random_smooth_field(g, 1, 12);
        let dot = |x: &QField, y: &QField| integrate(&x.zip_map(y, |p, q| Quaternion::real(p.dot(q)))).x0;
        let lhs = dot(&h.apply(&f1), &f2);
        let rhs = dot(&f1, &h.apply(&f2));
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn bar_i_examples() {
        let g = grid1(16, 2.0);
        let one = QField::constant(g, Quaternion::ONE);
        assert!(bar_i(&identity()).apply(&one).values().iter().all(|&q| q == Quaternion::I));
        let psi = random_smooth_field(g, 2, 5);
        let p = momentum(&g, 0, Units::default()).unwrap();
        assert_eq!(bar_i(&bar_i(&p)).apply(&psi).add(&p.apply(&psi)).max_abs(), 0.0);
    }

    #[test]
    fn bar_expectations_vanish() {
        let g = grid1(64, 6.0);
        let psi = normalized(random_smooth_field(g, 3, 9));
        let units = Units::default();
        let x = position(0);
        let p = momentum(&g, 0, units).unwrap();
        assert!(expect(&bar_i(&x), &psi).unwrap().abs() < 1e-14);
        assert!(expect(&bar_i(&p), &psi).unwrap().abs() < 1e-13);
        assert!((expect_physical(&x, &psi).unwrap() - expect(&x, &psi).unwrap()).abs() < 1e-14);
        assert!((expect_physical(&p, &psi).unwrap() - expect(&p, &psi).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn expect_requires_normalization() {
        let g = grid1(32, 4.0);
        let psi = QField::constant(g, Quaternion::ONE);
        assert!(matches!(expect(&identity(), &psi), Err(HqmError::Precondition(_))));
        assert!((expect_raw(&identity(), &psi).unwrap() - 4.0).abs() < 1e-12);
        assert!((expect(&identity(), &normalized(psi)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kinetic_expectation_of_ground_state_is_q0_independent() {
        let g = grid1(256, 10.0);
        let p2 = p_squared(&g, Units::default()).unwrap();
        let base = expect(&p2, &gaussian(g, Quaternion::ONE)).unwrap();
        assert!((base - 0.5).abs() < 1e-4);
        for q in [Quaternion::J, Quaternion::new(0.5, 0.5, 0.5, 0.5)] {
            assert!((expect(&p2, &gaussian(g, q)).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn p_squared_position_commutator_is_exact() {
        let g = Grid::cubic(1, 64, 6.0, Boundary::DirichletZero).unwrap();
        let psi = random_smooth_field(g, 3, 2);
        let units = Units::default();
        let p = momentum(&g, 0, units).unwrap();
        let c = commutator(&p_squared(&g, units).unwrap(), &position(0));
        let r = c.apply(&psi).add(&bar_i(&p).apply(&psi).scale(2.0));
        assert!(r.max_abs() < 1e-10);
    }

    #[test]
    fn continuity_examples() {
        let g = grid1(64, 8.0);
        let units = Units::default();
        let zero = GaugePotential::zero(g);
        let (_, u) = sample_potentials(
            &PotentialSpec {
                scalar: vec![ScalarFamily::Harmonic { omega: 1.0 }],
                gauge: vec![],
            },
            g,
            units,
        )
        .unwrap();
        let psi = normalized(random_smooth_field(g, 2, 4));
        let c = continuity_fields(&psi, &zero, &u, units).unwrap();
        assert!(c.g.iter().all(|&x| x.abs() < 1e-14));
        assert!(c.rho.iter().all(|&r| r >= 0.0));

        let (_, u) = sample_potentials(
            &PotentialSpec {
                scalar: vec![ScalarFamily::Absorber { gamma: 0.2 }],
                gauge: vec![],
            },
            g,
            units,
        )
        .unwrap();
        let psi = gaussian(g, Quaternion::new(0.6, 0.8, 0.0, 0.0));
        let c = continuity_fields(&psi, &zero, &u, units).unwrap();
        for (gg, r) in c.g.iter().zip(&c.rho) {
            assert!((gg + 0.2 * r).abs() < 1e-15);
        }

        let psi = plane_wave(g, 2, Quaternion::ONE);
        let keff = {
            let k = 2.0 * PI * 2.0 / 8.0;
            (k * g.spacing(0)).sin() / g.spacing(0)
        };
        let c = continuity_fields(&psi, &zero, &ScalarPotential::zero(g), units).unwrap();
        for (jj, r) in c.j[0].iter().zip(&c.rho) {
            assert!((jj - keff * r).abs() < 1e-14);
        }
    }

    #[test]
    fn operators_are_real_linear() {
        let g = Grid::cubic(3, 6, 3.0, Boundary::Periodic).unwrap();
        let (a, u) = sample_potentials(
            &PotentialSpec {
                scalar: vec![ScalarFamily::ComplexW {
                    w0: Complex64::new(0.3, 0.1),
                }],
                gauge: vec![GaugeFamily::UniformB { b0: 1.0 }],
            },
            g,
            Units::default(),
        )
        .unwrap();
        let f1 = random_smooth_field(g, 1, 1);
        let f2 = random_smooth_field(g, 1, 2);
        let ops = [
            generalized_momentum(&a, 1, Units::default()).unwrap(),
            hamiltonian(&a, &u, Units::default()).unwrap(),
            bar_i(&r_dot_p(&g, Units::default()).unwrap()),
        ];
        for op in ops {
            let lhs = op.apply(&f1.scale(2.0).axpy(-3.0, &f2));
            let rhs = op.apply(&f1).scale(2.0).axpy(-3.0, &op.apply(&f2));
            assert!(lhs.sub(&rhs).max_abs() < 1e-11);
        }
    }
}
