//! Background potentials `𝓐 = αi + βj`, `U = V + Wj`, the quaternionic
//! magnetic field `𝓑 = κ + λj` and its divergence.

use num_complex::Complex64;

use crate::error::{HqmError, Result};
use crate::lattice::{curl, divergence, Grid, QField, QVectorField};
use crate::quaternion::{ccross, qcross, CVec3, QVector3, Quaternion, RVec3, SymplecticPair};

/// ħ and m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// Scalar-potential families. Several families in one spec are summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFamily {
    None,
    /// `V = ½ m ω² r²`.
    Harmonic { omega: f64 },
    /// `V = λ r⁴`.
    Quartic { lambda: f64 },
    /// `V = −iγ/2`.
    Absorber { gamma: f64 },
    /// `W = w0`.
    ComplexW { w0: Complex64 },
}

/// Gauge-potential families (3D only, except `None`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeFamily {
    None,
    /// `α = ½B0(−y, x, 0)`.
    UniformB { b0: f64 },
    /// Constant `β = (b1, b2, b3)`.
    ConstBeta { beta: CVec3 },
    /// `β = s(cos(2πz/L), i cos(2πx/L), 0)`, whose `β×β*` has nonzero
    /// divergence.
    MonopoleDemo { scale: f64 },
}

impl ScalarFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarFamily::None => "none",
            ScalarFamily::Harmonic { .. } => "harmonic",
            ScalarFamily::Quartic { .. } => "quartic",
            ScalarFamily::Absorber { .. } => "absorber",
            ScalarFamily::ComplexW { .. } => "complex-w",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |k: &str| Err(HqmError::config(k, "must be finite"));
        match *self {
            ScalarFamily::Harmonic { omega } if !omega.is_finite() || omega <= 0.0 => {
                Err(HqmError::config("omega", "must be positive and finite"))
            }
            ScalarFamily::Quartic { lambda } if !lambda.is_finite() => bad("lambda"),
            ScalarFamily::Absorber { gamma } if !gamma.is_finite() => bad("gamma"),
            ScalarFamily::ComplexW { w0 } if !(w0.re.is_finite() && w0.im.is_finite()) => bad("w0"),
            _ => Ok(()),
        }
    }
}

impl GaugeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GaugeFamily::None => "none",
            GaugeFamily::UniformB { .. } => "uniform-b",
            GaugeFamily::ConstBeta { .. } => "const-beta",
            GaugeFamily::MonopoleDemo { .. } => "monopole-demo",
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            GaugeFamily::None => true,
            GaugeFamily::UniformB { b0 } => b0.is_finite(),
            GaugeFamily::ConstBeta { beta } => beta.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            GaugeFamily::MonopoleDemo { scale } => scale.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(HqmError::config(self.name(), "parameters must be finite"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSpec {
    pub scalar: Vec<ScalarFamily>,
    pub gauge: Vec<GaugeFamily>,
}

/// `𝓐 = αi + βj` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePotential {
    grid: Grid,
    alpha: Vec<RVec3>,
    beta: Vec<CVec3>,
}

impl GaugePotential {
    pub fn zero(grid: Grid) -> Self {
        Self {
            grid,
            alpha: vec![[0.0; 3]; grid.len()],
            beta: vec![[Complex64::new(0.0, 0.0); 3]; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> (RVec3, CVec3)) -> Self {
        let (alpha, beta) = (0..grid.len()).map(|i| f(grid.coords(i))).unzip();
        Self { grid, alpha, beta }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alpha(&self) -> &[RVec3] {
        &self.alpha
    }

    pub fn beta(&self) -> &[CVec3] {
        &self.beta
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|a| a.iter().all(|&x| x == 0.0))
            && self.beta.iter().all(|b| b.iter().all(|z| z.norm_sqr() == 0.0))
    }

    /// `𝓐_a = α_a i + β_a j` at one node.
    pub fn node(&self, idx: usize) -> QVector3 {
        let a = self.alpha[idx];
        let b = self.beta[idx];
        QVector3(std::array::from_fn(|c| {
            Quaternion::from_symplectic(SymplecticPair::new(Complex64::new(0.0, a[c]), b[c]))
        }))
    }

    pub fn as_qvector(&self) -> QVectorField {
        let nodes: Vec<QVector3> = (0..self.grid.len()).map(|i| self.node(i)).collect();
        QVectorField::from_nodes(self.grid, &nodes)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            alpha: self
                .alpha
                .iter()
                .zip(&other.alpha)
                .map(|(a, b)| std::array::from_fn(|c| a[c] + b[c]))
                .collect(),
            beta: self
                .beta
                .iter()
                .zip(&other.beta)
                .map(|(a, b)| std::array::from_fn(|c| a[c] + b[c]))
                .collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            alpha: self.alpha.iter().map(|a| a.map(|x| x * s)).collect(),
            beta: self.beta.iter().map(|b| b.map(|z| z * s)).collect(),
        }
    }
}

/// `U = V + Wj` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPotential {
    grid: Grid,
    v: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl ScalarPotential {
    pub fn zero(grid: Grid) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            grid,
            v: vec![z; grid.len()],
            w: vec![z; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> (Complex64, Complex64)) -> Self {
        let (v, w) = (0..grid.len()).map(|i| f(grid.coords(i))).unzip();
        Self { grid, v, w }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn v(&self) -> &[Complex64] {
        &self.v
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    /// `U` real ⇔ `Im V = 0` and `W = 0`.
    pub fn is_real(&self) -> bool {
        self.v.iter().all(|z| z.im == 0.0) && self.w.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn has_w(&self) -> bool {
        self.w.iter().any(|z| z.norm_sqr() != 0.0)
    }

    pub fn node(&self, idx: usize) -> Quaternion {
        Quaternion::from_symplectic(SymplecticPair::new(self.v[idx], self.w[idx]))
    }

    pub fn as_qfield(&self) -> QField {
        let vals = (0..self.grid.len()).map(|i| self.node(i)).collect();
        QField::new(self.grid, vals).expect("sizes match by construction")
    }

    /// `W` alone as a quaternion field (`W` complex, no `j`).
    pub fn w_field(&self) -> QField {
        let vals = self.w.iter().map(|&z| Quaternion::from_complex(z)).collect();
        QField::new(self.grid, vals).expect("sizes match by construction")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Evaluates the families of `spec` nodewise and sums them.
pub fn sample_potentials(spec: &PotentialSpec, grid: Grid, units: Units) -> Result<(GaugePotential, ScalarPotential)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut u = ScalarPotential::zero(grid);
    for fam in &spec.scalar {
        fam.validate()?;
        let m = units.mass;
        let part = match *fam {
            ScalarFamily::None => continue,
            ScalarFamily::Harmonic { omega } => ScalarPotential::from_fn(grid, |x| {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                (Complex64::new(0.5 * m * omega * omega * r2, 0.0), zero)
            }),
            ScalarFamily::Quartic { lambda } => ScalarPotential::from_fn(grid, |x| {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                (Complex64::new(lambda * r2 * r2, 0.0), zero)
            }),
            ScalarFamily::Absorber { gamma } => {
                ScalarPotential::from_fn(grid, |_| (Complex64::new(0.0, -0.5 * gamma), zero))
            }
            ScalarFamily::ComplexW { w0 } => ScalarPotential::from_fn(grid, |_| (zero, w0)),
        };
        u = u.add(&part)?;
    }
    let mut a = GaugePotential::zero(grid);
    for fam in &spec.gauge {
        fam.validate()?;
        if *fam == GaugeFamily::None {
            continue;
        }
        grid.require_3d(fam.name())?;
        let part = match *fam {
            GaugeFamily::None => unreachable!(),
            GaugeFamily::UniformB { b0 } => {
                GaugePotential::from_fn(grid, |x| ([-0.5 * b0 * x[1], 0.5 * b0 * x[0], 0.0], [zero; 3]))
            }
            GaugeFamily::ConstBeta { beta } => GaugePotential::from_fn(grid, |_| ([0.0; 3], beta)),
            GaugeFamily::MonopoleDemo { scale } => {
                let [lx, _, lz] = grid.length();
                let tau = 2.0 * std::f64::consts::PI;
                GaugePotential::from_fn(grid, |x| {
                    (
                        [0.0; 3],
                        [
                            Complex64::new(scale * (tau * x[2] / lz).cos(), 0.0),
                            Complex64::new(0.0, scale * (tau * x[0] / lx).cos()),
                            zero,
                        ],
                    )
                })
            }
        };
        a = a.add(&part)?;
    }
    Ok((a, u))
}

/// `κ = i∇×α + β×β*`, `λ = ∇×β + 2i β×α`, `𝓑 = κ + λj`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticField {
    grid: Grid,
    kappa: Vec<CVec3>,
    lambda: Vec<CVec3>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MagneticOptions {
    /// Debug mutation: negates κ so identity checks can demonstrate that
    /// they detect a wrong field.
    pub flip_kappa: bool,
}

pub fn magnetic_field(g: &GaugePotential) -> Result<MagneticField> {
    magnetic_field_with(g, MagneticOptions::default())
}

pub fn magnetic_field_with(g: &GaugePotential, opts: MagneticOptions) -> Result<MagneticField> {
    g.grid.require_3d("magnetic field")?;
    // ∇×𝓐 = i ∇×α + (∇×β) j, read back symplectically.
    let curl_a = curl(&g.as_qvector())?;
    let two_i = Complex64::new(0.0, 2.0);
    let mut kappa = Vec::with_capacity(g.grid.len());
    let mut lambda = Vec::with_capacity(g.grid.len());
    for idx in 0..g.grid.len() {
        let (c0, c1) = curl_a.node(idx).to_symplectic();
        let b = g.beta[idx];
        let bc = b.map(|z| z.conj());
        let alpha_c = g.alpha[idx].map(|x| Complex64::new(x, 0.0));
        let bb = ccross(&b, &bc);
        let ba = ccross(&b, &alpha_c);
        let sign = if opts.flip_kappa { -1.0 } else { 1.0 };
        kappa.push(std::array::from_fn(|c| (c0[c] + bb[c]) * sign));
        lambda.push(std::array::from_fn(|c| c1[c] + two_i * ba[c]));
    }
    Ok(MagneticField {
        grid: g.grid,
        kappa,
        lambda,
    })
}

impl MagneticField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kappa(&self) -> &[CVec3] {
        &self.kappa
    }

    pub fn lambda(&self) -> &[CVec3] {
        &self.lambda
    }

    pub fn node(&self, idx: usize) -> QVector3 {
        QVector3::from_symplectic(self.kappa[idx], self.lambda[idx])
    }

    pub fn as_qvector(&self) -> QVectorField {
        let nodes: Vec<QVector3> = (0..self.grid.len()).map(|i| self.node(i)).collect();
        QVectorField::from_nodes(self.grid, &nodes)
    }
}

/// `∇×𝓐 − 𝓐×𝓐` with the quaternionic cross product; the second route to 𝓑.
pub fn magnetic_field_from_cross(g: &GaugePotential) -> Result<QVectorField> {
    let a = g.as_qvector();
    let curl_a = curl(&a)?;
    Ok(curl_a.sub(&a.map_nodes(|v| qcross(v, v))))
}

/// Divergence of 𝓑 and its i-component.
#[derive(Debug, Clone, PartialEq)]
pub struct MonopoleDensity {
    /// `∇·𝓑`, a pure imaginary quaternion field. Its multiplicative
    /// expectation `⟨∇·𝓑⟩` and its integral vanish.
    pub divergence: QField,
    /// The i-component of `∇·𝓑` as a real field; for complex Ψ this is
    /// (minus) the density of `⟨(∇·𝓑|i)⟩`.
    pub i_projected: QField,
}

pub fn monopole_density(b: &MagneticField) -> Result<MonopoleDensity> {
    let div = divergence(&b.as_qvector())?;
    let i_projected = div.map(|q| Quaternion::real(q.x1));
    Ok(MonopoleDensity {
        divergence: div,
        i_projected,
    })
}
