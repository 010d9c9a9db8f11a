//! Uniform grids in one to three dimensions, quaternion-valued fields on them,
//! second-order central-difference calculus and matched quadrature.
//!
//! Node `i` on an axis of extent `L` with `n` nodes sits at `−L/2 + i h`,
//! `h = L/n`. Periodic axes identify node `n` with node `0`; dirichlet-zero
//! axes read zero ghost values beyond both ends.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{HqmError, Result};
use crate::quaternion::{levi_civita, QVector3, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    DirichletZero,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::DirichletZero => "dirichlet-zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: usize,
    n: [usize; 3],
    length: [f64; 3],
    boundary: Boundary,
}

impl Grid {
    /// Axes beyond `dims` are ignored.
    pub fn new(dims: usize, n: [usize; 3], length: [f64; 3], boundary: Boundary) -> Result<Self> {
        if !(1..=3).contains(&dims) {
            return Err(HqmError::config("grid.dims", format!("must be 1, 2 or 3, got {dims}")));
        }
        let mut nn = [1usize; 3];
        let mut ll = [1.0f64; 3];
        for a in 0..dims {
            if n[a] == 0 {
                return Err(HqmError::config("grid.n", "node count must be positive"));
            }
            if !(length[a].is_finite() && length[a] > 0.0) {
                return Err(HqmError::config("grid.length", "extent must be positive and finite"));
            }
            nn[a] = n[a];
            ll[a] = length[a];
        }
        Ok(Self {
            dims,
            n: nn,
            length: ll,
            boundary,
        })
    }

    /// Same node count and extent on every axis.
    pub fn cubic(dims: usize, n: usize, length: f64, boundary: Boundary) -> Result<Self> {
        Self::new(dims, [n; 3], [length; 3], boundary)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn length(&self) -> [f64; 3] {
        self.length
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length[axis] / self.n[axis] as f64
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid with every active axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let mut g = *self;
        for a in 0..self.dims {
            g.n[a] *= factor;
        }
        g
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.n[0];
        let r = idx / self.n[0];
        [i0, r % self.n[1], r / self.n[1]]
    }

    #[inline]
    pub fn coord_1d(&self, axis: usize, i: usize) -> f64 {
        if axis >= self.dims {
            return 0.0;
        }
        -0.5 * self.length[axis] + i as f64 * self.spacing(axis)
    }

    /// Physical coordinates of a node; inactive axes read 0.
    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        [self.coord_1d(0, m[0]), self.coord_1d(1, m[1]), self.coord_1d(2, m[2])]
    }

    /// Neighbor one step along `axis` in direction `dir` (±1); `None` means a
    /// zero ghost node.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, dir: isize) -> Option<usize> {
        let m = self.multi_index(idx);
        let n = self.n[axis] as isize;
        let j = m[axis] as isize + dir;
        let j = if (0..n).contains(&j) {
            j
        } else {
            match self.boundary {
                Boundary::Periodic => j.rem_euclid(n),
                Boundary::DirichletZero => return None,
            }
        };
        let stride = match axis {
            0 => 1,
            1 => self.n[0],
            _ => self.n[0] * self.n[1],
        };
        Some((idx as isize + (j - m[axis] as isize) * stride as isize) as usize)
    }

    /// Quadrature weight of a node: `h^dims` (rectangle) on periodic grids,
    /// trapezoid weights on dirichlet-zero grids.
    pub fn weight(&self, idx: usize) -> f64 {
        let m = self.multi_index(idx);
        let mut w = 1.0;
        for a in 0..self.dims {
            w *= self.spacing(a);
            if self.boundary == Boundary::DirichletZero && (m[a] == 0 || m[a] + 1 == self.n[a]) {
                w *= 0.5;
            }
        }
        w
    }

    pub fn check_differentiable(&self, axis: usize) -> Result<()> {
        if axis >= self.dims {
            return Err(HqmError::config(
                "axis",
                format!("axis {axis} not present on a {}-dimensional grid", self.dims),
            ));
        }
        if self.n[axis] < 3 {
            return Err(HqmError::config(
                "grid.n",
                format!("axis {axis} has {} nodes; differentiation needs at least 3", self.n[axis]),
            ));
        }
        Ok(())
    }

    pub fn require_3d(&self, what: &str) -> Result<()> {
        if self.dims != 3 {
            return Err(HqmError::config(
                "grid.dims",
                format!("{what} needs a 3-dimensional grid, got {}", self.dims),
            ));
        }
        Ok(())
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(HqmError::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }

    /// Nodes at least `margin` (physical distance) inside every active face.
    pub fn interior_mask(&self, margin: f64) -> Vec<bool> {
        (0..self.len())
            .map(|idx| {
                let x = self.coords(idx);
                (0..self.dims).all(|a| {
                    let half = 0.5 * self.length[a];
                    x[a] >= -half + margin - 1e-12 && x[a] <= half - margin + 1e-12
                })
            })
            .collect()
    }
}

/// One quaternion per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct QField {
    grid: Grid,
    values: Vec<Quaternion>,
}

impl QField {
    pub fn new(grid: Grid, values: Vec<Quaternion>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HqmError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Quaternion::ZERO)
    }

    pub fn constant(grid: Grid, q: Quaternion) -> Self {
        Self {
            grid,
            values: vec![q; grid.len()],
        }
    }

    /// Samples a closure of the node coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Quaternion + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Quaternion] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Quaternion] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Quaternion> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion + Sync) -> Self {
        Self {
            grid: self.grid,
            values: self.values.par_iter().map(|&q| f(q)).collect(),
        }
    }

    /// Nodewise map with the node index.
    pub fn map_indexed(&self, f: impl Fn(usize, Quaternion) -> Quaternion + Sync) -> Self {
        Self {
            grid: self.grid,
            values: self.values.par_iter().enumerate().map(|(i, &q)| f(i, q)).collect(),
        }
    }

    /// Nodewise combination of two fields on the same grid.
    ///
    /// Panics on grid mismatch: operator compositions only ever combine
    /// fields produced from the same input.
    pub fn zip_map(&self, other: &QField, f: impl Fn(Quaternion, Quaternion) -> Quaternion + Sync) -> Self {
        assert_eq!(self.grid, other.grid, "zip_map on mismatched grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &QField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &QField) -> Self {
        self.zip_map(other, |a, b| a + b * s)
    }

    /// `self · q` at every node.
    pub fn right_mul(&self, q: Quaternion) -> Self {
        self.map(|v| v * q)
    }

    /// `q · self` at every node.
    pub fn left_mul(&self, q: Quaternion) -> Self {
        self.map(|v| q * v)
    }

    pub fn right_mul_i(&self) -> Self {
        self.map(Quaternion::mul_i_right)
    }

    pub fn left_mul_i(&self) -> Self {
        self.map(Quaternion::mul_i_left)
    }

    /// Nodewise `factor · self`.
    pub fn left_mul_field(&self, factor: &QField) -> Self {
        factor.zip_map(self, |u, v| u * v)
    }

    /// Nodewise `self · factor`.
    pub fn right_mul_field(&self, factor: &QField) -> Self {
        self.zip_map(factor, |v, u| v * u)
    }

    pub fn conj(&self) -> Self {
        self.map(Quaternion::conj)
    }

    /// Multiplies every node by its coordinate along `axis`.
    pub fn times_coord(&self, axis: usize) -> Self {
        let g = self.grid;
        self.map_indexed(|i, q| q * g.coords(i)[axis])
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|q| q.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }

    /// Largest absolute component over the masked nodes.
    pub fn max_abs_masked(&self, mask: &[bool]) -> f64 {
        self.values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(q, _)| q.max_abs())
            .fold(0.0, f64::max)
    }

    /// Discrete L² norm `sqrt(∫ |f|²)`.
    pub fn l2_norm(&self) -> f64 {
        integrate(&self.map(|q| Quaternion::real(q.norm_sqr()))).x0.sqrt()
    }
}

/// Three quaternion fields on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QVectorField {
    components: [QField; 3],
}

impl QVectorField {
    pub fn new(components: [QField; 3]) -> Result<Self> {
        components[0].grid.check_same(&components[1].grid)?;
        components[0].grid.check_same(&components[2].grid)?;
        Ok(Self { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            components: std::array::from_fn(|_| QField::zeros(grid)),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> QVector3 + Sync) -> Self {
        let values: Vec<QVector3> = (0..grid.len()).into_par_iter().map(|i| f(grid.coords(i))).collect();
        Self::from_nodes(grid, &values)
    }

    pub fn from_nodes(grid: Grid, values: &[QVector3]) -> Self {
        Self {
            components: std::array::from_fn(|a| QField {
                grid,
                values: values.iter().map(|v| v.0[a]).collect(),
            }),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.components[0].grid
    }

    pub fn component(&self, axis: usize) -> &QField {
        &self.components[axis]
    }

    pub fn components(&self) -> &[QField; 3] {
        &self.components
    }

    pub fn node(&self, idx: usize) -> QVector3 {
        QVector3(std::array::from_fn(|a| self.components[a].values[idx]))
    }

    pub fn nodes(&self) -> Vec<QVector3> {
        (0..self.grid().len()).map(|i| self.node(i)).collect()
    }

    pub fn map_nodes(&self, f: impl Fn(QVector3) -> QVector3 + Sync) -> Self {
        let v: Vec<QVector3> = (0..self.grid().len()).into_par_iter().map(|i| f(self.node(i))).collect();
        Self::from_nodes(*self.grid(), &v)
    }

    pub fn zip_nodes(&self, other: &Self, f: impl Fn(QVector3, QVector3) -> QVector3 + Sync) -> Self {
        assert_eq!(self.grid(), other.grid(), "vector fields live on different grids");
        let v: Vec<QVector3> = (0..self.grid().len())
            .into_par_iter()
            .map(|i| f(self.node(i), other.node(i)))
            .collect();
        Self::from_nodes(*self.grid(), &v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            components: std::array::from_fn(|a| self.components[a].add(&other.components[a])),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            components: std::array::from_fn(|a| self.components[a].sub(&other.components[a])),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(QField::max_abs).fold(0.0, f64::max)
    }
}

/// Central difference `(f[i+1] − f[i−1]) / 2h` along `axis`.
pub fn gradient(f: &QField, axis: usize) -> Result<QField> {
    let g = f.grid;
    g.check_differentiable(axis)?;
    let inv = 0.5 / g.spacing(axis);
    let vals = &f.values;
    let at = |j: Option<usize>| j.map_or(Quaternion::ZERO, |j| vals[j]);
    let values = (0..g.len())
        .into_par_iter()
        .map(|i| (at(g.neighbor(i, axis, 1)) - at(g.neighbor(i, axis, -1))) * inv)
        .collect();
    Ok(QField { grid: g, values })
}

/// Three-point Laplacian summed over the active axes.
pub fn laplacian(f: &QField) -> Result<QField> {
    let g = f.grid;
    for a in 0..g.dims {
        g.check_differentiable(a)?;
    }
    let vals = &f.values;
    let at = |j: Option<usize>| j.map_or(Quaternion::ZERO, |j| vals[j]);
    let inv: Vec<f64> = (0..g.dims).map(|a| 1.0 / (g.spacing(a) * g.spacing(a))).collect();
    let values = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Quaternion::ZERO;
            for (a, &w) in inv.iter().enumerate() {
                let s = at(g.neighbor(i, a, 1)) + at(g.neighbor(i, a, -1)) - vals[i] * 2.0;
                acc += s * w;
            }
            acc
        })
        .collect();
    Ok(QField { grid: g, values })
}

/// `(∇×F)_c = ε_cab ∂_a F_b`.
pub fn curl(f: &QVectorField) -> Result<QVectorField> {
    let g = *f.grid();
    g.require_3d("curl")?;
    // d[a][b] = ∂_a F_b
    let mut d: Vec<Vec<QField>> = Vec::with_capacity(3);
    for a in 0..3 {
        let mut row = Vec::with_capacity(3);
        for b in 0..3 {
            row.push(if a == b {
                QField::zeros(g)
            } else {
                gradient(&f.components[b], a)?
            });
        }
        d.push(row);
    }
    let comp = |c: usize| {
        let mut acc = QField::zeros(g);
        for a in 0..3 {
            for b in 0..3 {
                let e = levi_civita(c, a, b);
                if e != 0.0 {
                    acc = acc.axpy(e, &d[a][b]);
                }
            }
        }
        acc
    };
    Ok(QVectorField {
        components: [comp(0), comp(1), comp(2)],
    })
}

/// `∇·F = Σ_a ∂_a F_a`.
pub fn divergence(f: &QVectorField) -> Result<QField> {
    let g = *f.grid();
    g.require_3d("divergence")?;
    let mut acc = QField::zeros(g);
    for a in 0..3 {
        acc = acc.add(&gradient(&f.components[a], a)?);
    }
    Ok(acc)
}

/// Quadrature matched to the boundary policy. Summation is sequential so the
/// result is reproducible bit for bit.
pub fn integrate(f: &QField) -> Quaternion {
    let g = f.grid;
    let uniform = g.boundary == Boundary::Periodic;
    let mut acc = Quaternion::ZERO;
    for (i, &q) in f.values.iter().enumerate() {
        if uniform {
            acc += q;
        } else {
            acc += q * g.weight(i);
        }
    }
    if uniform {
        let w: f64 = (0..g.dims).map(|a| g.spacing(a)).product();
        acc * w
    } else {
        acc
    }
}

/// Weighted sum of a real per-node quantity.
pub fn integrate_real(grid: &Grid, values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    for (i, v) in values.enumerate() {
        acc += v * grid.weight(i);
    }
    acc
}

/// Band-limited random field: a sum of periodic Fourier modes with integer
/// wavenumbers `|m_a| ≤ max_mode` on every active axis and random quaternion
/// amplitudes. Deterministic for a given seed.
pub fn random_smooth_field(grid: Grid, max_mode: i32, seed: u64) -> QField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = grid.dims();
    let range = -max_mode..=max_mode;
    let mut modes: Vec<([f64; 3], Quaternion, Quaternion)> = Vec::new();
    let axis_modes = |a: usize| if a < dims { range.clone().collect::<Vec<_>>() } else { vec![0] };
    for m0 in axis_modes(0) {
        for m1 in axis_modes(1) {
            for m2 in axis_modes(2) {
                let m = [m0, m1, m2];
                let k: [f64; 3] = std::array::from_fn(|a| {
                    if a < dims {
                        2.0 * std::f64::consts::PI * m[a] as f64 / grid.length()[a]
                    } else {
                        0.0
                    }
                });
                let mut amp = || {
                    Quaternion::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                };
                let c = amp();
                let s = amp();
                modes.push((k, c, s));
            }
        }
    }
    QField::from_fn(grid, |x| {
        let mut acc = Quaternion::ZERO;
        for (k, c, s) in &modes {
            let ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            acc += *c * ph.cos() + *s * ph.sin();
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scalar(x: f64) -> Quaternion {
        Quaternion::real(x)
    }

    #[test]
    fn degenerate_axis_is_rejected() {
        let g = Grid::cubic(1, 2, 1.0, Boundary::Periodic).unwrap();
        assert!(matches!(gradient(&QField::zeros(g), 0), Err(HqmError::Config { .. })));
        assert!(Grid::cubic(4, 8, 1.0, Boundary::Periodic).is_err());
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        for b in [Boundary::Periodic] {
            let g = Grid::cubic(3, 8, 2.0, b).unwrap();
            let f = QField::constant(g, Quaternion::new(1.0, 2.0, 3.0, 4.0));
            for a in 0..3 {
                assert_eq!(gradient(&f, a).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn gradient_of_sine_converges_at_second_order() {
        let l = 3.0;
        let err = |n: usize| {
            let g = Grid::cubic(1, n, l, Boundary::Periodic).unwrap();
            let f = QField::from_fn(g, |x| scalar((2.0 * PI * x[0] / l).sin()));
            let d = gradient(&f, 0).unwrap();
            let exact = QField::from_fn(g, |x| scalar(2.0 * PI / l * (2.0 * PI * x[0] / l).cos()));
            d.sub(&exact).max_abs()
        };
        let (e1, e2) = (err(32), err(64));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "order {order}");
    }

    #[test]
    fn laplacian_matches_three_point_symbol() {
        let (n, l) = (64, 5.0);
        let g = Grid::cubic(1, n, l, Boundary::Periodic).unwrap();
        let k = 2.0 * PI * 3.0 / l;
        let h = g.spacing(0);
        let f = QField::from_fn(g, |x| Quaternion::new((k * x[0]).cos(), (k * x[0]).sin(), 0.0, 0.0));
        let lap = laplacian(&f).unwrap();
        let symbol = (2.0 * (k * h / 2.0).sin() / h).powi(2);
        let expect = f.scale(-symbol);
        assert!(lap.sub(&expect).max_abs() < 1e-10);
    }

    #[test]
    fn curl_of_symmetric_gauge_is_uniform() {
        let g = Grid::cubic(3, 10, 4.0, Boundary::Periodic).unwrap();
        let b0 = 1.7;
        let f = QVectorField::from_fn(g, |x| QVector3::from_real([-0.5 * b0 * x[1], 0.5 * b0 * x[0], 0.0]));
        let c = curl(&f).unwrap();
        let mask = g.interior_mask(1.5 * g.spacing(0));
        for i in (0..g.len()).filter(|&i| mask[i]) {
            let v = c.node(i);
            assert!((v.0[2].x0 - b0).abs() < 1e-12);
            assert!(v.0[0].max_abs() < 1e-12 && v.0[1].max_abs() < 1e-12);
        }
        let constant = QVectorField::from_fn(g, |_| QVector3::from_real([1.0, -2.0, 3.0]));
        assert_eq!(curl(&constant).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn div_curl_vanishes() {
        let g = Grid::cubic(3, 12, 3.0, Boundary::Periodic).unwrap();
        let f = QVectorField::new([
            random_smooth_field(g, 2, 1),
            random_smooth_field(g, 2, 2),
            random_smooth_field(g, 2, 3),
        ])
        .unwrap();
        let d = divergence(&curl(&f).unwrap()).unwrap();
        assert!(d.max_abs() < 1e-12 * f.max_abs().max(1.0) * 10.0, "{}", d.max_abs());
    }

    #[test]
    fn non_3d_curl_is_rejected() {
        let g = Grid::cubic(2, 8, 1.0, Boundary::Periodic).unwrap();
        assert!(curl(&QVectorField::zeros(g)).is_err());
        assert!(divergence(&QVectorField::zeros(g)).is_err());
    }

    #[test]
    fn quadrature() {
        let g = Grid::new(2, [8, 5, 1], [2.0, 3.0, 1.0], Boundary::Periodic).unwrap();
        assert!((integrate(&QField::constant(g, Quaternion::ONE)).x0 - 6.0).abs() < 1e-14);

        // Normalized Gaussian density, σ = 1, L = 12σ, n = 256.
        let g = Grid::cubic(1, 256, 12.0, Boundary::Periodic).unwrap();
        let rho = QField::from_fn(g, |x| scalar((-x[0] * x[0] / 2.0).exp() / (2.0 * PI).sqrt()));
        assert!((integrate(&rho).x0 - 1.0).abs() < 1e-8);

        // Odd integrand on a periodic grid, symmetric about the origin.
        let g = Grid::cubic(1, 100, 10.0, Boundary::Periodic).unwrap();
        let odd = QField::from_fn(g, |x| scalar((2.0 * PI * x[0] / 10.0).sin() * (x[0] / 3.0).cos()));
        assert!(integrate(&odd).x0.abs() < 1e-13);
    }

    #[test]
    fn dirichlet_quadrature_is_trapezoid() {
        let g = Grid::cubic(1, 11, 1.0, Boundary::DirichletZero).unwrap();
        let f = QField::constant(g, Quaternion::ONE);
        // 11 nodes, h = 1/11, trapezoid over 10 intervals.
        assert!((integrate(&f).x0 - 10.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn discrete_integration_by_parts() {
        let g = Grid::cubic(3, 10, 2.5, Boundary::Periodic).unwrap();
        let f = random_smooth_field(g, 2, 11);
        let h = random_smooth_field(g, 2, 12);
        for a in 0..3 {
            let lhs = integrate(&gradient(&f, a).unwrap().zip_map(&h, |p, q| Quaternion::real(p.dot(q))));
            let rhs = integrate(&f.zip_map(&gradient(&h, a).unwrap(), |p, q| Quaternion::real(p.dot(q))));
            assert!((lhs.x0 + rhs.x0).abs() < 1e-11, "{} {}", lhs.x0, rhs.x0);
        }
    }

    #[test]
    fn periodic_neighbors_wrap() {
        let g = Grid::cubic(2, 4, 1.0, Boundary::Periodic).unwrap();
        assert_eq!(g.neighbor(g.index([0, 0, 0]), 0, -1), Some(g.index([3, 0, 0])));
        assert_eq!(g.neighbor(g.index([1, 3, 0]), 1, 1), Some(g.index([1, 0, 0])));
        let d = Grid::cubic(1, 4, 1.0, Boundary::DirichletZero).unwrap();
        assert_eq!(d.neighbor(0, 0, -1), None);
    }
}
