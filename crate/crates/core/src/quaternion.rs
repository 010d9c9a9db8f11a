//! Quaternion scalars, their symplectic (complex-pair) view, and quaternion
//! 3-vectors with the ordered cross product.
//!
//! Hamilton convention throughout: `i² = j² = k² = ijk = −1`, so `ij = k`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Real 3-vector.
pub type RVec3 = [f64; 3];
/// Complex 3-vector.
pub type CVec3 = [Complex64; 3];

/// `x0 + x1 i + x2 j + x3 k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    #[inline]
    pub const fn real(x0: f64) -> Self {
        Self::new(x0, 0.0, 0.0, 0.0)
    }

    /// Embeds a complex number as `re + im i`.
    #[inline]
    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im, 0.0, 0.0)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    /// `q q* = x0² + x1² + x2² + x3²`.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Vector (imaginary) part.
    #[inline]
    pub fn imag(self) -> Self {
        Self::new(0.0, self.x1, self.x2, self.x3)
    }

    /// Euclidean inner product of the four components, equal to `Re(a b*)`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x0 * other.x0 + self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// `self · i`, cheaper than a full product.
    #[inline]
    pub fn mul_i_right(self) -> Self {
        // (x0 + x1 i + x2 j + x3 k) i = −x1 + x0 i + x3 j − x2 k
        Self::new(-self.x1, self.x0, self.x3, -self.x2)
    }

    /// `i · self`.
    #[inline]
    pub fn mul_i_left(self) -> Self {
        // i (x0 + x1 i + x2 j + x3 k) = −x1 + x0 i − x3 j + x2 k
        Self::new(-self.x1, self.x0, -self.x3, self.x2)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn to_symplectic(self) -> SymplecticPair {
        SymplecticPair {
            z0: Complex64::new(self.x0, self.x1),
            z1: Complex64::new(self.x2, self.x3),
        }
    }

    pub fn from_symplectic(p: SymplecticPair) -> Self {
        Self::new(p.z0.re, p.z0.im, p.z1.re, p.z1.im)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3,
            a.x0 * b.x1 + a.x1 * b.x0 + a.x2 * b.x3 - a.x3 * b.x2,
            a.x0 * b.x2 - a.x1 * b.x3 + a.x2 * b.x0 + a.x3 * b.x1,
            a.x0 * b.x3 + a.x1 * b.x2 - a.x2 * b.x1 + a.x3 * b.x0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

/// Free-function form of the Hamilton product.
#[inline]
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

#[inline]
pub fn qconj(a: Quaternion) -> Quaternion {
    a.conj()
}

/// `q = z0 + z1 j` with complex `z0`, `z1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPair {
    pub z0: Complex64,
    pub z1: Complex64,
}

impl SymplecticPair {
    pub fn new(z0: Complex64, z1: Complex64) -> Self {
        Self { z0, z1 }
    }

    /// Conjugate in the symplectic view: `(z0*, −z1)`.
    pub fn conj(self) -> Self {
        Self::new(self.z0.conj(), -self.z1)
    }
}

pub fn to_symplectic(a: Quaternion) -> SymplecticPair {
    a.to_symplectic()
}

pub fn from_symplectic(p: SymplecticPair) -> Quaternion {
    Quaternion::from_symplectic(p)
}

/// Three quaternion components; symplectically `X = X0 + X1 j` with complex
/// 3-vectors `X0`, `X1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QVector3(pub [Quaternion; 3]);

impl QVector3 {
    pub const ZERO: QVector3 = QVector3([Quaternion::ZERO; 3]);

    pub fn new(vx: Quaternion, vy: Quaternion, vz: Quaternion) -> Self {
        Self([vx, vy, vz])
    }

    pub fn from_real(v: RVec3) -> Self {
        Self(v.map(Quaternion::real))
    }

    /// Builds `X0 + X1 j`.
    pub fn from_symplectic(x0: CVec3, x1: CVec3) -> Self {
        Self(std::array::from_fn(|a| {
            Quaternion::from_symplectic(SymplecticPair::new(x0[a], x1[a]))
        }))
    }

    pub fn to_symplectic(self) -> (CVec3, CVec3) {
        let p = self.0.map(Quaternion::to_symplectic);
        ([p[0].z0, p[1].z0, p[2].z0], [p[0].z1, p[1].z1, p[2].z1])
    }

    pub fn conj(self) -> Self {
        Self(self.0.map(Quaternion::conj))
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|q| q * s))
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }
}

impl Add for QVector3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|a| self.0[a] + o.0[a]))
    }
}

impl Sub for QVector3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|a| self.0[a] - o.0[a]))
    }
}

/// Quaternionic cross product
/// `X × Y = X0×Y0 − X1×Y1* + (X0×Y1 + X1×Y0*) j`,
/// evaluated in the symplectic form.
pub fn qcross(x: QVector3, y: QVector3) -> QVector3 {
    let (x0, x1) = x.to_symplectic();
    let (y0, y1) = y.to_symplectic();
    let y0c = y0.map(|z| z.conj());
    let y1c = y1.map(|z| z.conj());
    let a = ccross(&x0, &y0);
    let b = ccross(&x1, &y1c);
    let c = ccross(&x0, &y1);
    let d = ccross(&x1, &y0c);
    QVector3::from_symplectic(
        std::array::from_fn(|n| a[n] - b[n]),
        std::array::from_fn(|n| c[n] + d[n]),
    )
}

/// `ε_cab X_a Y_b` with ordered Hamilton products. Agrees with [`qcross`];
/// kept as the independent route for tests.
pub fn qcross_ordered(x: QVector3, y: QVector3) -> QVector3 {
    let [x1, x2, x3] = x.0;
    let [y1, y2, y3] = y.0;
    QVector3([x2 * y3 - x3 * y2, x3 * y1 - x1 * y3, x1 * y2 - x2 * y1])
}

/// Complex cross product (no conjugation).
#[inline]
pub fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn rcross(a: &RVec3, b: &RVec3) -> RVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Levi-Civita symbol on `{0, 1, 2}`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: Quaternion, b: Quaternion) -> bool {
        (a - b).max_abs() < TOL
    }

    fn q() -> impl Strategy<Value = Quaternion> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    #[test]
    fn hamilton_units() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        for u in [Q::I, Q::J, Q::K] {
            assert_eq!(u * u, -Q::ONE);
        }
        assert_eq!(Q::I * Q::J * Q::K, -Q::ONE);
    }

    #[test]
    fn product_with_conjugate_is_sum_of_squares() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(q * q.conj(), Quaternion::real(30.0));
        assert_eq!(q.conj(), Quaternion::new(1.0, -2.0, -3.0, -4.0));
        assert_eq!(q.conj().conj(), q);
    }

    #[test]
    fn right_and_left_i_shortcuts() {
        let q = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(q.mul_i_right(), q * Quaternion::I);
        assert_eq!(q.mul_i_left(), Quaternion::I * q);
    }

    #[test]
    fn symplectic_examples() {
        let p = Quaternion::new(1.0, 2.0, 3.0, 4.0).to_symplectic();
        assert_eq!(p.z0, Complex64::new(1.0, 2.0));
        assert_eq!(p.z1, Complex64::new(3.0, 4.0));
        // j (a + b i) = (a − b i) j
        let z = Quaternion::new(2.0, 5.0, 0.0, 0.0);
        assert_eq!(Quaternion::J * z, z.conj() * Quaternion::J);
        let qc = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(qc.conj().to_symplectic(), qc.to_symplectic().conj());
    }

    #[test]
    fn cross_examples() {
        let ex = QVector3::from_real([1.0, 0.0, 0.0]);
        let ey = QVector3::from_real([0.0, 1.0, 0.0]);
        assert_eq!(qcross(ex, ey), QVector3::from_real([0.0, 0.0, 1.0]));

        let z = Quaternion::ZERO;
        let jx = QVector3::new(Quaternion::J, z, z);
        let jy = QVector3::new(z, Quaternion::J, z);
        assert_eq!(qcross(jx, jy), QVector3::from_real([0.0, 0.0, -1.0]));

        let kx = QVector3::new(Quaternion::K, z, z);
        let minus_i_z = QVector3::new(z, z, -Quaternion::I);
        assert_eq!(qcross(kx, jy), minus_i_z);
        assert_eq!(qcross(jy, kx), minus_i_z);
        assert_ne!(qcross(kx, jy), qcross(jy, kx).scale(-1.0));
    }

    proptest! {
        #[test]
        fn associative(a in q(), b in q(), c in q()) {
            prop_assert!(((a * b) * c - a * (b * c)).max_abs() < 1e-10);
        }

        #[test]
        fn conj_reverses_products(a in q(), b in q()) {
            prop_assert!(close((a * b).conj(), b.conj() * a.conj()));
        }

        #[test]
        fn norm_multiplicative(a in q(), b in q()) {
            let lhs = (a * b).norm();
            prop_assert!((lhs - a.norm() * b.norm()).abs() < 1e-12 * (1.0 + lhs));
        }

        #[test]
        fn symplectic_round_trip_is_exact(a in q()) {
            prop_assert_eq!(Quaternion::from_symplectic(a.to_symplectic()), a);
        }

        #[test]
        fn j_anticommutes_with_complex(re in -5.0..5.0f64, im in -5.0..5.0f64) {
            let z = Quaternion::new(re, im, 0.0, 0.0);
            prop_assert_eq!(Quaternion::J * z, z.conj() * Quaternion::J);
        }

        #[test]
        fn cross_routes_agree(a in q(), b in q(), c in q(), d in q(), e in q(), f in q()) {
            let x = QVector3::new(a, b, c);
            let y = QVector3::new(d, e, f);
            prop_assert!((qcross(x, y) - qcross_ordered(x, y)).max_abs() < 1e-10);
        }

        #[test]
        fn cross_antisymmetric_on_real(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64,
                                        d in -5.0..5.0f64, e in -5.0..5.0f64, f in -5.0..5.0f64) {
            let x = QVector3::from_real([a, b, c]);
            let y = QVector3::from_real([d, e, f]);
            prop_assert_eq!(qcross(x, y), qcross(y, x).scale(-1.0));
            prop_assert_eq!(qcross(x, y), QVector3::from_real(rcross(&[a, b, c], &[d, e, f])));
        }

        #[test]
        fn cross_real_bilinear(a in q(), b in q(), c in q(), d in q(), s in -3.0..3.0f64) {
            let x = QVector3::new(a, b, c);
            let x2 = QVector3::new(d, a, b);
            let y = QVector3::new(c, d, a);
            let lhs = qcross(x.scale(s) + x2, y);
            let rhs = qcross(x, y).scale(s) + qcross(x2, y);
            prop_assert!((lhs - rhs).max_abs() < 1e-9);
            let lhs = qcross(y, x.scale(s) + x2);
            let rhs = qcross(y, x).scale(s) + qcross(y, x2);
            prop_assert!((lhs - rhs).max_abs() < 1e-9);
        }
    }
}
