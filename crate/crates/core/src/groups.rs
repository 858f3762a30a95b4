//! Matrix models of `SU*(2m)`, `U*(2m) = SU*(2m)·U(1)` and the quaternionic
//! embedding `ℍᵐ → ℂ²ᵐ`.
//!
//! `ℂ²ᵐ` carries coordinates `(z, w)` and the antilinear structure
//! `A(z, w) = (w̄, −z̄)`, i.e. `Av = Ω v̄` with `Ω = [[0, I], [−I, 0]]`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{GeomError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// A real-linear map `v ↦ M v` or, when antilinear, `v ↦ M v̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemilinearMap {
    pub matrix: CMatrix,
    pub antilinear: bool,
}

impl SemilinearMap {
    pub fn linear(matrix: CMatrix) -> Self {
        Self { matrix, antilinear: false }
    }

    /// The quaternionic structure `A` on `ℂ²ᵐ`.
    pub fn quaternionic_structure(m: usize) -> Self {
        Self { matrix: omega(m), antilinear: true }
    }

    /// `self ∘ other`; an antilinear left factor conjugates the right matrix.
    pub fn compose(&self, other: &Self) -> Self {
        let right = if self.antilinear { other.matrix.map(|c| c.conj()) } else { other.matrix.clone() };
        Self { matrix: &self.matrix * right, antilinear: self.antilinear ^ other.antilinear }
    }

    pub fn apply(&self, v: &nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
        if self.antilinear {
            &self.matrix * v.map(|c| c.conj())
        } else {
            &self.matrix * v
        }
    }
}

/// `Ω = [[0, I], [−I, 0]]` of size `2m`.
pub fn omega(m: usize) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    CMatrix::from_fn(2 * m, 2 * m, |i, j| {
        if i < m && j == i + m {
            one
        } else if i >= m && j + m == i {
            -one
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn half_size(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GeomError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    if m.nrows() % 2 != 0 {
        return Err(GeomError::OddDimension(m.nrows()));
    }
    Ok(m.nrows() / 2)
}

/// `‖M∘A − A∘M‖` (max-norm of `MΩ − ΩM̄`).
pub fn antilinear_commutator(m: &CMatrix) -> Result<f64> {
    let half = half_size(m)?;
    let a = SemilinearMap::quaternionic_structure(half);
    let lin = SemilinearMap::linear(m.clone());
    let lhs = lin.compose(&a);
    let rhs = a.compose(&lin);
    Ok(max_abs(&(lhs.matrix - rhs.matrix)))
}

/// `M ∈ SU*(2m)`: commutes with `A` and has determinant 1.
pub fn su_star_membership(m: &CMatrix, tol: f64) -> Result<bool> {
    let comm = antilinear_commutator(m)?;
    let det = m.determinant();
    Ok(comm <= tol && (det - Complex64::new(1.0, 0.0)).norm() <= tol)
}

/// Detailed result of a `U*(2m)` test.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct UStarTest {
    /// Phase with `M A M⁻¹ = e^{2iθ} A`, in `[0, π)`.
    pub theta: f64,
    /// `max |M A M⁻¹ A⁻¹ − e^{2iθ} Id|`.
    pub phase_residual: f64,
    /// `||det M| − 1|`.
    pub det_residual: f64,
}

impl UStarTest {
    pub fn defect(&self) -> f64 {
        self.phase_residual.max(self.det_residual)
    }
}

/// Computes the phase and residuals without deciding membership.
pub fn u_star_test(m: &CMatrix, tol: f64) -> Result<UStarTest> {
    let half = half_size(m)?;
    let det = m.determinant();
    if det.norm() <= tol {
        return Err(GeomError::Singular(det.norm()));
    }
    let inv = m.clone().try_inverse().ok_or(GeomError::Singular(det.norm()))?;
    let om = omega(half);
    // Ω⁻¹ = −Ω
    let c = m * &om * inv.map(|z| z.conj()) * (-&om);
    let pivot = if c[(0, 0)].norm() >= 0.5 {
        c[(0, 0)]
    } else {
        *c.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap()
    };
    let mut theta = 0.5 * pivot.arg();
    if theta < 0.0 {
        theta += std::f64::consts::PI;
    }
    if theta >= std::f64::consts::PI {
        theta -= std::f64::consts::PI;
    }
    let phase = Complex64::from_polar(1.0, 2.0 * theta);
    let target = CMatrix::identity(2 * half, 2 * half) * phase;
    Ok(UStarTest { theta, phase_residual: max_abs(&(c - target)), det_residual: (det.norm() - 1.0).abs() })
}

/// `θ` if `M ∈ U*(2m)` within `tol`, otherwise `None`.
pub fn u_star_membership(m: &CMatrix, tol: f64) -> Result<Option<f64>> {
    let t = u_star_test(m, tol)?;
    Ok((t.defect() <= tol).then_some(t.theta))
}

/// Real quaternion `s + xi + yj + zk`.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Quaternion {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(s: f64, x: f64, y: f64, z: f64) -> Self {
        Self { s, x, y, z }
    }

    pub fn conj(self) -> Self {
        Self::new(self.s, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.s * self.s + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `(a, b)` with `q = a + j b`.
    pub fn complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.s, self.x), Complex64::new(self.y, -self.z))
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.s + o.s, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.s - o.s, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.s, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.s * o.s - self.x * o.x - self.y * o.y - self.z * o.z,
            self.s * o.x + self.x * o.s + self.y * o.z - self.z * o.y,
            self.s * o.y - self.x * o.z + self.y * o.s + self.z * o.x,
            self.s * o.z + self.x * o.y - self.y * o.x + self.z * o.s,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.s * k, self.x * k, self.y * k, self.z * k)
    }
}

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    m: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> Quaternion) -> Self {
        Self { m, data: (0..m * m).map(|k| f(k / m, k % m)).collect() }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn scalar(q: Quaternion) -> Self {
        Self { m: 1, data: vec![q] }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.m + j]
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { m: self.m, data: self.data.iter().map(|q| *q * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.m;
        Self::from_fn(m, |i, j| (0..m).fold(Quaternion::ZERO, |acc, k| acc + self.get(i, k) * o.get(k, j)))
    }
}

/// Complex `2m × 2m` image of a quaternionic matrix acting on `ℍᵐ` from the
/// left, with `ℍᵐ ≅ ℂ²ᵐ` through `v = a + j b ↦ (ā, −b̄)`.
/// For `Q = A + jB` (entrywise) the image is `[[Ā, B], [−B̄, A]]`; in
/// particular `embed(j) = Ω`.
pub fn quaternionic_embed(q: &QuatMatrix) -> CMatrix {
    let m = q.size();
    CMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let (i, j) = (r % m, c % m);
        let (a, b) = q.get(i, j).complex_pair();
        match (r < m, c < m) {
            (true, true) => a.conj(),
            (true, false) => b,
            (false, true) => -b.conj(),
            (false, false) => a,
        }
    })
}

/// Complex matrix of a real endomorphism of `ℝ²ᵏ` that commutes with the
/// standard structure on interleaved coordinates, `z_a = x_{2a} + i x_{2a+1}`.
pub fn complex_from_real(h: &DMatrix<f64>) -> CMatrix {
    let k = h.nrows() / 2;
    CMatrix::from_fn(k, k, |a, b| Complex64::new(h[(2 * a, 2 * b)], h[(2 * a + 1, 2 * b)]))
}

/// `max |[H, I₀]|` for the standard structure on interleaved coordinates.
pub fn standard_commutator(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows();
    let mut i0 = DMatrix::zeros(n, n);
    for a in 0..n / 2 {
        i0[(2 * a + 1, 2 * a)] = 1.0;
        i0[(2 * a, 2 * a + 1)] = -1.0;
    }
    (h * &i0 - &i0 * h).amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn structure_squares_to_minus_one() {
        let a = SemilinearMap::quaternionic_structure(2);
        let a2 = a.compose(&a);
        assert!(!a2.antilinear);
        assert!(max_abs(&(a2.matrix + CMatrix::identity(4, 4))) == 0.0);
    }

    #[test]
    fn scalar_phases() {
        let id = CMatrix::identity(4, 4);
        assert!(su_star_membership(&id, 1e-12).unwrap());
        assert_eq!(u_star_membership(&id, 1e-12).unwrap(), Some(0.0));
        let ph = &id * Complex64::from_polar(1.0, 0.3);
        assert!(!su_star_membership(&ph, 1e-8).unwrap());
        let t = u_star_membership(&(&id * Complex64::from_polar(1.0, 0.7)), 1e-12).unwrap().unwrap();
        assert!((t - 0.7).abs() < 1e-14);
    }

    #[test]
    fn embedding_of_units() {
        let e = quaternionic_embed(&QuatMatrix::scalar(Quaternion::J));
        assert_eq!(e, omega(1));
        assert_eq!(quaternionic_embed(&QuatMatrix::identity(2)), CMatrix::identity(4, 4));
        let i = quaternionic_embed(&QuatMatrix::scalar(Quaternion::I));
        assert_eq!(i, CMatrix::from_row_slice(2, 2, &[c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]));
    }

    #[test]
    fn odd_size_is_rejected() {
        let m = CMatrix::identity(3, 3);
        assert!(matches!(su_star_membership(&m, 1e-9), Err(GeomError::OddDimension(3))));
    }

    #[test]
    fn singular_is_reported() {
        let m = CMatrix::zeros(2, 2);
        assert!(matches!(u_star_membership(&m, 1e-9), Err(GeomError::Singular(_))));
    }

    #[test]
    fn complex_from_real_roundtrip() {
        // multiplication by 2+3i on ℂ as a real 2×2 matrix
        let h = DMatrix::from_row_slice(2, 2, &[2.0, -3.0, 3.0, 2.0]);
        assert_eq!(standard_commutator(&h), 0.0);
        assert_eq!(complex_from_real(&h)[(0, 0)], c(2.0, 3.0));
    }
}
