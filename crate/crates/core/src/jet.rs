//! Truncated Taylor arithmetic for exact first and second derivatives.
//!
//! [`Jet2`] carries a value, gradient and packed upper-triangular Hessian;
//! [`Jet1`] carries a value and gradient. Both treat an empty derivative
//! vector as identically zero, so constants are cheap and mix freely with
//! seeded variables of any dimension.
//!
//! Everything numeric in the crate is written against the [`Scalar`] trait so
//! one formula can be evaluated at `f64`, `Jet1` or `Jet2`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Number-like type the geometry code is generic over.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign<f64>
{
    fn value(&self) -> f64;

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Self;

    fn zero() -> Self {
        Self::from(0.0)
    }

    fn one() -> Self {
        Self::from(1.0)
    }

    fn recip(&self) -> Self {
        let x = self.value();
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    fn sqrt(&self) -> Self {
        let s = self.value().sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.chain(e, e, e)
    }

    fn ln(&self) -> Self {
        let x = self.value();
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.chain(c, -s, -c)
    }

    fn tan(&self) -> Self {
        let t = self.value().tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    fn tanh(&self) -> Self {
        let t = self.value().tanh();
        let d = 1.0 - t * t;
        self.chain(t, d, -2.0 * t * d)
    }

    fn atan(&self) -> Self {
        let x = self.value();
        let d = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), d, -2.0 * x * d * d)
    }

    fn powi(&self, n: i32) -> Self {
        let x = self.value();
        let nf = n as f64;
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * x.powi(n - 2)
        };
        let d1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        self.chain(x.powi(n), d1, d2)
    }

    fn powf(&self, p: f64) -> Self {
        let x = self.value();
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }

    fn chain(&self, f: f64, _df: f64, _d2f: f64) -> Self {
        f
    }

    fn recip(&self) -> Self {
        1.0 / self
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Types that can be differentiated once more along a coordinate, losing one
/// order of accuracy.
pub trait Differentiable: Scalar {
    type Lower: Scalar;

    /// Partial derivative along coordinate `k`.
    fn partial(&self, k: usize) -> Self::Lower;

    /// Drops the highest-order data.
    fn truncate(&self) -> Self::Lower;
}

fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of `(i, j)` in the packed upper triangle of an `n × n` matrix.
#[inline]
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

fn dim_from_packed(len: usize) -> usize {
    // n(n+1)/2 = len
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    debug_assert_eq!(packed_len(n), len);
    n
}

fn axpy(out: &mut Vec<f64>, a: f64, x: &[f64]) {
    if x.is_empty() || a == 0.0 {
        return;
    }
    if out.is_empty() {
        out.extend(x.iter().map(|v| a * v));
    } else {
        debug_assert_eq!(out.len(), x.len(), "jet dimension mismatch");
        for (o, v) in out.iter_mut().zip(x) {
            *o += a * v;
        }
    }
}

fn scaled(a: f64, x: &[f64]) -> Vec<f64> {
    if a == 0.0 {
        Vec::new()
    } else {
        x.iter().map(|v| a * v).collect()
    }
}

// ---------------------------------------------------------------------------
// Jet1

/// Value plus gradient.
#[derive(Clone, PartialEq, Default)]
pub struct Jet1 {
    pub value: f64,
    /// Empty means the zero gradient.
    pub grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(value: f64) -> Self {
        Self { value, grad: Vec::new() }
    }

    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Self { value, grad }
    }

    pub fn new(value: f64, grad: Vec<f64>) -> Self {
        Self { value, grad }
    }

    pub fn grad_at(&self, k: usize) -> f64 {
        self.grad.get(k).copied().unwrap_or(0.0)
    }

    /// Gradient padded to `n` entries.
    pub fn gradient(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.grad_at(k)).collect()
    }

    /// Re-indexes the gradient into a larger coordinate system: old coordinate
    /// `k` becomes `map[k]` among `n` coordinates.
    pub fn embed(&self, map: &[usize], n: usize) -> Self {
        if self.grad.is_empty() {
            return self.clone();
        }
        let mut grad = vec![0.0; n];
        for (k, g) in self.grad.iter().enumerate() {
            grad[map[k]] = *g;
        }
        Self { value: self.value, grad }
    }
}

impl fmt::Debug for Jet1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet1({:e}, {:?})", self.value, self.grad)
    }
}

impl From<f64> for Jet1 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Scalar for Jet1 {
    fn value(&self) -> f64 {
        self.value
    }

    fn chain(&self, f: f64, df: f64, _d2f: f64) -> Self {
        Self { value: f, grad: scaled(df, &self.grad) }
    }
}

impl Differentiable for Jet1 {
    type Lower = f64;

    fn partial(&self, k: usize) -> f64 {
        self.grad_at(k)
    }

    fn truncate(&self) -> f64 {
        self.value
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(mut self, rhs: Jet1) -> Jet1 {
        self += rhs;
        self
    }
}

impl AddAssign for Jet1 {
    fn add_assign(&mut self, rhs: Jet1) {
        self.value += rhs.value;
        axpy(&mut self.grad, 1.0, &rhs.grad);
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(mut self, rhs: Jet1) -> Jet1 {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet1 {
    fn sub_assign(&mut self, rhs: Jet1) {
        self.value -= rhs.value;
        axpy(&mut self.grad, -1.0, &rhs.grad);
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut grad = scaled(rhs.value, &self.grad);
        axpy(&mut grad, self.value, &rhs.grad);
        Jet1 { value: self.value * rhs.value, grad }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: Jet1) -> Jet1 {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        let mut grad = scaled(inv, &self.grad);
        axpy(&mut grad, -value * inv, &rhs.grad);
        Jet1 { value, grad }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 { value: -self.value, grad: self.grad.into_iter().map(|g| -g).collect() }
    }
}

impl Add<f64> for Jet1 {
    type Output = Jet1;
    fn add(mut self, rhs: f64) -> Jet1 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet1 {
    type Output = Jet1;
    fn sub(mut self, rhs: f64) -> Jet1 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(mut self, rhs: f64) -> Jet1 {
        self *= rhs;
        self
    }
}

impl MulAssign<f64> for Jet1 {
    fn mul_assign(&mut self, rhs: f64) {
        self.value *= rhs;
        self.grad.iter_mut().for_each(|g| *g *= rhs);
    }
}

impl Div<f64> for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: f64) -> Jet1 {
        self * (1.0 / rhs)
    }
}

// ---------------------------------------------------------------------------
// Jet2

/// Value, gradient and symmetric Hessian (packed upper triangle).
#[derive(Clone, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    /// Empty means the zero gradient.
    pub grad: Vec<f64>,
    /// Packed upper triangle, row-major; empty means the zero Hessian.
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Self { value, grad: Vec::new(), hess: Vec::new() }
    }

    /// Coordinate function `x_index` seeded at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Self { value, grad, hess: Vec::new() }
    }

    /// Seeds all coordinates of a point.
    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        let n = point.len();
        point.iter().enumerate().map(|(i, &v)| Jet2::variable(v, i, n)).collect()
    }

    /// Constant jets at a point (derivatives ignored).
    pub fn constants(point: &[f64]) -> Vec<Jet2> {
        point.iter().map(|&v| Jet2::constant(v)).collect()
    }

    pub fn dim(&self) -> Option<usize> {
        if !self.grad.is_empty() {
            Some(self.grad.len())
        } else if !self.hess.is_empty() {
            Some(dim_from_packed(self.hess.len()))
        } else {
            None
        }
    }

    pub fn grad_at(&self, k: usize) -> f64 {
        self.grad.get(k).copied().unwrap_or(0.0)
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        if self.hess.is_empty() {
            return 0.0;
        }
        let n = dim_from_packed(self.hess.len());
        self.hess[packed_index(n, i, j)]
    }

    /// Dense Hessian padded to `n × n`.
    pub fn hessian(&self, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| self.hess_at(i, j)).collect()).collect()
    }

    /// Solves `F(y) = target` for `y` where `F` is given generically, returning
    /// `y` as a jet in the variables `target` depends on. `guess` must already
    /// be a converged value of the root; two Newton steps in jet arithmetic
    /// then propagate exact first and second derivatives.
    pub fn solve_implicit<F>(target: &Jet2, root: f64, f: F) -> Jet2
    where
        F: Fn(&Jet2) -> (Jet2, Jet2),
    {
        let mut y = Jet2::constant(root);
        for _ in 0..2 {
            let (fy, dfy) = f(&y);
            y = y - (fy - target.clone()) / dfy;
        }
        y
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2({:e}, {:?}, {:?})", self.value, self.grad, self.hess)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

fn outer_sym_into(out: &mut Vec<f64>, a: &[f64], b: &[f64], scale: f64) {
    if a.is_empty() || b.is_empty() || scale == 0.0 {
        return;
    }
    let n = a.len();
    if out.is_empty() {
        out.resize(packed_len(n), 0.0);
    }
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            out[idx] += scale * (a[i] * b[j] + a[j] * b[i]);
            idx += 1;
        }
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        self.value
    }

    fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let grad = scaled(df, &self.grad);
        let mut hess = scaled(df, &self.hess);
        outer_sym_into(&mut hess, &self.grad, &self.grad, 0.5 * d2f);
        Jet2 { value: f, grad, hess }
    }
}

impl Differentiable for Jet2 {
    type Lower = Jet1;

    fn partial(&self, k: usize) -> Jet1 {
        let grad = if self.hess.is_empty() {
            Vec::new()
        } else {
            let n = dim_from_packed(self.hess.len());
            (0..n).map(|j| self.hess[packed_index(n, k, j)]).collect()
        };
        Jet1 { value: self.grad_at(k), grad }
    }

    fn truncate(&self) -> Jet1 {
        Jet1 { value: self.value, grad: self.grad.clone() }
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        self.value += rhs.value;
        axpy(&mut self.grad, 1.0, &rhs.grad);
        axpy(&mut self.hess, 1.0, &rhs.hess);
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        self.value -= rhs.value;
        axpy(&mut self.grad, -1.0, &rhs.grad);
        axpy(&mut self.hess, -1.0, &rhs.hess);
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self += rhs;
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self -= rhs;
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut grad = scaled(rhs.value, &self.grad);
        axpy(&mut grad, self.value, &rhs.grad);
        let mut hess = scaled(rhs.value, &self.hess);
        axpy(&mut hess, self.value, &rhs.hess);
        outer_sym_into(&mut hess, &self.grad, &rhs.grad, 1.0);
        Jet2 { value: self.value * rhs.value, grad, hess }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        if rhs.grad.is_empty() && rhs.hess.is_empty() {
            return self / rhs.value;
        }
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self *= -1.0;
        self
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        self *= rhs;
        self
    }
}

impl MulAssign<f64> for Jet2 {
    fn mul_assign(&mut self, rhs: f64) {
        self.value *= rhs;
        self.grad.iter_mut().for_each(|g| *g *= rhs);
        self.hess.iter_mut().for_each(|h| *h *= rhs);
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}
