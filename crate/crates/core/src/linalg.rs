//! Small dense square matrices over any [`Scalar`].
//!
//! nalgebra's decompositions need `ComplexField`, which jets are not, so the
//! handful of operations the tensor code needs are written out here.

use std::ops::{Index, IndexMut};

use crate::jet::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Row-major data of length `n²`.
    pub fn from_vec(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn values(&self) -> Mat<f64> {
        self.map(|v| v.value())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v.clone() * s)
    }

    pub fn scale_by(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = T::zero();
            for k in 0..n {
                acc += self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.n {
                    acc += self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc += self[(i, i)].clone();
        }
        acc
    }

    /// Largest absolute entry (of the values).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.value().abs()).fold(0.0, f64::max)
    }

    /// LU factorisation with partial pivoting on the values. Returns the
    /// factored matrix, the row permutation and its sign, or `None` when a
    /// pivot is exactly zero.
    fn lu(&self) -> Option<(Self, Vec<usize>, f64)> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[(r, col)].value().abs().total_cmp(&a[(s, col)].value().abs()))?;
            if a[(pivot, col)].value() == 0.0 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                sign = -sign;
            }
            let inv = a[(col, col)].recip();
            for r in (col + 1)..n {
                let factor = a[(r, col)].clone() * inv.clone();
                for j in (col + 1)..n {
                    let t = factor.clone() * a[(col, j)].clone();
                    a[(r, j)] -= t;
                }
                a[(r, col)] = factor;
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> T {
        match self.lu() {
            None => T::zero(),
            Some((a, _, sign)) => {
                let mut d = T::from(sign);
                for i in 0..self.n {
                    d = d * a[(i, i)].clone();
                }
                d
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let (a, perm, _) = self.lu()?;
        Some(lu_solve(&a, &perm, b))
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let (a, perm, _) = self.lu()?;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = lu_solve(&a, &perm, &e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }
}

fn lu_solve<T: Scalar>(a: &Mat<T>, perm: &[usize], b: &[T]) -> Vec<T> {
    let n = a.n;
    let mut y: Vec<T> = perm.iter().map(|&p| b[p].clone()).collect();
    for i in 0..n {
        for k in 0..i {
            let t = a[(i, k)].clone() * y[k].clone();
            y[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = a[(i, k)].clone() * y[k].clone();
            y[i] -= t;
        }
        y[i] = y[i].clone() / a[(i, i)].clone();
    }
    y
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Converts to nalgebra for the f64-only routines (eigenvalues, SVD).
pub fn to_dmatrix(m: &Mat<f64>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.dim(), m.dim(), m.data())
}

pub fn from_dmatrix(m: &nalgebra::DMatrix<f64>) -> Mat<f64> {
    assert_eq!(m.nrows(), m.ncols());
    Mat::from_fn(m.nrows(), |i, j| m[(i, j)])
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.clone() * y.clone();
    }
    acc
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    #[test]
    fn inverse_and_det_f64() {
        let m = Mat::from_vec(3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert!(id.sub(&Mat::identity(3)).max_abs() < 1e-14);
        assert!((m.det() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn det_derivative_matches_jacobi_formula() {
        // d det(A(t)) = det(A) tr(A^{-1} A') for A = [[1+t, 2],[3, 4-t]]
        let t = Jet2::variable(0.3, 0, 1);
        let a = Mat::from_vec(
            2,
            vec![t.clone() + 1.0, Jet2::constant(2.0), Jet2::constant(3.0), -t + 4.0],
        );
        let d = a.det();
        // det = (1+t)(4-t) - 6 = -2 + 3t - t^2
        assert!((d.value - (-2.0 + 0.9 - 0.09)).abs() < 1e-14);
        assert!((d.grad_at(0) - (3.0 - 0.6)).abs() < 1e-14);
        assert!((d.hess_at(0, 0) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Mat::from_vec(2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(m.inverse().is_none() || m.det().abs() < 1e-15);
    }
}
