//! Differential forms stored as fully antisymmetric component arrays.
//!
//! A p-form on an n-dimensional chart keeps all nᵖ components
//! `ω[i₁…iₚ]` with `ω = Σ_{i₁<…<iₚ} ω[i₁…iₚ] dx^{i₁}∧…∧dx^{iₚ}`, so that
//! `ω(X₁,…,Xₚ) = Σ ω[i₁…iₚ] X₁^{i₁}…Xₚ^{iₚ}` summed over all indices.

use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::Mat;

/// Increasing index tuples of length `p` drawn from `0..n`, lexicographic.
pub fn combinations(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

/// All permutations of `0..p` with their signs.
pub fn signed_permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(items: &mut Vec<usize>, k: usize, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k == items.len() {
            out.push((items.clone(), sign));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, if i == k { sign } else { -sign }, out);
            items.swap(k, i);
        }
    }
    let mut items: Vec<usize> = (0..p).collect();
    let mut out = Vec::new();
    rec(&mut items, 0, 1.0, &mut out);
    out
}

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats.
pub fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            } else if idx[j] == idx[j + 1] {
                return None;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form<T> {
    n: usize,
    p: usize,
    c: Vec<T>,
}

impl<T: Scalar> Form<T> {
    pub fn zeros(n: usize, p: usize) -> Self {
        Self { n, p, c: vec![T::zero(); n.pow(p as u32)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.c[self.flat(idx)]
    }

    /// Sets the component on an increasing tuple and fills all its
    /// permutations with the matching sign.
    pub fn set(&mut self, idx: &[usize], v: T) {
        let mut sorted = idx.to_vec();
        let Some(sign) = sort_sign(&mut sorted) else {
            return;
        };
        let v = if sign < 0.0 { -v } else { v };
        for (perm, s) in signed_permutations(self.p) {
            let permuted: Vec<usize> = perm.iter().map(|&k| sorted[k]).collect();
            let f = self.flat(&permuted);
            self.c[f] = if s > 0.0 { v.clone() } else { -v.clone() };
        }
    }

    /// Builds a form from its components on increasing tuples, in the order
    /// of [`combinations`].
    pub fn from_strict(n: usize, p: usize, strict: Vec<T>) -> Self {
        let combos = combinations(n, p);
        assert_eq!(combos.len(), strict.len(), "wrong number of strict components");
        let mut f = Self::zeros(n, p);
        for (idx, v) in combos.iter().zip(strict) {
            f.set(idx, v);
        }
        f
    }

    pub fn strict_components(&self) -> Vec<T> {
        combinations(self.n, self.p).iter().map(|i| self.get(i).clone()).collect()
    }

    /// Covector from components.
    pub fn one_form(c: Vec<T>) -> Self {
        let n = c.len();
        Self { n, p: 1, c }
    }

    pub fn components(&self) -> &[T] {
        &self.c
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Form<U> {
        Form { n: self.n, p: self.p, c: self.c.iter().map(f).collect() }
    }

    pub fn values(&self) -> Form<f64> {
        self.map(|v| v.value())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.p), (o.n, o.p));
        Self { n: self.n, p: self.p, c: self.c.iter().zip(&o.c).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.p), (o.n, o.p));
        Self { n: self.n, p: self.p, c: self.c.iter().zip(&o.c).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v.clone() * s)
    }

    pub fn scale_by(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|v| v.value().abs()).fold(0.0, f64::max)
    }

    /// Interior product `i_X ω`.
    pub fn interior(&self, x: &[T]) -> Form<T> {
        assert!(self.p >= 1);
        let inner = self.n.pow((self.p - 1) as u32);
        let mut c = vec![T::zero(); inner];
        for (k, xk) in x.iter().enumerate() {
            for (j, cj) in c.iter_mut().enumerate() {
                *cj += xk.clone() * self.c[k * inner + j].clone();
            }
        }
        Form { n: self.n, p: self.p - 1, c }
    }

    /// Evaluates a 1-form on a vector.
    pub fn apply(&self, x: &[T]) -> T {
        assert_eq!(self.p, 1);
        crate::linalg::dot(&self.c, x)
    }

    pub fn wedge(&self, o: &Form<T>) -> Form<T> {
        assert_eq!(self.n, o.n);
        let (p, q) = (self.p, o.p);
        let n = self.n;
        let mut out = Form::zeros(n, p + q);
        if p + q > n {
            return out;
        }
        let perms = signed_permutations(p + q);
        let norm = (1..=p).product::<usize>() as f64 * (1..=q).product::<usize>() as f64;
        for idx in combinations(n, p + q) {
            let mut acc = T::zero();
            for (perm, s) in &perms {
                let a: Vec<usize> = perm[..p].iter().map(|&k| idx[k]).collect();
                let b: Vec<usize> = perm[p..].iter().map(|&k| idx[k]).collect();
                let term = self.get(&a).clone() * o.get(&b).clone();
                if *s > 0.0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            out.set(&idx, acc / norm);
        }
        out
    }

    /// 2-form as its antisymmetric component matrix `W[i][j] = ω[i j]`.
    pub fn to_matrix(&self) -> Mat<T> {
        assert_eq!(self.p, 2);
        Mat::from_vec(self.n, self.c.clone())
    }

    pub fn from_matrix(m: &Mat<T>) -> Self {
        let n = m.dim();
        let mut f = Self::zeros(n, 2);
        for i in 0..n {
            for j in (i + 1)..n {
                f.set(&[i, j], (m[(i, j)].clone() - m[(j, i)].clone()) * 0.5);
            }
        }
        f
    }

    /// Pointwise inner product `Σ_{I increasing} α_I β^I` using `ginv` to
    /// raise indices. For p = 2 in an orthonormal frame, `|e¹∧e²|² = 1`.
    pub fn inner(&self, o: &Form<T>, ginv: &Mat<T>) -> T {
        assert_eq!((self.p, self.n), (o.p, o.n));
        match self.p {
            0 => self.c[0].clone() * o.c[0].clone(),
            1 => {
                let mut acc = T::zero();
                for i in 0..self.n {
                    for j in 0..self.n {
                        acc += ginv[(i, j)].clone() * self.c[i].clone() * o.c[j].clone();
                    }
                }
                acc
            }
            2 => {
                let n = self.n;
                // raise both indices of o
                let w = o.to_matrix();
                let raised = ginv.mul(&w).mul(ginv);
                let mut acc = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += self.c[i * n + j].clone() * raised[(i, j)].clone();
                    }
                }
                acc * 0.5
            }
            _ => unimplemented!("inner product only needed for degree ≤ 2"),
        }
    }
}

impl<D: Differentiable> Form<D> {
    /// Exterior derivative, one derivative order lower than the input.
    pub fn exterior_derivative(&self) -> Form<D::Lower> {
        let n = self.n;
        let p = self.p;
        let mut out = Form::<D::Lower>::zeros(n, p + 1);
        if p + 1 > n {
            return out;
        }
        for idx in combinations(n, p + 1) {
            let mut acc = D::Lower::zero();
            for k in 0..=p {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect();
                let term = self.get(&rest).partial(idx[k]);
                if k % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            out.set(&idx, acc);
        }
        out
    }

    pub fn truncate(&self) -> Form<D::Lower> {
        Form { n: self.n, p: self.p, c: self.c.iter().map(|v| v.truncate()).collect() }
    }
}

type FormFn = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;

/// A p-form field whose components (on increasing index tuples, in
/// [`combinations`] order) are evaluable in [`Jet2`] arithmetic.
#[derive(Clone)]
pub struct FormField {
    chart: Chart,
    degree: usize,
    strict: FormFn,
}

impl FormField {
    pub fn new<F>(chart: Chart, degree: usize, strict: F) -> Self
    where
        F: Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
    {
        Self { chart, degree, strict: Arc::new(strict) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Form<Jet2>> {
        self.chart.check(x)?;
        let seeded = Jet2::seed(x);
        let strict = (self.strict)(&seeded);
        let expected = combinations(self.chart.dim(), self.degree).len();
        if strict.len() != expected {
            return Err(GeomError::DimensionMismatch { expected, got: strict.len() });
        }
        Ok(Form::from_strict(self.chart.dim(), self.degree, strict))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Form<f64>> {
        Ok(self.eval_jet(x)?.values())
    }

    /// Components on caller-supplied jets (no domain check).
    pub fn apply(&self, x: &[Jet2]) -> Form<Jet2> {
        Form::from_strict(self.chart.dim(), self.degree, (self.strict)(x))
    }
}

/// `dω` at `x`, carrying its own first derivatives so `d(dω)` can be read off.
pub fn ext_d(form: &FormField, x: &[f64]) -> Result<Form<Jet1>> {
    Ok(form.eval_jet(x)?.exterior_derivative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_of_one_forms_is_antisymmetric() {
        let a = Form::one_form(vec![1.0, 2.0, 0.0]);
        let b = Form::one_form(vec![0.0, 1.0, 3.0]);
        let w = a.wedge(&b);
        assert_eq!(*w.get(&[0, 1]), 1.0);
        assert_eq!(*w.get(&[1, 0]), -1.0);
        assert_eq!(*w.get(&[1, 2]), 6.0);
        assert_eq!(*w.get(&[0, 2]), 3.0);
        let ww = w.wedge(&a);
        assert!(ww.max_abs() < 1e-15);
    }

    #[test]
    fn volume_from_wedges() {
        let e = |i: usize| {
            let mut c = vec![0.0; 4];
            c[i] = 1.0;
            Form::one_form(c)
        };
        let vol = e(0).wedge(&e(1)).wedge(&e(2)).wedge(&e(3));
        assert_eq!(*vol.get(&[0, 1, 2, 3]), 1.0);
        assert_eq!(*vol.get(&[1, 0, 2, 3]), -1.0);
        let w = e(0).wedge(&e(1)).add(&e(2).wedge(&e(3)));
        // ω∧ω = 2 e0123 for ω = e01 + e23
        assert_eq!(*w.wedge(&w).get(&[0, 1, 2, 3]), 2.0);
    }

    #[test]
    fn interior_product_of_dx_dy() {
        let w = Form::from_strict(2, 2, vec![1.0]);
        let i = w.interior(&[1.0, 0.0]);
        assert_eq!(i.components(), &[0.0, 1.0]);
    }

    #[test]
    fn d_of_exact_is_zero() {
        let chart = Chart::euclidean("r3", 3);
        // α = d(x0 x1 sin x2)
        let f = FormField::new(chart, 1, |x| {
            let s = x[2].sin();
            vec![x[1].clone() * s.clone(), x[0].clone() * s, x[0].clone() * x[1].clone() * x[2].cos()]
        });
        let d = ext_d(&f, &[0.3, -0.7, 1.1]).unwrap();
        assert!(d.values().max_abs() < 1e-15);
    }

    #[test]
    fn sort_sign_detects_repeats() {
        assert_eq!(sort_sign(&mut [2, 0, 1]), Some(1.0));
        assert_eq!(sort_sign(&mut [1, 0]), Some(-1.0));
        assert_eq!(sort_sign(&mut [1, 1]), None);
    }
}
