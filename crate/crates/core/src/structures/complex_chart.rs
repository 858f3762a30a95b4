use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::Mat;
use crate::tensorcalc::{Form, MetricField, ScalarField};

use super::almost_complex::AlmostComplexField;

type HermitianFn = Arc<dyn Fn(&[Jet2]) -> (Mat<Jet2>, Mat<Jet2>) + Send + Sync>;

/// Hermitian metric `g = Re Σ h_{αβ̄} dz_α dz̄_β` on a complex chart with real
/// coordinates `(x₁, y₁, x₂, y₂, …)`, `z_α = x_α + i y_α`.
///
/// The Kähler form is `ω = (i/2) Σ h_{αβ̄} dz_α∧dz̄_β`, so `h = δ` gives
/// `Σ dx∧dy`.
#[derive(Clone)]
pub struct ComplexChartMetric {
    chart: Chart,
    m: usize,
    h: HermitianFn,
}

impl ComplexChartMetric {
    /// `h` returns the real and imaginary parts of `h_{αβ̄}`.
    pub fn new<F>(chart: Chart, h: F) -> Result<Self>
    where
        F: Fn(&[Jet2]) -> (Mat<Jet2>, Mat<Jet2>) + Send + Sync + 'static,
    {
        if chart.dim() % 2 != 0 {
            return Err(GeomError::OddDimension(chart.dim()));
        }
        Ok(Self { m: chart.dim() / 2, chart, h: Arc::new(h) })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn complex_dim(&self) -> usize {
        self.m
    }

    /// `(Re h, Im h)` at `x`.
    pub fn hermitian(&self, x: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
        self.chart.check(x)?;
        let (a, b) = (self.h)(&Jet2::constants(x));
        Ok((a.values(), b.values()))
    }

    /// Max of the Hermitian-symmetry residuals `|A − Aᵀ|`, `|B + Bᵀ|`.
    pub fn hermitian_residual(&self, x: &[f64]) -> Result<f64> {
        let (a, b) = self.hermitian(x)?;
        Ok(a.sub(&a.transpose()).max_abs().max(b.add(&b.transpose()).max_abs()))
    }

    /// The underlying Riemannian metric on the real chart.
    pub fn metric(&self) -> MetricField {
        let h = self.h.clone();
        MetricField::riemannian(self.chart.clone(), move |x| {
            let (a, b) = h(x);
            realify(&a, &b)
        })
    }

    pub fn complex_structure(&self) -> Result<AlmostComplexField> {
        AlmostComplexField::standard(self.chart.clone())
    }

    pub fn kahler_form(&self, x: &[f64]) -> Result<Form<f64>> {
        let (a, b) = self.hermitian(x)?;
        Ok(i_hermitian_form(&a.scale(0.5), &b.scale(0.5)))
    }

    /// `log det h` as a jet, via `det(realified g) = (det h)²`.
    fn log_det(&self, x: &[Jet2]) -> Jet2 {
        let (a, b) = (self.h)(x);
        realify(&a, &b).det().ln() * 0.5
    }

    /// Components `ρ_{αβ̄}` of `ρ = i Σ ρ_{αβ̄} dz_α∧dz̄_β = −i∂∂̄ log det h`.
    pub fn ricci_coefficients(&self, x: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
        self.chart.check(x)?;
        let f = self.log_det(&Jet2::seed(x));
        let (a, b) = ddbar_coefficients(&f, self.m);
        Ok((a.scale(-1.0), b.scale(-1.0)))
    }

    /// Kähler-normalised scalar curvature `Σ g^{αβ̄} ρ_{αβ̄}` with
    /// `g_{αβ̄} = g(∂_α, ∂̄_β) = h/2`. Equals half the Riemannian scalar
    /// curvature when the metric is Kähler.
    pub fn kahler_trace_scalar(&self, x: &[f64]) -> Result<f64> {
        let (ha, hb) = self.hermitian(x)?;
        let (ra, rb) = self.ricci_coefficients(x)?;
        let m = self.m;
        let gc = DMatrix::from_fn(m, m, |i, j| Complex64::new(ha[(i, j)], hb[(i, j)]) * 0.5);
        let rc = DMatrix::from_fn(m, m, |i, j| Complex64::new(ra[(i, j)], rb[(i, j)]));
        let inv = gc.try_inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
        Ok((inv * rc).trace().re)
    }
}

/// Real `2m × 2m` metric of `Re Σ h dz dz̄` in interleaved coordinates.
pub fn realify<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let m = a.dim();
    Mat::from_fn(2 * m, |r, s| {
        let (al, ra) = (r / 2, r % 2);
        let (be, sb) = (s / 2, s % 2);
        match (ra, sb) {
            (0, 0) | (1, 1) => a[(al, be)].clone(),
            (0, 1) => b[(al, be)].clone(),
            _ => -b[(al, be)].clone(),
        }
    })
}

/// Real 2-form `i Σ H_{αβ̄} dz_α∧dz̄_β` for Hermitian `H = A + iB`.
pub fn i_hermitian_form(a: &Mat<f64>, b: &Mat<f64>) -> Form<f64> {
    let m = a.dim();
    let mut w = Mat::zeros(2 * m);
    for al in 0..m {
        for be in 0..m {
            let (xa, ya, xb, yb) = (2 * al, 2 * al + 1, 2 * be, 2 * be + 1);
            w[(xa, yb)] = 2.0 * a[(al, be)];
            w[(ya, xb)] = -2.0 * a[(al, be)];
            w[(xa, xb)] = -2.0 * b[(al, be)];
            w[(ya, yb)] = -2.0 * b[(al, be)];
        }
    }
    Form::from_matrix(&w)
}

/// `(Re, Im)` of `∂_α∂̄_β f = ¼(f_{xx} + f_{yy} + i(f_{x_α y_β} − f_{y_α x_β}))`.
fn ddbar_coefficients(f: &Jet2, m: usize) -> (Mat<f64>, Mat<f64>) {
    let hs = |i: usize, j: usize| f.hess_at(i, j);
    let a = Mat::from_fn(m, |al, be| 0.25 * (hs(2 * al, 2 * be) + hs(2 * al + 1, 2 * be + 1)));
    let b = Mat::from_fn(m, |al, be| 0.25 * (hs(2 * al, 2 * be + 1) - hs(2 * al + 1, 2 * be)));
    (a, b)
}

/// `i∂∂̄f` for the standard complex structure of an interleaved chart.
pub fn i_ddbar(f: &ScalarField, x: &[f64]) -> Result<Form<f64>> {
    let n = f.chart().dim();
    if n % 2 != 0 {
        return Err(GeomError::OddDimension(n));
    }
    let (a, b) = ddbar_coefficients(&f.eval_jet(x)?, n / 2);
    Ok(i_hermitian_form(&a, &b))
}

/// Ricci form `ρ = −i∂∂̄ log det h` as a real 2-form.
pub fn ricci_form(h: &ComplexChartMetric, x: &[f64]) -> Result<Form<f64>> {
    let (a, b) = h.ricci_coefficients(x)?;
    Ok(i_hermitian_form(&a, &b))
}

/// `i∂∂̄f = −½ d(df∘I)` for an integrable `I` on any chart.
pub fn i_ddbar_general(f: &ScalarField, i: &AlmostComplexField, x: &[f64]) -> Result<Form<f64>> {
    let fj = f.eval_jet(x)?;
    let n = f.chart().dim();
    let im = i.eval_first_order(x)?;
    let df: Vec<Jet1> = (0..n).map(|k| fj.partial(k)).collect();
    let comp: Vec<Jet1> = (0..n)
        .map(|j| {
            let mut acc = Jet1::constant(0.0);
            for (k, dk) in df.iter().enumerate() {
                acc += dk.clone() * im[(k, j)].clone();
            }
            acc
        })
        .collect();
    Ok(Form::one_form(comp).exterior_derivative().scale(-0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PotentialReport {
    /// Least-squares scale `s` in `i∂∂̄f ≈ s·ω`.
    pub scale: f64,
    /// `max |i∂∂̄f − s·ω|`.
    pub residual: f64,
}

/// Compares `i∂∂̄f` with a target 2-form, allowing one global scale.
pub fn kahler_potential_check(
    f: &ScalarField,
    i: &AlmostComplexField,
    target: &Form<f64>,
    x: &[f64],
) -> Result<PotentialReport> {
    let lhs = i_ddbar_general(f, i, x)?;
    let dot = |u: &Form<f64>, v: &Form<f64>| -> f64 {
        u.components().iter().zip(v.components()).map(|(a, b)| a * b).sum()
    };
    let tt = dot(target, target);
    if tt == 0.0 {
        return Err(GeomError::Invalid("target form vanishes".into()));
    }
    let scale = dot(&lhs, target) / tt;
    let residual = lhs.sub(&target.scale(scale)).max_abs();
    Ok(PotentialReport { scale, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::almost_complex::hermitian_form;
    use crate::tensorcalc::curvature::metric_curvature;

    fn fubini_study() -> ComplexChartMetric {
        ComplexChartMetric::new(Chart::euclidean("cp1", 2), |x| {
            let s = x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone() + 1.0;
            let h = (s.clone() * s).recip();
            (Mat::from_vec(1, vec![h]), Mat::zeros(1))
        })
        .unwrap()
    }

    #[test]
    fn flat_kahler_form_and_potential() {
        let c = Chart::euclidean("c1", 2);
        let flat = ComplexChartMetric::new(c.clone(), |_| (Mat::identity(1), Mat::zeros(1))).unwrap();
        let w = flat.kahler_form(&[0.2, 0.3]).unwrap();
        assert_eq!(*w.get(&[0, 1]), 1.0);
        assert_eq!(ricci_form(&flat, &[0.2, 0.3]).unwrap().max_abs(), 0.0);
        let f = ScalarField::new(c.clone(), |x| x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone());
        let target = w.scale(2.0);
        let i = AlmostComplexField::standard(c).unwrap();
        let rep = kahler_potential_check(&f, &i, &target, &[0.2, 0.3]).unwrap();
        assert!((rep.scale - 1.0).abs() < 1e-12 && rep.residual < 1e-12);
        assert!(i_ddbar(&f, &[0.2, 0.3]).unwrap().sub(&target).max_abs() < 1e-12);
    }

    #[test]
    fn fubini_study_ricci_matches_riemannian() {
        let fs = fubini_study();
        let x = [0.4, -0.7];
        let rho = ricci_form(&fs, &x).unwrap();
        let w = fs.kahler_form(&x).unwrap();
        // curvature-4 sphere: Ric = 4g so ρ = 4ω
        assert!(rho.sub(&w.scale(4.0)).max_abs() < 1e-12);
        let curv = metric_curvature(&fs.metric(), &x).unwrap();
        let j = crate::structures::standard_j(2);
        let from_ric = Form::from_matrix(&hermitian_form(&curv.ricci, &j));
        assert!(from_ric.sub(&rho).max_abs() < 1e-12);
        let r = fs.kahler_trace_scalar(&x).unwrap();
        assert!((r - curv.scalar / 2.0).abs() < 1e-12);
    }
}
