use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::Mat;
use crate::tensorcalc::{Form, MetricField};

type FirstOrderFn = Arc<dyn Fn(&[f64]) -> Result<Mat<Jet1>> + Send + Sync>;

/// Tolerance on `J² = −Id`.
pub const SQUARE_TOL: f64 = 1e-10;

/// Field of endomorphisms `J` with `J² = −Id`, known to first order.
///
/// First derivatives are all that integrability and closedness tests need, so
/// structures derived from `dX♭` (which lose one jet order) fit here too.
#[derive(Clone)]
pub struct AlmostComplexField {
    chart: Chart,
    f: FirstOrderFn,
}

impl AlmostComplexField {
    /// From a formula in jet arithmetic.
    pub fn new<F>(chart: Chart, f: F) -> Result<Self>
    where
        F: Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync + 'static,
    {
        if chart.dim() % 2 != 0 {
            return Err(GeomError::OddDimension(chart.dim()));
        }
        let c = chart.clone();
        Ok(Self {
            chart,
            f: Arc::new(move |x| {
                c.check(x)?;
                Ok(f(&Jet2::seed(x)).map(|v| v.truncate()))
            }),
        })
    }

    /// From a function already returning first-order data.
    pub fn from_first_order<F>(chart: Chart, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<Mat<Jet1>> + Send + Sync + 'static,
    {
        if chart.dim() % 2 != 0 {
            return Err(GeomError::OddDimension(chart.dim()));
        }
        Ok(Self { chart, f: Arc::new(f) })
    }

    pub fn constant(chart: Chart, j: Mat<f64>) -> Result<Self> {
        let c = chart.clone();
        Self::from_first_order(chart, move |x| {
            c.check(x)?;
            Ok(j.map(|v| Jet1::constant(*v)))
        })
    }

    /// The standard structure on `ℝ²ᵐ` with coordinates `(x₁, y₁, x₂, y₂, …)`,
    /// `J∂x = ∂y`.
    pub fn standard(chart: Chart) -> Result<Self> {
        let n = chart.dim();
        Self::constant(chart, standard_j(n))
    }

    /// Structure `I` determined by a 2-form through `ω(X, Y) = g(IX, Y)`, i.e.
    /// `I = −g⁻¹ω`.
    pub fn from_two_form<F>(g: MetricField, omega: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<Form<Jet1>> + Send + Sync + 'static,
    {
        let chart = g.chart().clone();
        Self::from_first_order(chart, move |x| {
            let jets = g.jets(x)?;
            let w = omega(x)?.to_matrix();
            Ok(structure_from_form(&jets.ginv, &w))
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn eval_first_order(&self, x: &[f64]) -> Result<Mat<Jet1>> {
        (self.f)(x)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Mat<f64>> {
        Ok(self.eval_first_order(x)?.values())
    }

    /// `max |J² + Id|` at `x`.
    pub fn square_residual(&self, x: &[f64]) -> Result<f64> {
        let j = self.eval(x)?;
        Ok(j.mul(&j).add(&Mat::identity(j.dim())).max_abs())
    }
}

/// `I = −g⁻¹W` for `W` the component matrix of `ω`.
pub fn structure_from_form<T: Scalar>(ginv: &Mat<T>, w: &Mat<T>) -> Mat<T> {
    ginv.mul(w).scale(-1.0)
}

/// Component matrix of `ω(X, Y) = g(JX, Y)`, i.e. `Jᵀg`.
pub fn hermitian_form<T: Scalar>(g: &Mat<T>, j: &Mat<T>) -> Mat<T> {
    j.transpose().mul(g)
}

pub fn standard_j(n: usize) -> Mat<f64> {
    let mut j = Mat::zeros(n);
    for a in 0..n / 2 {
        j[(2 * a + 1, 2 * a)] = 1.0;
        j[(2 * a, 2 * a + 1)] = -1.0;
    }
    j
}

/// Max-norm of the Nijenhuis tensor
/// `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]` at `x`.
pub fn nijenhuis(jf: &AlmostComplexField, x: &[f64]) -> Result<f64> {
    let j = jf.eval_first_order(x)?;
    let n = j.dim();
    let jv = j.values();
    let d = |k: usize, a: usize, b: usize| j[(a, b)].partial(k);
    let mut worst = 0.0f64;
    for k in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let mut v = 0.0;
                for l in 0..n {
                    v += jv[(l, a)] * d(l, k, b) - jv[(l, b)] * d(l, k, a);
                    v -= jv[(k, l)] * (d(a, l, b) - d(b, l, a));
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KahlerResiduals {
    /// `max |JᵀgJ − g|`.
    pub hermitian_residual: f64,
    /// `max |dω|` for `ω(X, Y) = g(JX, Y)`.
    pub domega_residual: f64,
}

impl KahlerResiduals {
    pub fn is_kahler(&self, tol: f64) -> bool {
        self.hermitian_residual <= tol && self.domega_residual <= tol
    }
}

pub fn kahler_check(g: &MetricField, jf: &AlmostComplexField, x: &[f64]) -> Result<KahlerResiduals> {
    let gj = g.eval_jet(x)?.map(|v| v.truncate());
    let j = jf.eval_first_order(x)?;
    let gv = gj.values();
    let jv = j.values();
    let hermitian_residual = jv.transpose().mul(&gv).mul(&jv).sub(&gv).max_abs();
    let omega = Form::from_matrix(&hermitian_form(&gj, &j));
    let domega_residual = omega.exterior_derivative().max_abs();
    Ok(KahlerResiduals { hermitian_residual, domega_residual })
}

/// Residual of the derivation action `ω ↦ ω(J·, ·) + ω(·, J·)`, which
/// vanishes exactly when `ω` has type (1,1) for `J`. Returns the max-norm of
/// `JᵀW + WJ`.
pub fn type11_test(omega: &Form<f64>, j: &Mat<f64>) -> f64 {
    let w = omega.to_matrix();
    j.transpose().mul(&w).add(&w.mul(j)).max_abs()
}
