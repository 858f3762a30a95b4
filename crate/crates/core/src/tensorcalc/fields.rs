use std::sync::Arc;

use crate::chart::Chart;
use crate::error::Result;
use crate::jet::{Jet2, Scalar};
use crate::linalg::Mat;

type ScalarFn = Arc<dyn Fn(&[Jet2]) -> Jet2 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;
type MatrixFn = Arc<dyn Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync>;

/// Real function on a chart, evaluable in jet arithmetic.
#[derive(Clone)]
pub struct ScalarField {
    chart: Chart,
    f: ScalarFn,
}

impl ScalarField {
    pub fn new<F>(chart: Chart, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static,
    {
        Self { chart, f: Arc::new(f) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet2> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::seed(x)))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::constants(x)).value())
    }

    /// Evaluates on caller-supplied jets (no domain check), for composing
    /// fields inside other jet formulas.
    pub fn apply(&self, x: &[Jet2]) -> Jet2 {
        (self.f)(x)
    }
}

/// Vector field `X = Xⁱ ∂ᵢ` on a chart.
#[derive(Clone)]
pub struct VectorField {
    chart: Chart,
    f: VectorFn,
}

impl VectorField {
    pub fn new<F>(chart: Chart, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
    {
        Self { chart, f: Arc::new(f) }
    }

    /// The coordinate field `∂/∂x_k`.
    pub fn coordinate(chart: Chart, k: usize) -> Self {
        let n = chart.dim();
        Self::new(chart, move |_| {
            let mut v = vec![Jet2::constant(0.0); n];
            v[k] = Jet2::constant(1.0);
            v
        })
    }

    pub fn zero(chart: Chart) -> Self {
        let n = chart.dim();
        Self::new(chart, move |_| vec![Jet2::constant(0.0); n])
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::seed(x)))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::constants(x)).iter().map(|v| v.value()).collect())
    }

    pub fn apply(&self, x: &[Jet2]) -> Vec<Jet2> {
        (self.f)(x)
    }
}

/// Endomorphism field `A = Aⁱⱼ ∂ᵢ ⊗ dxʲ`, stored with `A[(i, j)] = Aⁱⱼ`.
#[derive(Clone)]
pub struct EndomorphismField {
    chart: Chart,
    f: MatrixFn,
}

impl EndomorphismField {
    pub fn new<F>(chart: Chart, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync + 'static,
    {
        Self { chart, f: Arc::new(f) }
    }

    pub fn constant(chart: Chart, m: Mat<f64>) -> Self {
        Self::new(chart, move |_| m.map(|v| Jet2::constant(*v)))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Mat<Jet2>> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::seed(x)))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Mat<f64>> {
        self.chart.check(x)?;
        Ok((self.f)(&Jet2::constants(x)).values())
    }

    pub fn apply(&self, x: &[Jet2]) -> Mat<Jet2> {
        (self.f)(x)
    }
}
