use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::{to_dmatrix, Mat};

/// Relative determinant below which a metric counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Default tolerance for identities that hold exactly in exact arithmetic.
pub const DERIV_TOL: f64 = 1e-8;

type MetricFn = Arc<dyn Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync>;

/// Symmetric bilinear form field `g_ij(x)`.
#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    signature: (usize, usize),
    components: MetricFn,
}

/// A metric evaluated at a point together with its first derivatives, all
/// carrying one further derivative order.
#[derive(Clone, Debug)]
pub struct MetricJets {
    pub g: Mat<Jet1>,
    pub ginv: Mat<Jet1>,
    /// `dg[k] = ∂_k g`.
    pub dg: Vec<Mat<Jet1>>,
}

impl MetricJets {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn values(&self) -> Mat<f64> {
        self.g.values()
    }

    pub fn inverse_values(&self) -> Mat<f64> {
        self.ginv.values()
    }

    /// `√|det g|` with its gradient.
    pub fn volume_density(&self) -> Jet1 {
        let d = self.g.det();
        let sign = d.value().signum();
        (d * sign).sqrt()
    }
}

impl MetricField {
    pub fn new<F>(chart: Chart, signature: (usize, usize), f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync + 'static,
    {
        assert_eq!(signature.0 + signature.1, chart.dim(), "signature must sum to the dimension");
        Self { chart, signature, components: Arc::new(f) }
    }

    pub fn riemannian<F>(chart: Chart, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync + 'static,
    {
        let n = chart.dim();
        Self::new(chart, (n, 0), f)
    }

    /// Diagonal metric from its diagonal entries.
    pub fn diagonal<F>(chart: Chart, f: F) -> Self
    where
        F: Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
    {
        let n = chart.dim();
        Self::riemannian(chart, move |x| {
            let d = f(x);
            let mut m = Mat::zeros(n);
            for (i, v) in d.into_iter().enumerate() {
                m[(i, i)] = v;
            }
            m
        })
    }

    pub fn euclidean(chart: Chart) -> Self {
        let n = chart.dim();
        Self::riemannian(chart, move |_| Mat::identity(n))
    }

    /// Metric `e^{2f} g` for a conformal exponent given in jet arithmetic.
    pub fn conformal<F>(&self, exponent: F) -> Self
    where
        F: Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static,
    {
        let base = self.components.clone();
        Self {
            chart: self.chart.clone(),
            signature: self.signature,
            components: Arc::new(move |x| {
                let factor = (exponent(x) * 2.0).exp();
                base(x).scale_by(&factor)
            }),
        }
    }

    /// Constant multiple `s·g`.
    pub fn scaled(&self, s: f64) -> Self {
        let base = self.components.clone();
        Self {
            chart: self.chart.clone(),
            signature: self.signature,
            components: Arc::new(move |x| base(x).scale(s)),
        }
    }

    /// Same components on a different chart of the same dimension (for
    /// tightening or renaming the domain).
    pub fn on_chart(&self, chart: Chart) -> Self {
        assert_eq!(chart.dim(), self.dim());
        Self { chart, signature: self.signature, components: self.components.clone() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Components on caller-supplied jets (no domain check).
    pub fn apply(&self, x: &[Jet2]) -> Mat<Jet2> {
        (self.components)(x)
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Mat<Jet2>> {
        self.chart.check(x)?;
        Ok((self.components)(&Jet2::seed(x)))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Mat<f64>> {
        self.chart.check(x)?;
        let g = (self.components)(&Jet2::constants(x)).values();
        check_nondegenerate(&g)?;
        Ok(g)
    }

    /// Value, inverse and first derivatives of `g` at `x`, each with one more
    /// derivative order attached.
    pub fn jets(&self, x: &[f64]) -> Result<MetricJets> {
        let raw = self.eval_jet(x)?;
        jets_from_raw(&raw, self.dim())
    }

    /// Checks that the eigenvalue sign counts match the declared signature.
    pub fn signature_holds(&self, x: &[f64]) -> Result<bool> {
        let g = self.eval(x)?;
        let eig = nalgebra::SymmetricEigen::new(to_dmatrix(&g));
        let pos = eig.eigenvalues.iter().filter(|v| **v > 0.0).count();
        let neg = eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
        Ok((pos, neg) == self.signature)
    }
}

pub(crate) fn jets_from_raw(raw: &Mat<Jet2>, n: usize) -> Result<MetricJets> {
    let g = raw.map(|v| v.truncate());
    check_nondegenerate(&g.values())?;
    let ginv = g.inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
    let dg = (0..n).map(|k| raw.map(|v| v.partial(k))).collect();
    Ok(MetricJets { g, ginv, dg })
}

/// Relative determinant `|det g| / Π‖row‖`.
pub fn relative_det(g: &Mat<f64>) -> f64 {
    let n = g.dim();
    let norms: f64 = (0..n)
        .map(|i| (0..n).map(|j| g[(i, j)] * g[(i, j)]).sum::<f64>().sqrt())
        .product();
    if norms == 0.0 {
        0.0
    } else {
        g.det().abs() / norms
    }
}

pub fn check_nondegenerate(g: &Mat<f64>) -> Result<()> {
    let rel = relative_det(g);
    if !(rel > DEGENERACY_TOL) {
        return Err(GeomError::DegenerateMetric { rel_det: rel });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_metric_is_rejected() {
        let chart = Chart::euclidean("r2", 2);
        let g = MetricField::diagonal(chart, |x| vec![x[0].clone() * x[0].clone(), Jet2::constant(1.0)]);
        assert!(matches!(g.jets(&[0.0, 1.0]), Err(GeomError::DegenerateMetric { .. })));
        assert!(g.jets(&[0.5, 1.0]).is_ok());
    }

    #[test]
    fn signature_bookkeeping() {
        let chart = Chart::euclidean("r2", 2);
        let g = MetricField::new(chart, (1, 1), |_| {
            Mat::from_vec(2, vec![Jet2::constant(1.0), Jet2::constant(0.0), Jet2::constant(0.0), Jet2::constant(-1.0)])
        });
        assert!(g.signature_holds(&[0.0, 0.0]).unwrap());
    }

    #[test]
    fn conformal_rescaling() {
        let chart = Chart::euclidean("r2", 2);
        let g = MetricField::euclidean(chart).conformal(|x| x[0].clone());
        let v = g.eval(&[0.5, 0.0]).unwrap();
        assert!((v[(0, 0)] - 1f64.exp()).abs() < 1e-14);
    }
}
