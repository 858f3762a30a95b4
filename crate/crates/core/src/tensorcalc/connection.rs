use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Jet1, Scalar};
use crate::linalg::Mat;

use super::metric::{MetricField, MetricJets};

/// Christoffel coefficients `Γᵏᵢⱼ` at a point, `∇_{∂ᵢ}∂ⱼ = Γᵏᵢⱼ ∂ₖ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<T = f64> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Christoffel<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.n + i) * self.n + j
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &T {
        &self.data[self.idx(k, i, j)]
    }

    pub fn get_mut(&mut self, k: usize, i: usize, j: usize) -> &mut T {
        let ix = self.idx(k, i, j);
        &mut self.data[ix]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn values(&self) -> Christoffel<f64> {
        Christoffel { n: self.n, data: self.data.iter().map(|v| v.value()).collect() }
    }

    /// `Γᵏᵢⱼ − Γᵏⱼᵢ`.
    pub fn torsion(&self) -> Christoffel<T> {
        let n = self.n;
        let mut t = Christoffel::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    *t.get_mut(k, i, j) = self.get(k, i, j).clone() - self.get(k, j, i).clone();
                }
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.value().abs()).fold(0.0, f64::max)
    }

    /// The matrix `(A_Z)ᵏⱼ = Zⁱ Γᵏᵢⱼ`, so `∇_Z Y = Z(Y) + A_Z Y`.
    pub fn contract_direction(&self, z: &[T]) -> Mat<T> {
        let n = self.n;
        Mat::from_fn(n, |k, j| {
            let mut acc = T::zero();
            for (i, zi) in z.iter().enumerate() {
                acc += zi.clone() * self.get(k, i, j).clone();
            }
            acc
        })
    }
}

impl Christoffel<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff(&self.data, &other.data)
    }
}

/// An affine connection on a chart.
pub trait Connection: Send + Sync {
    fn chart(&self) -> &Chart;

    fn gamma(&self, x: &[f64]) -> Result<Christoffel>;

    /// Coefficients with their first derivatives; needed for curvature.
    fn gamma_jet(&self, _x: &[f64]) -> Result<Christoffel<Jet1>> {
        Err(GeomError::DerivativeUnavailable("connection coefficient derivative"))
    }

    fn dim(&self) -> usize {
        self.chart().dim()
    }
}

/// `Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢ g_lj + ∂ⱼ g_li − ∂_l g_ij)`.
pub fn christoffel_from<T: Scalar>(ginv: &Mat<T>, dg: &[Mat<T>]) -> Christoffel<T> {
    let n = ginv.dim();
    // lowered: Γ_lij
    let mut lowered = vec![T::zero(); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = (dg[i][(l, j)].clone() + dg[j][(l, i)].clone() - dg[l][(i, j)].clone()) * 0.5;
                lowered[(l * n + i) * n + j] = v.clone();
                lowered[(l * n + j) * n + i] = v;
            }
        }
    }
    let mut out = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for l in 0..n {
                    acc += ginv[(k, l)].clone() * lowered[(l * n + i) * n + j].clone();
                }
                *out.get_mut(k, j, i) = acc.clone();
                *out.get_mut(k, i, j) = acc;
            }
        }
    }
    out
}

/// The Levi-Civita connection of a metric.
#[derive(Clone)]
pub struct LeviCivita {
    metric: MetricField,
}

impl LeviCivita {
    pub fn new(metric: MetricField) -> Self {
        Self { metric }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }
}

impl Connection for LeviCivita {
    fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    fn gamma(&self, x: &[f64]) -> Result<Christoffel> {
        Ok(self.gamma_jet(x)?.values())
    }

    fn gamma_jet(&self, x: &[f64]) -> Result<Christoffel<Jet1>> {
        let jets = self.metric.jets(x)?;
        Ok(christoffel_from(&jets.ginv, &jets.dg))
    }
}

/// Christoffel symbols of the Levi-Civita connection of `g` at `x`.
pub fn levi_civita(g: &MetricField, x: &[f64]) -> Result<Christoffel> {
    LeviCivita::new(g.clone()).gamma(x)
}

/// `(∇_k g)_ij = ∂_k g_ij − Γˡ_ki g_lj − Γˡ_kj g_il` for a given connection.
pub fn metric_covariant_derivative(jets: &MetricJets, gamma: &Christoffel) -> Vec<Mat<f64>> {
    let n = jets.dim();
    let g = jets.values();
    (0..n)
        .map(|k| {
            Mat::from_fn(n, |i, j| {
                let mut v = jets.dg[k][(i, j)].value();
                for l in 0..n {
                    v -= gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)];
                }
                v
            })
        })
        .collect()
}

/// Connection given directly by a coefficient function, mostly for tests and
/// for tabulated data read back from reports.
pub struct ExplicitConnection<F> {
    chart: Chart,
    f: F,
}

impl<F> ExplicitConnection<F>
where
    F: Fn(&[f64]) -> Christoffel + Send + Sync,
{
    pub fn new(chart: Chart, f: F) -> Self {
        Self { chart, f }
    }
}

impl<F> Connection for ExplicitConnection<F>
where
    F: Fn(&[f64]) -> Christoffel + Send + Sync,
{
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn gamma(&self, x: &[f64]) -> Result<Christoffel> {
        self.chart.check(x)?;
        Ok((self.f)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    #[test]
    fn flat_metric_has_vanishing_symbols() {
        let g = MetricField::euclidean(Chart::euclidean("r4", 4));
        let gamma = levi_civita(&g, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(gamma.max_abs(), 0.0);
    }

    #[test]
    fn polar_coordinates() {
        let chart = Chart::new("polar", &["r", "t"], |x| x[0] > 0.0);
        let g = MetricField::diagonal(chart, |x| vec![Jet2::constant(1.0), x[0].clone() * x[0].clone()]);
        let gamma = levi_civita(&g, &[2.0, 0.3]).unwrap();
        // Γ^r_tt = -r, Γ^t_rt = 1/r
        assert!((gamma.get(0, 1, 1) + 2.0).abs() < 1e-15);
        assert!((gamma.get(1, 0, 1) - 0.5).abs() < 1e-15);
        assert_eq!(gamma.torsion().max_abs(), 0.0);
    }
}
