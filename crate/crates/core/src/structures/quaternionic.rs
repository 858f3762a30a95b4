use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet2};
use crate::linalg::Mat;
use crate::tensorcalc::{Form, MetricField};

use super::almost_complex::{structure_from_form, AlmostComplexField};
use super::hodge::sd_frame;

/// Three almost complex structures on one chart, ideally with
/// `IJ = K, JK = I, KI = J`.
#[derive(Clone)]
pub struct QuaternionicTriple {
    pub i: AlmostComplexField,
    pub j: AlmostComplexField,
    pub k: AlmostComplexField,
}

impl QuaternionicTriple {
    pub fn new(i: AlmostComplexField, j: AlmostComplexField, k: AlmostComplexField) -> Self {
        Self { i, j, k }
    }

    /// The triple dual to the self-dual frame of a 4-metric through
    /// `ωₐ(X, Y) = g(IₐX, Y)`.
    pub fn from_self_dual(g: &MetricField) -> Result<Self> {
        if g.dim() != 4 {
            return Err(GeomError::DimensionMismatch { expected: 4, got: g.dim() });
        }
        let make = |a: usize| {
            let g = g.clone();
            AlmostComplexField::from_first_order(g.chart().clone(), move |x| {
                let gj = g.eval_jet(x)?;
                let w = sd_frame(&gj, 1.0)[a].to_matrix().map(|v| v.truncate());
                let ginv = gj.map(|v| v.truncate()).inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
                Ok(structure_from_form(&ginv, &w))
            })
        };
        Ok(Self { i: make(0)?, j: make(1)?, k: make(2)? })
    }

    pub fn eval(&self, x: &[f64]) -> Result<[Mat<f64>; 3]> {
        Ok([self.i.eval(x)?, self.j.eval(x)?, self.k.eval(x)?])
    }

    /// Max residual over `Iₐ² = −Id` and the three product relations.
    pub fn relations_residual(&self, x: &[f64]) -> Result<f64> {
        let [i, j, k] = self.eval(x)?;
        Ok(quaternion_relations_residual(&i, &j, &k))
    }

    /// Max residual of `IₐᵀgIₐ = g`.
    pub fn isometry_residual(&self, g: &MetricField, x: &[f64]) -> Result<f64> {
        let gv = g.eval(x)?;
        Ok(self
            .eval(x)?
            .iter()
            .map(|a| a.transpose().mul(&gv).mul(a).sub(&gv).max_abs())
            .fold(0.0, f64::max))
    }

    /// `ωₐ = Iₐᵀg` at `x`.
    pub fn hermitian_forms(&self, g: &MetricField, x: &[f64]) -> Result<[Form<f64>; 3]> {
        let gv = g.eval(x)?;
        let [i, j, k] = self.eval(x)?;
        let f = |a: &Mat<f64>| Form::from_matrix(&a.transpose().mul(&gv));
        Ok([f(&i), f(&j), f(&k)])
    }
}

pub fn quaternion_relations_residual(i: &Mat<f64>, j: &Mat<f64>, k: &Mat<f64>) -> f64 {
    let id = Mat::identity(i.dim());
    [
        i.mul(i).add(&id).max_abs(),
        j.mul(j).add(&id).max_abs(),
        k.mul(k).add(&id).max_abs(),
        i.mul(j).sub(k).max_abs(),
        j.mul(k).sub(i).max_abs(),
        k.mul(i).sub(j).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Self-dual frame of a metric given in jet arithmetic, as `Jet2` forms.
pub fn sd_frame_jet(g: &Mat<Jet2>) -> [Form<Jet2>; 3] {
    sd_frame(g, 1.0)
}
