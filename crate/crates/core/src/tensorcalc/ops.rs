use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet2, Scalar};
use crate::linalg::Mat;

use super::fields::VectorField;
use super::forms::Form;
use super::metric::{check_nondegenerate, MetricField};

/// Direction of a musical isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Musical {
    /// Vector to covector, `X ↦ g(X, ·)`.
    Flat,
    /// Covector to vector, `α ↦ g⁻¹α`.
    Sharp,
}

pub fn musical(g: &MetricField, v: &[f64], dir: Musical, x: &[f64]) -> Result<Vec<f64>> {
    let gx = g.eval(x)?;
    if v.len() != gx.dim() {
        return Err(GeomError::DimensionMismatch { expected: gx.dim(), got: v.len() });
    }
    match dir {
        Musical::Flat => Ok(gx.mul_vec(v)),
        Musical::Sharp => {
            check_nondegenerate(&gx)?;
            gx.solve(v).ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })
        }
    }
}

pub fn flat(g: &MetricField, v: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    musical(g, v, Musical::Flat, x)
}

pub fn sharp(g: &MetricField, a: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    musical(g, a, Musical::Sharp, x)
}

/// `X♭` in jet arithmetic, for taking `d(X♭)` exactly.
pub fn flat_jet(g: &Mat<Jet2>, v: &[Jet2]) -> Form<Jet2> {
    Form::one_form(g.mul_vec(v))
}

/// `(L_X g)_ij = Xᵏ ∂ₖ g_ij + g_kj ∂ᵢ Xᵏ + g_ik ∂ⱼ Xᵏ`.
pub fn lie_derivative_metric(g: &MetricField, v: &VectorField, x: &[f64]) -> Result<Mat<f64>> {
    let gj = g.eval_jet(x)?;
    let vj = v.eval_jet(x)?;
    let n = gj.dim();
    let xv: Vec<f64> = vj.iter().map(|c| c.value()).collect();
    Ok(Mat::from_fn(n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            s += xv[k] * gj[(i, j)].partial(k).value();
            s += gj[(k, j)].value() * vj[k].partial(i).value();
            s += gj[(i, k)].value() * vj[k].partial(j).value();
        }
        s
    }))
}

/// `max |(L_X g)_ij|` at `x`.
pub fn killing_residual(g: &MetricField, v: &VectorField, x: &[f64]) -> Result<f64> {
    Ok(lie_derivative_metric(g, v, x)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    #[test]
    fn rotation_is_killing_for_euclidean_plane() {
        let c = Chart::euclidean("r2", 2);
        let g = MetricField::euclidean(c.clone());
        let rot = VectorField::new(c, |x| vec![-x[1].clone(), x[0].clone()]);
        assert!(killing_residual(&g, &rot, &[0.4, -1.2]).unwrap() < 1e-15);
        let dil = VectorField::new(Chart::euclidean("r2", 2), |x| x.to_vec());
        assert!((killing_residual(&g, &dil, &[0.4, -1.2]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn flat_then_sharp_is_identity() {
        let c = Chart::euclidean("r2", 2);
        let g = MetricField::riemannian(c, |x| {
            Mat::from_vec(2, vec![x[0].exp() + 1.0, x[1].clone() * 0.1, x[1].clone() * 0.1, Jet2::constant(2.0)])
        });
        let p = [0.3, 0.5];
        let v = [1.0, -2.0];
        let back = sharp(&g, &flat(&g, &v, &p).unwrap(), &p).unwrap();
        assert!(crate::linalg::max_abs_diff(&back, &v) < 1e-12);
    }
}
