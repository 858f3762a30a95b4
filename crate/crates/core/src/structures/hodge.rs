use crate::error::{GeomError, Result};
use crate::jet::Scalar;
use crate::linalg::Mat;
use crate::tensorcalc::forms::signed_permutations;
use crate::tensorcalc::Form;

/// Volume orientation relative to the chart's coordinate order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    Coordinate,
    Reversed,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Coordinate => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

/// Hodge star on 2-forms in dimension 4:
/// `(*ω)_kl = ½ √|g| ω^ij ε_ijkl`.
pub fn hodge_star_4d<T: Scalar>(g: &Mat<T>, orientation: Orientation, omega: &Form<T>) -> Result<Form<T>> {
    if g.dim() != 4 || omega.dim() != 4 {
        return Err(GeomError::DimensionMismatch { expected: 4, got: g.dim() });
    }
    if omega.degree() != 2 {
        return Err(GeomError::Invalid(format!("hodge_star_4d expects a 2-form, got degree {}", omega.degree())));
    }
    let ginv = g.inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
    let det = g.det();
    let vol = if det.value() < 0.0 { (-det).sqrt() } else { det.sqrt() } * orientation.sign();
    let w = omega.to_matrix();
    let up = ginv.mul(&w).mul(&ginv.transpose());
    let mut out: Form<T> = Form::zeros(4, 2);
    for (perm, s) in signed_permutations(4) {
        // perm = (i, j, k, l), ε_ijkl = s; only k < l entries are set
        let (i, j, k, l) = (perm[0], perm[1], perm[2], perm[3]);
        if k < l {
            let cur = out.get(&[k, l]).clone();
            out.set(&[k, l], cur + up[(i, j)].clone() * vol.clone() * s);
        }
    }
    // each (k,l) gets contributions from (i,j) and (j,i): the ½ is absorbed
    Ok(out.scale(0.5))
}

/// Self-dual and anti-self-dual parts, `ω± = (ω ± *ω)/2`.
pub fn sd_split<T: Scalar>(g: &Mat<T>, orientation: Orientation, omega: &Form<T>) -> Result<(Form<T>, Form<T>)> {
    let star = hodge_star_4d(g, orientation, omega)?;
    Ok((omega.add(&star).scale(0.5), omega.sub(&star).scale(0.5)))
}

/// Orthonormal coframe by Gram–Schmidt on the coordinate vectors; returns
/// the components `θᵃᵢ`. It has the coordinate orientation.
pub fn orthonormal_coframe<T: Scalar>(g: &Mat<T>) -> Vec<Vec<T>> {
    let n = g.dim();
    let ip = |a: &[T], b: &[T]| crate::linalg::dot(a, &g.mul_vec(b));
    let mut frame: Vec<Vec<T>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut v = vec![T::zero(); n];
        v[a] = T::one();
        for e in &frame {
            let c = ip(&v, e);
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= c.clone() * ei.clone();
            }
        }
        let norm = ip(&v, &v).sqrt();
        let inv = norm.recip();
        frame.push(v.into_iter().map(|c| c * inv.clone()).collect());
    }
    frame.iter().map(|e| g.mul_vec(e)).collect()
}

/// The 2-forms `θ⁰∧θᵃ + θᵇ∧θᶜ` for cyclic `(a, b, c)`, which span the
/// self-dual forms. Sign `−1` gives the anti-self-dual basis
/// `θ⁰¹ − θ²³, θ⁰² − θ³¹, θ¹² − θ⁰³`, ordered so that the dual structures
/// still satisfy `IJ = K`.
pub fn sd_frame<T: Scalar>(g: &Mat<T>, sign: f64) -> [Form<T>; 3] {
    let th: Vec<Form<T>> = orthonormal_coframe(g).into_iter().map(Form::one_form).collect();
    let pair = |a: usize, b: usize, c: usize| th[0].wedge(&th[a]).add(&th[b].wedge(&th[c]).scale(sign));
    [pair(1, 2, 3), pair(2, 3, 1), pair(3, 1, 2).scale(sign)]
}
