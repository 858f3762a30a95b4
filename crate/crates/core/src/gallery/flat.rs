//! Flat and homogeneous model spaces.

use crate::chart::Chart;
use crate::jet::{Jet2, Scalar};
use crate::linalg::Mat;
use crate::structures::{AlmostComplexField, ComplexChartMetric, QuaternionicTriple};
use crate::tensorcalc::{Form, MetricField, ScalarField, VectorField};

use super::GalleryEntry;

pub fn euclidean_entry(n: usize) -> GalleryEntry {
    let g = MetricField::euclidean(Chart::euclidean(format!("r{n}"), n));
    let mut e = GalleryEntry::new(&format!("euclidean{n}"), "flat Euclidean space", g.clone(), vec![(-2.0, 2.0); n]);
    if n >= 2 {
        e.killing = Some(VectorField::new(g.chart().clone(), move |x| {
            let mut v = vec![Jet2::constant(0.0); n];
            v[0] = -x[1].clone();
            v[1] = x[0].clone();
            v
        }));
    }
    e
}

/// `h = (1 + |z|²)⁻²` on ℂ, the round sphere of curvature 4.
pub fn fubini_study_chart() -> ComplexChartMetric {
    ComplexChartMetric::new(Chart::euclidean("cp1", 2), |x| {
        let s = x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone() + 1.0;
        (Mat::from_vec(1, vec![(s.clone() * s).recip()]), Mat::zeros(1))
    })
    .expect("even dimension")
}

pub fn fubini_study_entry() -> GalleryEntry {
    let cc = fubini_study_chart();
    let g = cc.metric();
    let mut e = GalleryEntry::new("fubini_study", "complex projective line, Fubini–Study metric of curvature 4", g.clone(), vec![(-2.0, 2.0); 2]);
    e.structure = cc.complex_structure().ok();
    e.killing = Some(VectorField::new(g.chart().clone(), |x| vec![-x[1].clone(), x[0].clone()]));
    e.potential = Some((
        ScalarField::new(g.chart().clone(), |x| (x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone() + 1.0).ln()),
        2.0,
    ));
    e.complex_chart = Some((cc, 1.0));
    e
}

/// Real coordinates on `ℂᵐ ⊕ jℂᵐ`: `(Re z₁, Im z₁, …, Re z_m, Im z_m, Re w₁, Im w₁, …)`.
pub fn z_index(a: usize) -> usize {
    2 * a
}

pub fn w_index(m: usize, a: usize) -> usize {
    2 * m + 2 * a
}

/// `ω₁ = (i/2)Σ(dz∧dz̄ + dw∧dw̄)`, `ω₂ + iω₃ = Σ dz∧dw`.
pub fn flat_hk_forms(m: usize) -> [Form<f64>; 3] {
    let n = 4 * m;
    let mut w = [Form::zeros(n, 2), Form::zeros(n, 2), Form::zeros(n, 2)];
    for a in 0..2 * m {
        w[0].set(&[2 * a, 2 * a + 1], 1.0);
    }
    for a in 0..m {
        let (x, y) = (z_index(a), z_index(a) + 1);
        let (p, q) = (w_index(m, a), w_index(m, a) + 1);
        w[1].set(&[x, p], 1.0);
        w[1].set(&[y, q], -1.0);
        w[2].set(&[x, q], 1.0);
        w[2].set(&[y, p], 1.0);
    }
    w
}

/// `I_i = −g⁻¹ω_i` for the Euclidean metric.
pub fn flat_hk_structures(m: usize) -> [Mat<f64>; 3] {
    flat_hk_forms(m).map(|w| w.to_matrix().scale(-1.0))
}

/// Circle action `w ↦ e^{iθ}w`, generator `Σ(−q∂_p + p∂_q)`.
pub fn flat_hk_circle(m: usize) -> VectorField {
    let n = 4 * m;
    VectorField::new(Chart::euclidean(format!("hk{m}"), n), move |x| {
        let mut v = vec![Jet2::constant(0.0); n];
        for a in 0..m {
            let (p, q) = (w_index(m, a), w_index(m, a) + 1);
            v[p] = -x[q].clone();
            v[q] = x[p].clone();
        }
        v
    })
}

/// `μ = −|w|²/2`.
pub fn flat_hk_moment(m: usize) -> ScalarField {
    ScalarField::new(Chart::euclidean(format!("hk{m}"), 4 * m), move |x| {
        (0..m).fold(Jet2::constant(0.0), |acc, a| {
            let (p, q) = (w_index(m, a), w_index(m, a) + 1);
            acc - (x[p].clone() * x[p].clone() + x[q].clone() * x[q].clone()) * 0.5
        })
    })
}

pub fn flat_hk_entry(m: usize) -> GalleryEntry {
    let chart = Chart::euclidean(format!("hk{m}"), 4 * m);
    let g = MetricField::euclidean(chart.clone());
    let mut e = GalleryEntry::new(&format!("flat_hk_{m}"), "flat hyperkähler space with the circle rotating w", g, vec![(-1.5, 1.5); 4 * m]);
    let [i, j, k] = flat_hk_structures(m);
    let mk = |s: Mat<f64>| AlmostComplexField::constant(chart.clone(), s).expect("even dimension");
    e.triple = Some(QuaternionicTriple::new(mk(i.clone()), mk(j), mk(k)));
    e.structure = Some(mk(i));
    e.killing = Some(flat_hk_circle(m));
    e.param = Some(m as f64);
    e
}
