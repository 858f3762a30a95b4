//! The Bergman metric on the complex hyperbolic plane, its one-parameter
//! deformation, and the conformally related scalar-flat Kähler family.
//!
//! Chart `(ρ, x₁, x₂, x₃)` with `ρ > 0` and the left-invariant coframe
//! `σ₁ = dx₁ + 2x₂dx₃`, `σ₂ = dx₂`, `σ₃ = dx₃`, so `dσ₁ = 2σ₂∧σ₃`.

use crate::chart::Chart;
use crate::error::Result;
use crate::jet::{Jet2, Scalar};
use crate::linalg::Mat;
use crate::structures::{AlmostComplexField, ComplexChartMetric, Orientation};
use crate::tensorcalc::{Form, MetricField, ScalarField, VectorField};

use super::{AltChart, GalleryEntry};

fn sq(x: &Jet2) -> Jet2 {
    x.clone() * x.clone()
}

fn chart(name: &str) -> Chart {
    Chart::new(name, &["rho", "x1", "x2", "x3"], |x| x[0] > 0.0)
}

/// Rows `dρ, σ₁, σ₂, σ₃`.
fn coframe(x: &[Jet2]) -> Mat<Jet2> {
    let z = Jet2::constant(0.0);
    let o = Jet2::constant(1.0);
    Mat::from_vec(
        4,
        vec![
            o.clone(), z.clone(), z.clone(), z.clone(),
            z.clone(), o.clone(), z.clone(), x[2].clone() * 2.0,
            z.clone(), z.clone(), o.clone(), z.clone(),
            z.clone(), z.clone(), z, o,
        ],
    )
}

/// `Σ w_a (eᵃ)²` for the coframe above.
fn diagonal_in_coframe(x: &[Jet2], w: [Jet2; 4]) -> Mat<Jet2> {
    let e = coframe(x);
    Mat::from_fn(4, |i, j| {
        (0..4).fold(Jet2::constant(0.0), |acc, a| acc + w[a].clone() * e[(a, i)].clone() * e[(a, j)].clone())
    })
}

/// Coefficients of `dρ², σ₁², σ₂², σ₃²` in the scalar-flat family
/// `¼((ρ+2c)/(ρ+c) dρ² + (ρ+c)/(ρ+2c) σ₁² + 2(ρ+2c)(σ₂²+σ₃²))`.
fn family_weights(rho: &Jet2, c: f64) -> [Jet2; 4] {
    let s = (rho.clone() + 2.0 * c) / (rho.clone() + c);
    let t = (rho.clone() + 2.0 * c) * 0.5;
    [s.clone() * 0.25, s.recip() * 0.25, t.clone(), t]
}

/// Scalar-flat Kähler family; `c = 0` is `¼(dρ² + σ₁² + 2ρ(σ₂² + σ₃²))`.
pub fn scalflat_metric(c: f64) -> MetricField {
    MetricField::riemannian(chart("scalflat"), move |x| diagonal_in_coframe(x, family_weights(&x[0], c)))
}

/// Quaternionic Kähler metric `ρ⁻²·(scalar-flat family)`; for `c = 0` this is
/// the Bergman metric `(1/4ρ²)(dρ² + σ₁² + 2ρ(σ₂² + σ₃²))`.
pub fn bergman_metric(c: f64) -> MetricField {
    MetricField::riemannian(chart("bergman"), move |x| {
        let f = sq(&x[0]).recip();
        let w = family_weights(&x[0], c).map(|v| v * f.clone());
        diagonal_in_coframe(x, w)
    })
}

/// Complex structure with `(1,0)`-forms `du + iσ₁` and `σ₂ + iσ₃`, where
/// `du = (ρ+2c)/(ρ+c) dρ`.
pub fn scalflat_structure(c: f64) -> Result<AlmostComplexField> {
    AlmostComplexField::new(chart("scalflat"), move |x| {
        let s = (x[0].clone() + 2.0 * c) / (x[0].clone() + c);
        let mut e = coframe(x);
        for j in 0..4 {
            e[(0, j)] = e[(0, j)].clone() * s.clone();
        }
        // a (1,0)-form A + iB satisfies A∘I = −B and B∘I = A
        let z = Jet2::constant(0.0);
        let o = Jet2::constant(1.0);
        let m = Mat::from_vec(
            4,
            vec![
                z.clone(), -o.clone(), z.clone(), z.clone(),
                o.clone(), z.clone(), z.clone(), z.clone(),
                z.clone(), z.clone(), z.clone(), -o.clone(),
                z.clone(), z.clone(), o, z,
            ],
        );
        let einv = e.inverse().expect("coframe is invertible");
        einv.mul(&m).mul(&e)
    })
}

/// Kähler potential of the scalar-flat family: `ρ²/2` for `c = 0`, otherwise
/// `(ρ+c)² + 4c(ρ+c) + 2c² log(ρ+c)`.
pub fn scalflat_potential(c: f64) -> ScalarField {
    ScalarField::new(chart("scalflat"), move |x| {
        if c == 0.0 {
            sq(&x[0]) * 0.5
        } else {
            let r = x[0].clone() + c;
            sq(&r) + r.clone() * (4.0 * c) + r.ln() * (2.0 * c * c)
        }
    })
}

/// Expected `s` in `i∂∂̄f = s·ω` for [`scalflat_potential`].
pub fn scalflat_potential_scale(c: f64) -> f64 {
    if c == 0.0 {
        2.0
    } else {
        4.0
    }
}

/// `u = (ρ+c) + c log(ρ+c)`.
pub fn u_of_rho(rho: f64, c: f64) -> f64 {
    (rho + c) + c * (rho + c).ln()
}

/// Holomorphic coordinates `(Re w₁, Im w₁, Re w₂, Im w₂)` of a chart point:
/// `w₁ = x₂ + ix₃`, `w₂ = 2(x₁ + x₂x₃) + i(|w₁|² − 2u)`.
pub fn to_complex(c: f64) -> impl Fn(&[f64]) -> Vec<f64> + Send + Sync + Copy {
    move |x: &[f64]| {
        let n1 = x[2] * x[2] + x[3] * x[3];
        vec![x[2], x[3], 2.0 * (x[1] + x[2] * x[3]), n1 - 2.0 * u_of_rho(x[0], c)]
    }
}

/// Inverse of [`to_complex`].
pub fn from_complex(w: &[f64], c: f64) -> Vec<f64> {
    let u = (w[0] * w[0] + w[1] * w[1] - w[3]) / 2.0;
    let rho = rho_of_u(u, c);
    vec![rho, w[2] / 2.0 - w[0] * w[1], w[0], w[1]]
}

fn rho_of_u(u: f64, c: f64) -> f64 {
    if c == 0.0 {
        return u;
    }
    // r + c log r = u is increasing in r > 0
    let mut r = u.max(c).max(1e-3);
    for _ in 0..100 {
        let f = r + c * r.ln() - u;
        let step = f / (1.0 + c / r);
        r = (r - step).max(r / 10.0);
        if step.abs() < 1e-15 * r {
            break;
        }
    }
    r - c
}

/// The scalar-flat metric, scaled by 4, in holomorphic coordinates:
/// `4g = s⁻¹|w̄₁dw₁ + (i/2)dw₂|² + 2(ρ+2c)|dw₁|²` with `s = (ρ+2c)/(ρ+c)`.
pub fn scalflat_complex_chart(c: f64) -> ComplexChartMetric {
    let ch = Chart::new("scalflat_w", &["re_w1", "im_w1", "re_w2", "im_w2"], move |w| {
        let u = (w[0] * w[0] + w[1] * w[1] - w[3]) / 2.0;
        if c == 0.0 {
            u > 0.0
        } else {
            u > u_of_rho(0.0, c)
        }
    });
    ComplexChartMetric::new(ch, move |w| {
        let n1 = sq(&w[0]) + sq(&w[1]);
        let u = (n1.clone() - w[3].clone()) * 0.5;
        let rho = if c == 0.0 {
            u
        } else {
            let r0 = rho_of_u(u.value(), c) + c;
            Jet2::solve_implicit(&u, r0, |r| (r.clone() + r.ln() * c, r.recip() * c + 1.0)) - c
        };
        let s = (rho.clone() + 2.0 * c) / (rho.clone() + c);
        let si = s.recip();
        let a11 = n1 * si.clone() + (rho + 2.0 * c) * 2.0;
        // h₁₂ = w̄₁·(−i/2)/s
        let h12_re = -w[1].clone() * si.clone() * 0.5;
        let h12_im = -w[0].clone() * si.clone() * 0.5;
        let a = Mat::from_vec(2, vec![a11, h12_re.clone(), h12_re, si * 0.25]);
        let b = Mat::from_vec(2, vec![Jet2::constant(0.0), h12_im.clone(), -h12_im, Jet2::constant(0.0)]);
        (a, b)
    })
    .expect("even dimension")
}

/// `(dX♭)⁺` for `X = ∂/∂x₁` on the Bergman metric:
/// `−(1/8ρ³) dρ∧σ₁ − (1/4ρ²) σ₂∧σ₃`.
pub fn bergman_self_dual_closed_form(x: &[f64]) -> Form<f64> {
    let rho = x[0];
    let a = -1.0 / (8.0 * rho.powi(3));
    let mut f = Form::zeros(4, 2);
    // dρ∧σ₁ = dρ∧dx₁ + 2x₂ dρ∧dx₃
    f.set(&[0, 1], a);
    f.set(&[0, 3], a * 2.0 * x[2]);
    f.set(&[2, 3], -1.0 / (4.0 * rho * rho));
    f
}

fn box_ranges() -> Vec<(f64, f64)> {
    vec![(0.1, 10.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)]
}

pub fn bergman_entry(c: f64) -> GalleryEntry {
    let g = bergman_metric(c);
    let id = if c == 0.0 { "bergman".to_string() } else { format!("bergman_c{c}") };
    let mut e = GalleryEntry::new(
        &id,
        "Bergman metric on the complex hyperbolic plane (c = 0) and its deformation",
        g.clone(),
        box_ranges(),
    );
    e.killing = Some(VectorField::coordinate(g.chart().clone(), 1));
    e.companion = Some(scalflat_metric(c));
    e.param = Some(c);
    e
}

pub fn scalflat_entry(c: f64) -> GalleryEntry {
    let g = scalflat_metric(c);
    let id = if c == 0.0 { "scalflat".to_string() } else { format!("scalflat_c{c}") };
    let mut e = GalleryEntry::new(
        &id,
        "scalar-flat Kähler metric conformal to the Bergman metric (c = 0) and its family",
        g.clone(),
        box_ranges(),
    );
    e.killing = Some(VectorField::coordinate(g.chart().clone(), 1));
    e.structure = scalflat_structure(c).ok();
    e.potential = Some((scalflat_potential(c), scalflat_potential_scale(c)));
    let cc = scalflat_complex_chart(c);
    let to_w = to_complex(c);
    e.alternates.push(
        AltChart::new("complex", cc.metric().scaled(0.25), Orientation::Coordinate, None, vec![]).with_map(to_w),
    );
    e.complex_chart = Some((cc, 0.25));
    e.to_complex = Some(std::sync::Arc::new(to_w));
    e.param = Some(c);
    e
}
