//! The four-sphere of curvature 4, the scalar-flat product metric conformal
//! to it, and the two surface factors.

use std::f64::consts::PI;

use crate::chart::Chart;
use crate::error::Result;
use crate::jet::{Jet2, Scalar};
use crate::linalg::Mat;
use crate::structures::{sd_frame, AlmostComplexField, Orientation};
use crate::tensorcalc::{Form, MetricField, VectorField};

use super::{AltChart, GalleryEntry};

fn sq(x: &Jet2) -> Jet2 {
    x.clone() * x.clone()
}

/// `(1 + ρ² + σ²)⁻² (dρ² + dσ² + ρ²dφ² + σ²dθ²)` in `(ρ, σ, φ, θ)`.
pub fn s4_stereo() -> MetricField {
    let chart = Chart::new("s4_stereo", &["rho", "sigma", "phi", "theta"], |x| x[0] > 0.0 && x[1] > 0.0);
    MetricField::diagonal(chart, |x| {
        let d = sq(&x[0]) + sq(&x[1]) + 1.0;
        let f = sq(&d).recip();
        vec![f.clone(), f.clone(), f.clone() * sq(&x[0]), f * sq(&x[1])]
    })
}

/// `du²/(1−4u²) + (1−4u²)dv²/(v²+4)² + (1−4u²)dφ²/(v²+4) + u²dθ²` in
/// `(u, v, φ, θ)`.
pub fn s4_uv() -> MetricField {
    let chart = Chart::new("s4_uv", &["u", "v", "phi", "theta"], |x| x[0] > 0.0 && 4.0 * x[0] * x[0] < 1.0);
    MetricField::diagonal(chart, |x| {
        let a = 1.0 - sq(&x[0]) * 4.0;
        let b = sq(&x[1]) + 4.0;
        vec![a.recip(), a.clone() / sq(&b), a / b, sq(&x[0])]
    })
}

/// Cartesian stereographic chart `(x₁, x₂, y₁, y₂)`, `(x₁,x₂) = ρ(cos φ, sin φ)`,
/// `(y₁,y₂) = σ(cos θ, sin θ)`.
pub fn s4_cartesian() -> MetricField {
    let chart = Chart::euclidean("s4_cartesian", 4);
    MetricField::riemannian(chart, |x| {
        let d = x.iter().fold(Jet2::constant(1.0), |acc, c| acc + sq(c));
        Mat::<Jet2>::identity(4).scale_by(&sq(&d).recip())
    })
}

/// `e^{2εh} g` on the Cartesian chart with a generic cubic `h`: a metric
/// with no continuous symmetry, used as a control without a Killing field.
pub fn s4_perturbed_entry(eps: f64) -> GalleryEntry {
    let base = s4_cartesian();
    let chart = base.chart().clone();
    let g = MetricField::riemannian(chart, move |x| {
        let h = x[0].clone() * x[1].clone() + sq(&x[2]) * x[3].clone() * 0.7 - x[0].clone() * x[3].clone() * 0.4
            + sq(&x[1]) * x[1].clone() * 0.3;
        base.apply(x).scale_by(&(h * (2.0 * eps)).exp())
    });
    let mut e = GalleryEntry::new(
        "s4_perturbed",
        "generic conformal perturbation of the round four-sphere; no Killing field",
        g,
        vec![(-1.2, 1.2); 4],
    );
    e.param = Some(eps);
    e
}

/// `(ρ, σ, φ, θ) ↦ (u, v, φ, θ)`.
pub fn stereo_to_uv(x: &[f64]) -> Vec<f64> {
    let (r, s) = (x[0], x[1]);
    let d = 1.0 + r * r + s * s;
    vec![s / d, (r * r + s * s - 1.0) / r, x[2], x[3]]
}

pub fn stereo_to_cartesian(x: &[f64]) -> Vec<f64> {
    vec![x[0] * x[2].cos(), x[0] * x[2].sin(), x[1] * x[3].cos(), x[1] * x[3].sin()]
}

/// `(x₁, x₂, y₁, y₂) ↦ (ρ, σ, φ, θ)`.
pub fn cartesian_to_stereo(x: &[f64]) -> Vec<f64> {
    vec![x[0].hypot(x[1]), x[2].hypot(x[3]), x[1].atan2(x[0]), x[3].atan2(x[2])]
}

pub fn s4_entry() -> GalleryEntry {
    let uv = s4_uv();
    let cart = s4_cartesian();
    let rot = VectorField::new(cart.chart().clone(), |x| {
        vec![Jet2::constant(0.0), Jet2::constant(0.0), -x[3].clone(), x[2].clone()]
    });
    let stereo = s4_stereo();
    let theta = VectorField::coordinate(stereo.chart().clone(), 3);
    // (ρ, σ, φ, θ) is oppositely oriented to (u, v, φ, θ)
    let mut e = GalleryEntry::new(
        "s4",
        "round four-sphere of curvature 4, stereographic polar chart",
        stereo,
        vec![(0.2, 2.0), (0.2, 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
    );
    e.orientation = Orientation::Reversed;
    e.killing = Some(theta);
    e.alternates.push(AltChart::new(
        "uv",
        uv.clone(),
        Orientation::Coordinate,
        Some(VectorField::coordinate(uv.chart().clone(), 3)),
        vec![(0.05, 0.45), (-4.0, 4.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
    )
    .with_map(stereo_to_uv));
    e.alternates.push(
        AltChart::new("cartesian", cart, Orientation::Coordinate, Some(rot), vec![(-1.2, 1.2); 4])
            .with_map(stereo_to_cartesian)
            // x = 0, |y| = 1 is the locus 4u² = 1
            .with_zero_set(vec![
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0, 0.0],
                vec![0.0, 0.0, 0.0, -1.0],
            ]),
    );
    e
}

/// `du²/(1−4u²)² + u²dθ²/(1−4u²) + dv²/(v²+4)² + dφ²/(v²+4)` in `(u, v, φ, θ)`.
pub fn s4_scalarflat_metric() -> MetricField {
    let chart = Chart::new("s4sf_uv", &["u", "v", "phi", "theta"], |x| x[0] > 0.0 && 4.0 * x[0] * x[0] < 1.0);
    MetricField::diagonal(chart, |x| {
        let a = 1.0 - sq(&x[0]) * 4.0;
        let b = sq(&x[1]) + 4.0;
        vec![sq(&a).recip(), sq(&b).recip(), b.recip(), sq(&x[0]) / a]
    })
}

/// The same metric pulled back by `u = tanh(2x)/2`, `v = 2 tan y`, in
/// `(x, y, φ, θ)`.
pub fn s4_scalarflat_product() -> MetricField {
    let chart = Chart::new("s4sf_product", &["x", "y", "phi", "theta"], |x| x[0] > 0.0 && x[1].abs() < PI / 2.0);
    let base = s4_scalarflat_metric();
    MetricField::riemannian(chart, move |x| {
        let t = (x[0].clone() * 2.0).tanh();
        let u = t.clone() * 0.5;
        let du = 1.0 - sq(&t);
        let c = x[1].cos();
        let v = x[1].tan() * 2.0;
        let dv = sq(&c).recip() * 2.0;
        let g = base.apply(&[u, v, x[2].clone(), x[3].clone()]);
        let jac = [du, dv, Jet2::constant(1.0), Jet2::constant(1.0)];
        Mat::from_fn(4, |i, j| g[(i, j)].clone() * jac[i].clone() * jac[j].clone())
    })
}

pub fn product_to_uv(x: &[f64]) -> Vec<f64> {
    vec![(2.0 * x[0]).tanh() / 2.0, 2.0 * x[1].tan(), x[2], x[3]]
}

pub fn uv_to_product(x: &[f64]) -> Vec<f64> {
    vec![(2.0 * x[0]).atanh() / 2.0, (x[1] / 2.0).atan(), x[2], x[3]]
}

/// Kähler form of the product: the sum of the two factor area forms, with
/// the sign making it self-dual in `(u, v, φ, θ)`.
pub fn s4_scalarflat_structure(g: &MetricField) -> Result<AlmostComplexField> {
    let g2 = g.clone();
    AlmostComplexField::from_two_form(g.clone(), move |x| {
        let gj = g2.eval_jet(x)?;
        // θ⁰∧θ³ + θ¹∧θ² for the diagonal metric is the third self-dual frame form
        Ok(sd_frame(&gj, 1.0)[2].truncate())
    })
}

pub fn s4_scalarflat_entry() -> GalleryEntry {
    let g = s4_scalarflat_metric();
    let mut e = GalleryEntry::new(
        "s4_scalarflat",
        "scalar-flat Kähler metric conformal to the four-sphere off the circle 4u² = 1",
        g.clone(),
        vec![(0.05, 0.45), (-4.0, 4.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
    );
    e.killing = Some(VectorField::coordinate(g.chart().clone(), 3));
    e.structure = s4_scalarflat_structure(&g).ok();
    e.alternates.push(AltChart::new(
        "product",
        s4_scalarflat_product(),
        Orientation::Coordinate,
        None,
        vec![(0.05, 1.2), (-1.3, 1.3), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
    )
    .with_map(uv_to_product));
    e
}

/// Hyperbolic factor `du²/(1−4u²)² + u²dθ²/(1−4u²)`, curvature −4.
pub fn hyperbolic_factor_entry() -> GalleryEntry {
    let chart = Chart::new("hyperbolic_u_theta", &["u", "theta"], |x| x[0] > 0.0 && 4.0 * x[0] * x[0] < 1.0);
    let g = MetricField::diagonal(chart, |x| {
        let a = 1.0 - sq(&x[0]) * 4.0;
        vec![sq(&a).recip(), sq(&x[0]) / a]
    });
    let mut e = GalleryEntry::new(
        "hyperbolic",
        "hyperbolic plane of curvature −4 (first factor of the scalar-flat product)",
        g.clone(),
        vec![(0.05, 0.45), (0.0, 2.0 * PI)],
    );
    e.killing = Some(VectorField::coordinate(g.chart().clone(), 1));
    e
}

/// Sphere factor `dv²/(v²+4)² + dφ²/(v²+4)`, curvature +4.
pub fn sphere_factor_entry() -> GalleryEntry {
    let chart = Chart::euclidean("sphere_v_phi", 2);
    let g = MetricField::diagonal(chart, |x| {
        let b = sq(&x[0]) + 4.0;
        vec![sq(&b).recip(), b.recip()]
    });
    let mut e = GalleryEntry::new(
        "s2",
        "round two-sphere of curvature 4 (second factor of the scalar-flat product)",
        g.clone(),
        vec![(-4.0, 4.0), (0.0, 2.0 * PI)],
    );
    e.killing = Some(VectorField::coordinate(g.chart().clone(), 1));
    e
}

/// `(dX♭)⁺` on the `(u, v, φ, θ)` chart as printed:
/// `u du∧dθ + (1−4u²)^{3/2}/(v²+4)^{3/2} dv∧dφ`.
pub fn s4_self_dual_closed_form(x: &[f64]) -> Form<f64> {
    let (u, v) = (x[0], x[1]);
    let mut f = Form::zeros(4, 2);
    f.set(&[0, 3], u);
    f.set(&[1, 2], (1.0 - 4.0 * u * u).powf(1.5) / (v * v + 4.0).powf(1.5));
    f
}
