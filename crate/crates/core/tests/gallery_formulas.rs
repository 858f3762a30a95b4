//! Closed-form identities behind the gallery entries, each against an
//! independent oracle written here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ustar_core::gallery::{bergman, s4};
use ustar_core::jet::{Jet2, Scalar};
use ustar_core::linalg::Mat;
use ustar_core::tensorcalc::{ext_d, FormField};
use ustar_core::Chart;

#[test]
fn s4_chart_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let r: f64 = rng.random_range(0.01..3.0);
        let s: f64 = rng.random_range(0.01..3.0);
        let a = (1.0 + r * r - s * s).powi(2) + 4.0 * s * s * r * r;
        let b = (1.0 + r * r + s * s).powi(2) - 4.0 * s * s;
        let c = (r * r + s * s - 1.0).powi(2) + 4.0 * r * r;
        let scale = a.abs().max(1.0);
        assert!((a - b).abs() / scale < 1e-12 && (b - c).abs() / scale < 1e-12);
    }
}

/// Pulls `g` back along `f` using the jet gradients of `f` as the Jacobian.
fn pullback(g: &Mat<f64>, f: &[Jet2], n: usize) -> Mat<f64> {
    Mat::from_fn(n, |i, j| {
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v += g[(a, b)] * f[a].grad_at(i) * f[b].grad_at(j);
            }
        }
        v
    })
}

#[test]
fn s4_uv_chart_is_the_stereographic_metric() {
    let stereo = s4::s4_stereo();
    let uv = s4::s4_uv();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let p = vec![rng.random_range(0.1..2.5), rng.random_range(0.1..2.5), 0.3, 1.7];
        let x = Jet2::seed(&p);
        let d = x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone() + 1.0;
        let f = vec![x[1].clone() / d.clone(), (d - 2.0) / x[0].clone(), x[2].clone(), x[3].clone()];
        let q: Vec<f64> = f.iter().map(|v| v.value()).collect();
        assert!(ustar_core::linalg::max_abs_diff(&q, &s4::stereo_to_uv(&p)) < 1e-14);
        let pulled = pullback(&uv.eval(&q).unwrap(), &f, 4);
        let direct = stereo.eval(&p).unwrap();
        assert!(pulled.sub(&direct).max_abs() < 1e-9, "{}", pulled.sub(&direct).max_abs());
    }
}

#[test]
fn scalar_flat_product_chart() {
    let base = s4::s4_scalarflat_metric();
    let prod = s4::s4_scalarflat_product();
    for p in [[0.3, 0.2, 1.0, 2.0], [1.1, -0.9, 0.0, 0.5]] {
        let q = s4::product_to_uv(&p);
        assert!(ustar_core::linalg::max_abs_diff(&s4::uv_to_product(&q), &p) < 1e-12);
        // by hand: dx² + sinh²(2x)/4 dθ² + (dy² + cos²y dφ²)/4
        let g = prod.eval(&p).unwrap();
        let expect = [1.0, 0.25, 0.25 * p[1].cos().powi(2), 0.25 * (2.0 * p[0]).sinh().powi(2)];
        for i in 0..4 {
            assert!((g[(i, i)] - expect[i]).abs() < 1e-12);
        }
        assert!(base.eval(&q).is_ok());
    }
}

#[test]
fn heisenberg_structure_equations() {
    let chart = Chart::euclidean("h", 4);
    let z = || Jet2::constant(0.0);
    let sigma1 = FormField::new(chart.clone(), 1, move |x| vec![z(), Jet2::constant(1.0), z(), x[2].clone() * 2.0]);
    let p = [0.7, 0.1, -0.4, 1.3];
    let d = ext_d(&sigma1, &p).unwrap();
    // dσ₁ = 2 dx₂∧dx₃, all other components zero
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        let expect = if (i, j) == (2, 3) { 2.0 } else { 0.0 };
        assert_eq!(d.get(&[i, j]).value(), expect);
    }
}

#[test]
fn family_metric_matches_display() {
    for c in [0.0, 0.5, 1.0, 2.0] {
        let g = bergman::scalflat_metric(c);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p: Vec<f64> = vec![rng.random_range(0.1..10.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let (r, x2) = (p[0], p[2]);
            // ¼(s dρ² + s⁻¹(dx₁ + 2x₂dx₃)² + 2(ρ+2c)(dx₂² + dx₃²)), expanded
            let s = (r + 2.0 * c) / (r + c);
            let t = 2.0 * (r + 2.0 * c);
            let mut m = [[0.0; 4]; 4];
            m[0][0] = s / 4.0;
            m[1][1] = 1.0 / (4.0 * s);
            m[1][3] = 2.0 * x2 / (4.0 * s);
            m[3][1] = m[1][3];
            m[3][3] = (4.0 * x2 * x2 / s + t) / 4.0;
            m[2][2] = t / 4.0;
            let v = g.eval(&p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((v[(i, j)] - m[i][j]).abs() < 1e-10);
                }
            }
            // the quaternionic Kähler family is this divided by ρ²
            let b = bergman::bergman_metric(c).eval(&p).unwrap();
            assert!(b.sub(&v.scale(1.0 / (r * r))).max_abs() < 1e-12);
        }
    }
}

/// `dw₁ = σ₂ + iσ₃` and `dw₂ = −2i(du + iσ₁ − w̄₁dw₁)` evaluated on a
/// velocity, as (Re, Im) pairs.
fn dw(c: f64, p: &[f64], w: &[f64; 4], v: &[f64]) -> [f64; 4] {
    let s = (p[0] + 2.0 * c) / (p[0] + c);
    let du = s * v[0];
    let sigma1 = v[1] + 2.0 * p[2] * v[3];
    let (d1r, d1i) = (v[2], v[3]);
    // w̄₁dw₁
    let (pr, pi) = (w[0] * d1r + w[1] * d1i, w[0] * d1i - w[1] * d1r);
    // −2i(A + iB) = 2B − 2iA with A = du − Re(w̄₁dw₁), B = σ₁ − Im(w̄₁dw₁)
    let a = du - pr;
    let b = sigma1 - pi;
    [d1r, d1i, 2.0 * b, -2.0 * a]
}

#[test]
fn holomorphic_coordinates_along_integrated_flows() {
    for c in [0.0, 1.0] {
        let start = [1.3, 0.2, -0.5, 0.7];
        let vel = [0.8, -1.1, 0.6, 0.9];
        let path = |t: f64| -> Vec<f64> { (0..4).map(|i| start[i] + t * vel[i]).collect() };
        let w0 = bergman::to_complex(c)(&start);
        let mut w = [w0[0], w0[1], w0[2], w0[3]];
        let n = 2000;
        let h = 1.0 / n as f64;
        for step in 0..n {
            let t = step as f64 * h;
            let f = |t: f64, w: &[f64; 4]| dw(c, &path(t), w, &vel);
            let add = |w: &[f64; 4], k: &[f64; 4], s: f64| [w[0] + s * k[0], w[1] + s * k[1], w[2] + s * k[2], w[3] + s * k[3]];
            let k1 = f(t, &w);
            let k2 = f(t + h / 2.0, &add(&w, &k1, h / 2.0));
            let k3 = f(t + h / 2.0, &add(&w, &k2, h / 2.0));
            let k4 = f(t + h, &add(&w, &k3, h));
            for i in 0..4 {
                w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let p = path(t + h);
            let u = (w[0] * w[0] + w[1] * w[1] - w[3]) / 2.0;
            assert!((u - bergman::u_of_rho(p[0], c)).abs() < 1e-9, "c = {c}, t = {}", t + h);
        }
        let closed = bergman::to_complex(c)(&path(1.0));
        assert!(ustar_core::linalg::max_abs_diff(&w, &closed) < 1e-9);
    }
}

/// Real metric of `Σ h dz dz̄` from a Hermitian matrix given entrywise.
fn realified(h: [[(f64, f64); 2]; 2]) -> Mat<f64> {
    let a = Mat::from_fn(2, |i, j| h[i][j].0);
    let b = Mat::from_fn(2, |i, j| h[i][j].1);
    ustar_core::structures::realify(&a, &b)
}

/// Least-squares scale and residual of `a ≈ s·b`.
fn fit(a: &Mat<f64>, b: &Mat<f64>) -> (f64, f64) {
    let ab: f64 = a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum();
    let bb: f64 = b.data().iter().map(|y| y * y).sum();
    let s = ab / bb;
    (s, a.sub(&b.scale(s)).max_abs())
}

#[test]
fn metric_in_holomorphic_coordinates() {
    let g = bergman::scalflat_metric(0.0);
    let mut worst_derived: f64 = 0.0;
    let mut worst_printed: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let p = vec![rng.random_range(0.2..5.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        // Jacobian of the coordinate map, by jets
        let x = Jet2::seed(&p);
        let n1 = x[2].clone() * x[2].clone() + x[3].clone() * x[3].clone();
        let f = vec![x[2].clone(), x[3].clone(), (x[1].clone() + x[2].clone() * x[3].clone()) * 2.0, n1 - x[0].clone() * 2.0];
        let w: Vec<f64> = f.iter().map(|v| v.value()).collect();
        let n1 = w[0] * w[0] + w[1] * w[1];
        // (w̄₁dw₁ + (i/2)dw₂)(w₁dw̄₁ − (i/2)dw̄₂) + (|w₁|² − Im w₂)dw₁dw̄₁
        let derived = [[(n1 + (n1 - w[3]), 0.0), (-w[1] / 2.0, -w[0] / 2.0)], [(-w[1] / 2.0, w[0] / 2.0), (0.25, 0.0)]];
        // as printed: (w̄₁dw₁ − (i/2)dw₂)(w₁dw̄₁ + (i/2)dw̄₂) + …
        let printed = [[(n1 + (n1 - w[3]), 0.0), (w[1] / 2.0, w[0] / 2.0)], [(w[1] / 2.0, -w[0] / 2.0), (0.25, 0.0)]];
        let target = g.eval(&p).unwrap();
        let (s1, r1) = fit(&target, &pullback(&realified(derived), &f, 4));
        let (_, r2) = fit(&target, &pullback(&realified(printed), &f, 4));
        assert!((s1 - 0.25).abs() < 1e-12);
        worst_derived = worst_derived.max(r1);
        worst_printed = worst_printed.max(r2);
    }
    assert!(worst_derived < 1e-7, "{worst_derived}");
    // the printed sign of the dw₂ term does not fit ρ = (|w₁|² − Im w₂)/2
    assert!(worst_printed > 1e-2, "{worst_printed}");
}
