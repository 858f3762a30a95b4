//! Hyperkähler quotient of flat space by the circle: the Calabi metric in a
//! gauge-fixed slice chart.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ustar_core::hkqk::CalabiSlice;
use ustar_core::linalg::{to_dmatrix, Mat};
use ustar_core::structures::quaternion_relations_residual;

fn slice_points(sl: &CalabiSlice, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4 * sl.m();
    let mut out = Vec::new();
    while out.len() < count {
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-0.6..0.6)).collect();
        if sl.chart().contains(&s) {
            out.push(s);
        }
    }
    out
}

fn min_eigenvalue(g: &Mat<f64>) -> f64 {
    nalgebra::SymmetricEigen::new(to_dmatrix(g)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn calabi_m1_metric_is_positive_definite() {
    let sl = CalabiSlice::new(1, 1.0, 0).unwrap();
    for s in slice_points(&sl, 20, 1) {
        let q = sl.quotient(&s).unwrap();
        assert_eq!(q.values().dim(), 4);
        assert!(min_eigenvalue(&q.values()) > 1e-6);
    }
}

#[test]
fn lifts_are_horizontal_and_forms_closed() {
    for m in [1, 2] {
        let sl = CalabiSlice::new(m, 1.0, 0).unwrap();
        for s in slice_points(&sl, 10, 2) {
            let q = sl.quotient(&s).unwrap();
            assert!(q.horizontality() <= 1e-10, "{}", q.horizontality());
            assert!(q.closure() <= 1e-6, "{}", q.closure());
        }
    }
}

#[test]
fn quotient_structures_are_quaternionic() {
    let sl = CalabiSlice::new(2, 1.0, 0).unwrap();
    for s in slice_points(&sl, 5, 3) {
        let q = sl.quotient(&s).unwrap();
        let ginv = q.values().inverse().unwrap();
        let st: Vec<Mat<f64>> = q.forms.iter().map(|f| ginv.mul(&f.values().to_matrix()).scale(-1.0)).collect();
        assert!(quaternion_relations_residual(&st[0], &st[1], &st[2]) < 1e-10);
    }
}

#[test]
fn calabi_m1_is_ricci_flat() {
    let sl = CalabiSlice::new(1, 1.0, 0).unwrap();
    for s in slice_points(&sl, 5, 4) {
        let c = sl.curvature(&s).unwrap();
        assert!(c.scalar.abs() < 1e-4, "scalar {}", c.scalar);
        assert!(c.ricci.max_abs() < 1e-4, "ricci {}", c.ricci.max_abs());
        // not flat: Eguchi–Hanson has |Riem|² > 0
        assert!(c.riemann.squared_norm(&c.g, &c.ginv) > 1e-3);
    }
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex<f64>> {
    let a = DMatrix::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.qr().q()
}

#[test]
fn curvature_invariant_under_unitary_action() {
    let m = 1;
    let sl = CalabiSlice::new(m, 1.0, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for s in slice_points(&sl, 3, 5) {
        let amb = sl.embed(&s);
        let n1 = m + 1;
        let z = nalgebra::DVector::from_fn(n1, |a, _| Complex::new(amb[2 * a], amb[2 * a + 1]));
        let w = nalgebra::DVector::from_fn(n1, |a, _| Complex::new(amb[2 * n1 + 2 * a], amb[2 * n1 + 2 * a + 1]));
        let u = random_unitary(n1, &mut rng);
        let (z2, w2) = (&u * z, u.map(|c| c.conj()) * w);
        let mut amb2 = vec![0.0; 4 * n1];
        for a in 0..n1 {
            amb2[2 * a] = z2[a].re;
            amb2[2 * a + 1] = z2[a].im;
            amb2[2 * n1 + 2 * a] = w2[a].re;
            amb2[2 * n1 + 2 * a + 1] = w2[a].im;
        }
        let (sl2, s2) = CalabiSlice::gauge_fix(m, 1.0, &amb2).unwrap();
        let (c1, c2) = (sl.curvature(&s).unwrap(), sl2.curvature(&s2).unwrap());
        assert!((c1.scalar - c2.scalar).abs() <= 1e-4);
        let (r1, r2) = (c1.riemann.squared_norm(&c1.g, &c1.ginv), c2.riemann.squared_norm(&c2.g, &c2.ginv));
        assert!((r1 - r2).abs() <= 1e-4 * r1.max(1.0), "{r1} vs {r2}");
    }
}

#[test]
fn calabi_m1_kretschmann_matches_eguchi_hanson() {
    // Eguchi–Hanson: |Riem|² = 384 a⁸ / r¹². The bolt w = 0 is S³(√(2ℓ))/U(1),
    // a round sphere of radius √(2ℓ)/2 = a/2, so a⁴ = 4ℓ²; along the
    // quotient r² is the ambient |z|² + |w|².
    for level in [1.0, 0.5] {
        let sl = CalabiSlice::new(1, level, 0).unwrap();
        for s in slice_points(&sl, 4, 7) {
            let c = sl.curvature(&s).unwrap();
            let k = c.riemann.squared_norm(&c.g, &c.ginv);
            let r2: f64 = sl.embed(&s).iter().map(|v| v * v).sum();
            let expect = 384.0 * 16.0 * level.powi(4) / r2.powi(6);
            assert!((k - expect).abs() <= 1e-6 * expect, "{k} vs {expect}");
        }
    }
}
