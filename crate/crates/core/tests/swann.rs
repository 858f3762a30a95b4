//! Swann bundle over quaternionic Kähler bases: connection, hyperkähler
//! triple, and the lifted moment map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ustar_core::gallery::load_entry;
use ustar_core::hkqk::SwannChart;
use ustar_core::qk2ustar::QkData;

fn swann_points(base: &[Vec<f64>], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    base.iter()
        .map(|x| {
            let mut y = x.clone();
            y.push(rng.random_range(-3.0..3.0));
            y.push(rng.random_range(0.3..2.8));
            y.push(rng.random_range(-3.0..3.0));
            y.push(rng.random_range(0.5..2.0));
            y
        })
        .collect()
}

fn chart_for(id: &str) -> (SwannChart, Vec<Vec<f64>>, f64) {
    let e = load_entry(id).unwrap();
    let base_pts = e.sample(8, 3);
    let d = QkData::new(e.metric.clone(), e.killing.clone().unwrap(), e.orientation).unwrap();
    let (d, _) = d.calibrate(&base_pts).unwrap();
    let pts = swann_points(&base_pts, 9);
    let (sc, fit) = SwannChart::calibrate(d, &pts).unwrap();
    (sc, pts, fit.residual)
}

#[test]
fn bergman_swann_curvature_and_lift() {
    let (sc, pts, res) = chart_for("bergman");
    assert!(res < 1e-8, "curvature residual {res}, c = {}", sc.c());
    eprintln!("c = {}", sc.c());
    let r = sc.check(&pts, 1e-7);
    assert!(r.all_pass(), "{r:?}");
}

#[test]
fn s4_swann_curvature_and_lift() {
    let (sc, pts, res) = chart_for("s4");
    assert!(res < 1e-8, "curvature residual {res}, c = {}", sc.c());
    eprintln!("c = {}", sc.c());
    let r = sc.check(&pts, 1e-7);
    assert!(r.all_pass(), "{r:?}");
}

#[test]
fn swann_forms_are_closed_and_invariant() {
    let (sc, pts, _) = chart_for("bergman");
    for y in pts.iter().take(3) {
        let d = sc.closure_residual(y, 1e-3).unwrap();
        assert!(d < 1e-6, "closure {d}");
        let l = sc.lie_residual(y, 1e-3).unwrap();
        assert!(l < 1e-6, "Lie derivative {l}");
    }
}

#[test]
fn horizontal_lift_alone_is_not_hamiltonian() {
    let (sc, pts, _) = chart_for("bergman");
    let worst = pts.iter().map(|y| sc.lift_residual(y, false).unwrap()).fold(0.0, f64::max);
    assert!(worst > 1e-2, "negative control residual {worst}");
}

#[test]
fn descended_moment_on_level_set() {
    for id in ["bergman", "s4"] {
        let (sc, _, _) = chart_for(id);
        let e = load_entry(id).unwrap();
        for x in e.sample(5, 21) {
            let y = sc.level_point(&x).unwrap();
            let m = sc.moment(&y).unwrap();
            assert!((m[0] - sc.c()).abs() < 1e-9 && m[1].abs() < 1e-9 && m[2].abs() < 1e-9, "{m:?}");
            let (res, mu, expect) = sc.descended_moment(&y).unwrap();
            assert!(res < 1e-8, "{id}: i_E1 phi1 + dt = {res}");
            assert!((mu - expect).abs() < 1e-8);
        }
    }
}

#[test]
fn generators_are_dual_to_connection() {
    let (sc, pts, _) = chart_for("s4");
    for y in &pts {
        assert!(sc.duality_residual(y).unwrap() < 1e-10);
    }
}

#[test]
fn phi_expansion_has_negative_quadratic_term() {
    let (sc, pts, _) = chart_for("bergman");
    for y in &pts {
        assert!(sc.expansion_residual(y, -1.0).unwrap() < 1e-8);
        assert!(sc.expansion_residual(y, 1.0).unwrap() > 1e-3);
    }
}
