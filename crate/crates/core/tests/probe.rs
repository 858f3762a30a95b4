//! Parallel transport and holonomy surveys.

use ustar_core::chart::Chart;
use ustar_core::gallery::load_entry;
use ustar_core::linalg::Mat;
use ustar_core::probe::{
    holonomy_survey, parallel_transport, rotation_angle, transport_fixed, LoopSpec, SurveyOptions,
};
use ustar_core::qk2ustar::{flat_triple, modified_connection, ModifiedConnection, QkData};
use ustar_core::tensorcalc::connection::ExplicitConnection;
use ustar_core::tensorcalc::{Christoffel, Connection, LeviCivita, MetricField};

fn calibrated(id: &str) -> QkData {
    let e = load_entry(id).unwrap();
    let d = QkData::new(e.metric.clone(), e.killing.clone().unwrap(), e.orientation).unwrap();
    d.calibrate(&e.sample(10, 1)).unwrap().0
}

fn sphere_area(v0: f64, v1: f64, side: f64) -> f64 {
    // √g = (v²+4)^{−3/2}; Simpson in v
    let n = 200;
    let h = (v1 - v0) / n as f64;
    let f = |v: f64| (v * v + 4.0).powf(-1.5);
    let mut s = f(v0) + f(v1);
    for k in 1..n {
        s += f(v0 + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 * side
}

#[test]
fn sphere_small_square_rotates_by_curvature_times_area() {
    let e = load_entry("s2").unwrap();
    let base = vec![0.3, 0.5];
    let side = 0.1;
    let lp = LoopSpec::rectangle(&base, 0, 1, side, side, 8).unwrap();
    let conn = LeviCivita::new(e.metric.clone());
    let h = parallel_transport(&conn, &lp, 1e-10).unwrap();
    let angle = rotation_angle(&h.matrix, &e.metric.eval(&base).unwrap()).abs();
    let expect = 4.0 * sphere_area(base[0], base[0] + side, side);
    assert!((angle - expect).abs() <= 0.02 * expect, "{angle} vs {expect}");
}

#[test]
fn flat_loops_have_trivial_holonomy() {
    let conn = LeviCivita::new(MetricField::euclidean(Chart::euclidean("r4", 4)));
    for (i, j) in [(0, 1), (1, 3), (2, 0)] {
        let lp = LoopSpec::rectangle(&[0.2, -0.4, 1.0, 0.3], i, j, 0.7, -1.3, 4).unwrap();
        let h = parallel_transport(&conn, &lp, 1e-10).unwrap();
        assert!(h.matrix.sub(&Mat::identity(4)).max_abs() <= 1e-9);
    }
}

#[test]
fn flat_modified_connection_with_zero_alpha_survey() {
    let chart = Chart::euclidean("r4", 4);
    let triple = flat_triple(1);
    let t2 = triple.clone();
    let conn = ExplicitConnection::new(chart, move |_| modified_connection(&Christoffel::zeros(4), &[0.0; 4], &t2).unwrap());
    let opts = SurveyOptions { n_loops: 20, seed: 3, ..Default::default() };
    let (r, defects) = holonomy_survey(&conn, &Mat::identity(4), &triple, &[0.0; 4], &opts).unwrap();
    assert_eq!(r.pass_fraction, 1.0);
    assert!(defects.iter().all(|d| *d < 1e-12));
}

#[test]
fn modified_connection_holonomy_preserves_i() {
    let d = calibrated("bergman");
    let e = load_entry("bergman").unwrap();
    let base = e.sample(1, 4).remove(0);
    let conn = ModifiedConnection::new(d.clone());
    let i = d.triple(&base).unwrap()[0].clone();
    let lp = LoopSpec::rectangle(&base, 0, 2, 0.1, 0.1, 8).unwrap();
    let h = parallel_transport(&conn, &lp, 1e-9).unwrap().matrix;
    let comm = h.mul(&i).sub(&i.mul(&h)).max_abs();
    assert!(comm <= 1e-5, "[H, I] = {comm}");
    // not the identity: the loop sees curvature
    assert!(h.sub(&Mat::identity(4)).max_abs() > 1e-4);
}

#[test]
fn transport_is_multiplicative_and_reversible() {
    let d = calibrated("s4");
    let e = load_entry("s4").unwrap();
    let base = e.sample(1, 9).remove(0);
    let conn = ModifiedConnection::new(d);
    let l1 = LoopSpec::rectangle(&base, 0, 1, 0.1, 0.15, 8).unwrap();
    let l2 = LoopSpec::rectangle(&base, 2, 3, -0.12, 0.08, 8).unwrap();
    let tol = 1e-10;
    let h1 = parallel_transport(&conn, &l1, tol).unwrap();
    let h2 = parallel_transport(&conn, &l2, tol).unwrap();
    let h12 = parallel_transport(&conn, &l1.then(&l2).unwrap(), tol).unwrap();
    let err = 10.0 * (h1.error + h2.error + h12.error) + 1e-12;
    // the second loop acts after the first
    assert!(h12.matrix.sub(&h2.matrix.mul(&h1.matrix)).max_abs() <= err.max(1e-9));
    let hr = parallel_transport(&conn, &l1.reversed(), tol).unwrap();
    assert!(hr.matrix.mul(&h1.matrix).sub(&Mat::identity(4)).max_abs() <= (10.0 * (h1.error + hr.error)).max(1e-9));
}

#[test]
fn rk4_orthogonality_defect_has_fourth_order() {
    let e = load_entry("s4").unwrap();
    let base = e.sample(1, 2).remove(0);
    let conn = LeviCivita::new(e.metric.clone());
    let g = e.metric.eval(&base).unwrap();
    let lp = LoopSpec::rectangle(&base, 0, 1, 0.6, 0.6, 1).unwrap();
    let defect = |n: usize| {
        let h = transport_fixed(&conn, &lp, n).unwrap();
        h.transpose().mul(&g).mul(&h).sub(&g).max_abs()
    };
    let d: Vec<f64> = [4, 8, 16].map(defect).to_vec();
    let orders = [(d[0] / d[1]).log2(), (d[1] / d[2]).log2()];
    assert!(orders.iter().all(|o| *o >= 3.5), "{d:?} {orders:?}");
}

fn survey(id: &str) {
    let d = calibrated(id);
    let e = load_entry(id).unwrap();
    let base = e.sample(1, 17).remove(0);
    let g = e.metric.eval(&base).unwrap();
    let triple = d.triple(&base).unwrap();
    let conn = ModifiedConnection::new(d);
    let opts = SurveyOptions { n_loops: 200, seed: 42, ..Default::default() };
    let (r, _) = holonomy_survey(&conn, &g, &triple, &base, &opts).unwrap();
    assert_eq!(r.pass_fraction, 1.0, "{id}: {r:?}");
    assert!(r.max_defect <= 1e-4);
    let again = holonomy_survey(&conn, &g, &triple, &base, &opts).unwrap().0;
    assert_eq!(again.max_defect, r.max_defect);
    assert_eq!(again.frame_hash, r.frame_hash);
}

#[test]
fn s4_survey_lies_in_u_star_2() {
    survey("s4");
}

#[test]
fn bergman_survey_lies_in_u_star_2() {
    survey("bergman");
}

#[test]
fn levi_civita_holonomy_is_not_in_u_star() {
    // negative control: the Levi-Civita connection does not preserve I
    let d = calibrated("bergman");
    let e = load_entry("bergman").unwrap();
    let base = e.sample(1, 17).remove(0);
    let g = e.metric.eval(&base).unwrap();
    let triple = d.triple(&base).unwrap();
    let conn = LeviCivita::new(e.metric.clone());
    let opts = SurveyOptions { n_loops: 20, seed: 42, ..Default::default() };
    let (r, _) = holonomy_survey(&conn, &g, &triple, &base, &opts).unwrap();
    assert!(r.max_defect > 1e-3, "{r:?}");
    let _: &dyn Connection = &conn;
}
