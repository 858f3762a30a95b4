use ustar_core::error::GeomError;
use ustar_core::gallery::load_entry;
use ustar_core::qk2ustar::QkData;

#[test]
fn s4_zero_set_points_raise_zero_moment() {
    let e = load_entry("s4").unwrap();
    let alt = e.alternate("cartesian").unwrap();
    assert!(!alt.zero_set.is_empty());
    let pts: Vec<Vec<f64>> = e.sample_alternate(alt, 10, 3).into_iter().map(|(_, q)| q).collect();
    let data = QkData::new(alt.metric.clone(), alt.killing.clone().unwrap(), alt.orientation).unwrap();
    let (data, _) = data.calibrate(&pts).unwrap();
    for p in &alt.zero_set {
        match data.moment_section(p) {
            Err(GeomError::ZeroMoment { norm }) => assert!(norm <= 1e-10),
            other => panic!("expected ZeroMoment at {p:?}, got {:?}", other.map(|m| m.mu1)),
        }
    }
    // |y| = 0.8 gives 1 − 4u² ≈ 0.048, so μ₁ ≈ 0.055
    let near = [0.0, 0.0, 0.8, 0.0];
    assert!(data.moment_section(&near).unwrap().mu1 > 1e-2);
}
