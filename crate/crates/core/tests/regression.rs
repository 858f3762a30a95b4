//! Committed derived constants: current generator, reproducible values, and
//! the thresholds each negative control must clear.

use ustar_core::gallery::regression::{compute, generator_hash, RegressionFile};

#[test]
fn committed_constants_match_generator_and_recomputation() {
    let file = RegressionFile::bundled().unwrap();
    assert_eq!(file.generator_sha256, generator_hash(), "regenerate with `cargo run --example regen_regression`");
    let fresh = compute().unwrap();
    let report = file.compare(&fresh);
    assert!(report.all_pass(), "{report:?}");

    let v = |n: &str| file.get(n).unwrap().value;
    assert!((v("bergman_einstein_lambda") + 6.0).abs() <= 1e-6);
    assert!(v("scalflat_radial_killing_residual") > 0.1);
    assert!(v("perturbed_nijenhuis") > 1e-3);
    assert!(v("bergman_with_scalflat_i_hermitian") <= 1e-7);
    assert!(v("bergman_with_scalflat_i_domega") > 1e-3);
    assert!(v("levi_civita_parallel_residual") > 1e-3);
    assert!(v("swann_horizontal_lift_residual") > 1e-2);
    assert_eq!(v("bergman_holonomy_pass_fraction"), 1.0);
}

#[test]
fn regression_file_rejects_unknown_schema() {
    assert!(RegressionFile::parse("schema_version = 2\ngenerator_sha256 = \"\"\nconstant = []\n").is_err());
}
