//! End-to-end runs of the `ustar` binary: exit codes, report contents and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ustar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ustar")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["check_name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"generated_at\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn gallery_list_shows_bundled_entries() {
    let o = ustar(&["gallery", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let ids: Vec<&str> = text.lines().skip(1).filter_map(|l| l.split_whitespace().next()).collect();
    for id in ["s4", "s4_scalarflat", "bergman", "scalflat", "flat_hk_1", "flat_hk_2", "flat_hk_3"] {
        assert!(ids.contains(&id), "{id} missing from {ids:?}");
    }
}

#[test]
fn gallery_list_empty_and_malformed() {
    let o = ustar(&["gallery", "list", "--empty"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    for text in ["schema_version = 1\n[[entry]]\nid = 3\n", "not toml [", "schema_version = 2\n"] {
        std::fs::write(&bad, text).unwrap();
        let o = ustar(&["gallery", "list", "--manifest", bad.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{text}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn verify_scalflat_passes_with_expected_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ustar(&["verify", "--entry", "scalflat", "--samples", "100", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["pass"], true);
    for name in ["scalar_flat", "kahler", "ricci_asd"] {
        assert_eq!(check(&r, name)["pass"], true, "{name}");
    }
}

#[test]
fn verify_bergman_einstein_matches_regression_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ustar(&["verify", "--entry", "bergman", "--check", "einstein", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read_json(&out);
    assert_eq!(r["checks"].as_array().unwrap().len(), 2);
    assert_eq!(check(&r, "einstein_lambda_regression")["pass"], true);
}

#[test]
fn impossible_tolerance_fails_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = ustar(&["verify", "--entry", "s4", "--tol", "1e-15", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("check_name,max_residual,tolerance,pass"));
    assert!(text.contains(",false,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ustar(&["verify", "--entry", "nope"])), 2);
    assert_eq!(code(&ustar(&["verify"])), 2);
    assert_eq!(code(&ustar(&["verify", "--entry", "s4", "--tol", "-1"])), 2);
    assert_eq!(code(&ustar(&["verify", "--entry", "s4", "--check", "no_such_check"])), 2);
    assert_eq!(code(&ustar(&["verify", "--entry", "s4", "--format", "xml"])), 2);
    assert_eq!(code(&ustar(&["frobnicate"])), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    let out = dir.path().join("r.json");
    std::fs::write(&cfg, format!("entry = \"s4\"\nsamples = 3\nseed = 5\ntol = 1e-15\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    assert_eq!(code(&ustar(&["verify", "--config", cfg.to_str().unwrap()])), 1);
    assert_eq!(code(&ustar(&["verify", "--config", cfg.to_str().unwrap(), "--tol", "1e-6"])), 0);
    let r = read_json(&out);
    assert_eq!(r["config"]["samples"], 3);
    assert_eq!(r["config"]["seed"], 5);
    std::fs::write(&cfg, "entri = \"s4\"\n").unwrap();
    assert_eq!(code(&ustar(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn reports_are_reproducible_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(code(&ustar(&["verify", "--entry", "bergman", "--samples", "10", "--seed", "3", "--out", p.to_str().unwrap()])), 0);
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(without_timestamp(&ta), without_timestamp(&tb));
    let r = read_json(&a);
    let tol = check(&r, "einstein")["tolerance"].to_string();
    assert_eq!(tol, "9.9999999999999995e-7");
}

#[test]
fn transform_s4_skips_zero_set_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = ustar(&["transform", "--entry", "s4", "--samples", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert!(r["skipped_zero_moment"].as_u64().unwrap() > 0);
    for p in r["charts"].as_array().unwrap().iter().flat_map(|c| c["skipped_points"].as_array().unwrap()) {
        // skipped points lie on x = 0, |y| = 1, i.e. 4u² = 1
        let v: Vec<f64> = p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let (r2, s2) = (v[0] * v[0] + v[1] * v[1], v[2] * v[2] + v[3] * v[3]);
        let u = s2.sqrt() / (1.0 + r2 + s2);
        assert!((1.0 - 4.0 * u * u).abs() < 1e-12);
    }
    for name in ["parallel_complex_structure", "torsion", "invariant_volume"] {
        for chart in ["stereo", "uv", "cartesian"] {
            assert_eq!(check(&r, &format!("{name}@{chart}"))["pass"], true);
        }
    }
    let first = &r["charts"][0]["christoffel"][0];
    assert_eq!(first["gamma"].as_array().unwrap().len(), 64);
}

#[test]
fn transform_bergman_matches_scalar_flat_companion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = ustar(&["transform", "--entry", "bergman", "--samples", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read_json(&out);
    assert!(check(&r, "conformal_companion_metric")["max_residual"].as_f64().unwrap() <= 1e-6);
    assert!(check(&r, "conformal_levi_civita")["max_residual"].as_f64().unwrap() <= 1e-6);
    // oracle: μ₁ = 1/(4ρ) and g = ρ⁻² g̃ give μ₁⁻² g = 16 g̃
    let scale = r["conformal"]["scale"].as_f64().unwrap();
    assert!((scale - 16.0).abs() < 1e-9, "{scale}");
}

#[test]
fn transform_without_killing_field_is_a_usage_error() {
    let o = ustar(&["transform", "--entry", "s4_perturbed"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NoKillingField"));
    assert_eq!(code(&ustar(&["transform", "--entry", "s4", "--killing", "nowhere"])), 2);
}

#[test]
fn transform_of_non_quaternionic_kahler_base_fails() {
    // the scalar-flat metric is not Einstein: its Killing field has no moment section
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    assert_eq!(code(&ustar(&["transform", "--entry", "scalflat", "--out", out.to_str().unwrap()])), 1);
    assert_eq!(read_json(&out)["pass"], false);
}

#[test]
fn holonomy_surveys_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    let o = ustar(&["holonomy", "--entry", "bergman", "--loops", "12", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read_json(&out);
    let s = &r["survey"];
    assert_eq!(s["n_loops"], 12);
    assert_eq!(s["pass_fraction"].as_f64().unwrap(), 1.0);
    assert!(s["max_defect"].as_f64().unwrap() <= 1e-4);
    assert_eq!(s["frame_hash"].as_str().unwrap().len(), 64);

    let o = ustar(&["holonomy", "--entry", "euclidean4", "--connection", "flat-control", "--loops", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(check(&read_json(&out), "identity")["max_residual"].as_f64().unwrap() <= 1e-9);

    // negative control
    let o = ustar(&["holonomy", "--entry", "bergman", "--connection", "levi-civita", "--loops", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn hyperkahler_side_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    for args in [
        vec!["hk", "--entry", "flat_hk_2", "--samples", "4"],
        vec!["hk", "--entry", "bergman", "--samples", "4"],
        vec!["hk", "--entry", "calabi", "--samples", "3"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", out.to_str().unwrap()]);
        let o = ustar(&a);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(read_json(&out)["pass"], true);
    }
    assert_eq!(code(&ustar(&["hk", "--entry", "s2"])), 2);
}
