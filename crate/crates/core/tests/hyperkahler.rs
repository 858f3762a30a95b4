//! Flat hyperkähler spaces with the circle rotating the second factor:
//! triple relations, moment map, and the Haydys form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ustar_core::error::GeomError;
use ustar_core::gallery::flat::{flat_hk_circle, flat_hk_moment, w_index, z_index};
use ustar_core::hkqk::{haydys_form, haydys_residuals, HyperkahlerData};
use ustar_core::tensorcalc::{Form, ScalarField};

fn points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()).collect()
}

#[test]
fn flat_triples_are_hyperkahler() {
    for m in 1..=3 {
        let hk = HyperkahlerData::flat(m);
        let r = hk.check(&points(4 * m, 10, m as u64), 1e-12);
        assert!(r.all_pass(), "m = {m}: {r:?}");
    }
}

#[test]
fn moment_map_is_hamiltonian_for_omega1() {
    for m in 1..=3 {
        let hk = HyperkahlerData::flat(m);
        for x in points(4 * m, 10, 5) {
            let r = hk.moment_map_residual(&flat_hk_moment(m), &flat_hk_circle(m), &x).unwrap();
            assert!(r < 1e-12, "{r}");
        }
    }
}

#[test]
fn haydys_form_on_c2_is_dx_dy_minus_dp_dq() {
    let hk = HyperkahlerData::flat(1);
    for x in points(4, 10, 2) {
        let f = haydys_form(&hk, &flat_hk_moment(1), &flat_hk_circle(1), &x).unwrap();
        let mut expect = Form::zeros(4, 2);
        expect.set(&[z_index(0), z_index(0) + 1], 1.0);
        expect.set(&[w_index(1, 0), w_index(1, 0) + 1], -1.0);
        assert!(f.sub(&expect).max_abs() < 1e-12, "{:?}", f.sub(&expect).max_abs());
    }
}

#[test]
fn haydys_form_is_closed_and_type_11() {
    for m in [2, 3] {
        let hk = HyperkahlerData::flat(m);
        for x in points(4 * m, 5, 8) {
            let r = haydys_residuals(&hk, &flat_hk_moment(m), &flat_hk_circle(m), &x).unwrap();
            assert!(r.type11.iter().all(|v| *v <= 1e-9), "m = {m}: {r:?}");
            assert!(r.closure <= 1e-8, "m = {m}: {r:?}");
        }
    }
}

#[test]
fn perturbed_moment_map_is_rejected() {
    let m = 2;
    let hk = HyperkahlerData::flat(m);
    let base = flat_hk_moment(m);
    let bent = {
        let base = base.clone();
        ScalarField::new(base.chart().clone(), move |x| base.apply(x) + x[z_index(0)].clone() * 0.1)
    };
    let x = points(4 * m, 1, 4).remove(0);
    assert!(matches!(haydys_form(&hk, &bent, &flat_hk_circle(m), &x), Err(GeomError::NotMomentMap { .. })));
}

#[test]
fn circle_rotates_holomorphic_symplectic_form() {
    // L_X(ω₂ + iω₃) = i(ω₂ + iω₃): L_Xω₂ = −ω₃ and L_Xω₃ = ω₂
    let m = 3;
    let n = 4 * m;
    let hk = HyperkahlerData::flat(m);
    let field = flat_hk_circle(m);
    for x in points(n, 5, 13) {
        let xj = field.eval_jet(&x).unwrap();
        let w = hk.form_values(&x).unwrap();
        let lie = |om: &Form<f64>| {
            let mut out = Form::zeros(n, 2);
            for a in 0..n {
                for b in (a + 1)..n {
                    let v: f64 = (0..n)
                        .map(|k| om.get(&[k, b]) * xj[k].grad_at(a) + om.get(&[a, k]) * xj[k].grad_at(b))
                        .sum();
                    out.set(&[a, b], v);
                }
            }
            out
        };
        assert!(lie(&w[1]).add(&w[2]).max_abs() < 1e-12);
        assert!(lie(&w[2]).sub(&w[1]).max_abs() < 1e-12);
        assert!(lie(&w[0]).max_abs() < 1e-12);
    }
}
