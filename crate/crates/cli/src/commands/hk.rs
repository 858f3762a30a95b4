//! `hk`: flat hyperkähler spaces and their Haydys form, Swann bundles over
//! the quaternionic Kähler entries, and the Calabi quotient (`--entry calabi`).

use ustar_core::gallery::flat::{flat_hk_circle, flat_hk_moment, w_index, z_index};
use ustar_core::gallery::GalleryEntry;
use ustar_core::hkqk::{haydys_form, haydys_residuals, swann_sample, CalabiSlice, HyperkahlerData, SwannChart};
use ustar_core::qk2ustar::QkData;
use ustar_core::report::{CheckRecord, Worst};
use ustar_core::structures::quaternion_relations_residual;
use ustar_core::tensorcalc::Form;

use crate::config::SuiteConfig;
use crate::output::Envelope;
use crate::Failure;

pub const CALABI_ENTRY: &str = "calabi";

/// `Σ_a dx_a∧dy_a − dp_a∧dq_a` in the flat coordinates.
fn haydys_pattern(m: usize) -> Form<f64> {
    let mut f = Form::zeros(4 * m, 2);
    for a in 0..m {
        f.set(&[z_index(a), z_index(a) + 1], 1.0);
        f.set(&[w_index(m, a), w_index(m, a) + 1], -1.0);
    }
    f
}

fn flat(m: usize, points: &[Vec<f64>], tol: Option<f64>, env: &mut Envelope) {
    let hk = HyperkahlerData::flat(m);
    env.checks.extend(hk.check(points, tol.unwrap_or(1e-12)).checks);
    let (mu, x) = (flat_hk_moment(m), flat_hk_circle(m));
    let pattern = haydys_pattern(m);
    let mut w: [Worst; 6] = Default::default();
    for p in points {
        let vals = (|| -> ustar_core::error::Result<[f64; 6]> {
            let r = haydys_residuals(&hk, &mu, &x, p)?;
            Ok([
                hk.moment_map_residual(&mu, &x, p)?,
                haydys_form(&hk, &mu, &x, p)?.sub(&pattern).max_abs(),
                r.closure,
                r.type11[0],
                r.type11[1],
                r.type11[2],
            ])
        })()
        .unwrap_or([f64::NAN; 6]);
        for (wi, v) in w.iter_mut().zip(vals) {
            wi.update(v, p);
        }
    }
    let names = [
        ("moment_map", 1e-12),
        ("haydys_pattern", 1e-10),
        ("haydys_closed", 1e-8),
        ("haydys_type11_i", 1e-9),
        ("haydys_type11_j", 1e-9),
        ("haydys_type11_k", 1e-9),
    ];
    for (wi, (name, t)) in w.iter().zip(names) {
        env.checks.push(wi.record(name, tol.unwrap_or(t)));
    }
}

fn swann(e: &GalleryEntry, cfg: &SuiteConfig, env: &mut Envelope) -> Result<(), Failure> {
    let k = e.killing.clone().ok_or_else(|| Failure::Usage(format!("NoKillingField: entry `{}` carries no Killing field", e.id)))?;
    let base_pts = e.sample(cfg.samples, cfg.seed);
    let d = QkData::new(e.metric.clone(), k, e.orientation).map_err(|err| Failure::Usage(err.to_string()))?;
    let (d, _) = d.calibrate(&base_pts).map_err(super::runtime)?;
    let pts = swann_sample(&base_pts, cfg.seed);
    let (sc, fit) = SwannChart::calibrate(d, &pts).map_err(super::runtime)?;
    env.insert("swann_c", fit.c);
    env.insert("frame_convention", ustar_core::hkqk::FRAME_CONVENTION);
    env.checks.extend(sc.check(&pts, cfg.tol.unwrap_or(1e-7)).checks);
    let mut desc = Worst::default();
    let mut level = Worst::default();
    for x in &base_pts {
        let (res, mu, expect) = sc
            .level_point(x)
            .and_then(|y| sc.descended_moment(&y))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        level.update(res, x);
        desc.update((mu - expect).abs(), x);
    }
    env.checks.push(level.record("level_set_generator", cfg.tol.unwrap_or(1e-8)));
    env.checks.push(desc.record("descended_moment", cfg.tol.unwrap_or(1e-8)).with_note("mu = -1/mu1 on the level set"));
    Ok(())
}

fn calabi(m: usize, level: f64, cfg: &SuiteConfig, env: &mut Envelope) -> Result<(), Failure> {
    let sl = CalabiSlice::new(m, level, 0).map_err(|e| Failure::Usage(e.to_string()))?;
    let pts = sl.sample(cfg.samples, cfg.seed);
    let tol = cfg.tol;
    let mut w: [Worst; 5] = Default::default();
    let mut kretschmann = Worst::default();
    for s in &pts {
        let vals = (|| -> ustar_core::error::Result<[f64; 5]> {
            let q = sl.quotient(s)?;
            let g = q.values();
            let ginv = g.inverse().ok_or(ustar_core::error::GeomError::DegenerateMetric { rel_det: 0.0 })?;
            let st: Vec<_> = q.forms.iter().map(|f| ginv.mul(&f.values().to_matrix()).scale(-1.0)).collect();
            let c = sl.curvature(s)?;
            if m == 1 {
                // Eguchi–Hanson: |Riem|² = 384·16ℓ⁴/r¹² with r² the ambient norm
                let r2: f64 = sl.embed(s).iter().map(|v| v * v).sum();
                let expect = 384.0 * 16.0 * level.powi(4) / r2.powi(6);
                kretschmann.update((c.riemann.squared_norm(&c.g, &c.ginv) - expect).abs() / expect, s);
            }
            Ok([q.horizontality(), q.closure(), quaternion_relations_residual(&st[0], &st[1], &st[2]), c.ricci.max_abs(), c.scalar.abs()])
        })()
        .unwrap_or([f64::NAN; 5]);
        for (wi, v) in w.iter_mut().zip(vals) {
            wi.update(v, s);
        }
    }
    let names = [
        ("horizontal_lift", 1e-10),
        ("forms_closed", 1e-6),
        ("quaternion_relations", 1e-10),
        ("ricci_flat", 1e-4),
        ("scalar_flat", 1e-4),
    ];
    for (wi, (name, t)) in w.iter().zip(names) {
        env.checks.push(wi.record(name, tol.unwrap_or(t)));
    }
    if m == 1 {
        env.checks.push(kretschmann.record("eguchi_hanson_kretschmann", tol.unwrap_or(1e-6)));
    }
    Ok(())
}

pub fn run(cfg: &SuiteConfig, m: usize, level: f64) -> Result<bool, Failure> {
    let mut env = Envelope::new("hk", cfg);
    if cfg.entry == CALABI_ENTRY {
        if m == 0 || !(level > 0.0) {
            return Err(Failure::Usage("calabi needs m ≥ 1 and a positive level".into()));
        }
        env.insert("m", m);
        env.insert("level", level);
        calabi(m, level, cfg, &mut env)?;
    } else {
        let manifest = super::manifest(cfg.manifest.as_deref())?;
        let e = super::entry(cfg)?;
        let row = manifest.get(&cfg.entry).expect("entry() checked the id");
        if row.constructor == "flat_hk" {
            let m = row.param.unwrap_or(1.0) as usize;
            flat(m, &e.sample(cfg.samples, cfg.seed), cfg.tol, &mut env);
        } else if e.dim() == 4 {
            swann(&e, cfg, &mut env)?;
        } else {
            return Err(Failure::Usage(format!("entry `{}` has no hyperkähler-side checks", e.id)));
        }
    }
    if env.checks.iter().any(|c: &CheckRecord| c.max_residual.is_nan()) {
        env.insert("note", "NaN residuals mark points where evaluation failed");
    }
    env.write(cfg.format, cfg.out.as_deref())?;
    Ok(env.pass())
}
