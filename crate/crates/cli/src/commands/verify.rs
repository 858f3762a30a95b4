//! `verify`: an entry's expected-invariant table.

use ustar_core::gallery::regression::RegressionFile;
use ustar_core::gallery::{Expectation, GalleryEntry};
use ustar_core::report::{CheckRecord, Worst};
use ustar_core::tensorcalc::metric_curvature;

use crate::config::SuiteConfig;
use crate::output::Envelope;
use crate::Failure;

const REGRESSION_CHECK: &str = "einstein_lambda_regression";

fn selected(name: &str, filters: &[String]) -> bool {
    filters.is_empty() || filters.iter().any(|f| name.starts_with(f.as_str()))
}

/// Mean of `R/n` over the samples against the committed regression constant.
fn einstein_regression(e: &GalleryEntry, cfg: &SuiteConfig) -> Option<CheckRecord> {
    let file = RegressionFile::bundled().ok()?;
    let c = file.get(&format!("{}_einstein_lambda", e.id))?;
    let mut worst = Worst::default();
    for p in e.sample(cfg.samples, cfg.seed) {
        let lambda = metric_curvature(&e.metric, &p).map(|m| m.scalar / e.dim() as f64).unwrap_or(f64::NAN);
        worst.update((lambda - c.value).abs(), &p);
    }
    let mut rec = worst.record(REGRESSION_CHECK, cfg.tol.unwrap_or(c.tol));
    let mut note = format!("committed lambda {:.16e}", c.value);
    if !file.is_current() {
        note.push_str("; regression file predates the current generator");
    }
    rec = rec.with_note(note);
    Some(rec)
}

pub fn checks(e: &GalleryEntry, cfg: &SuiteConfig) -> Result<Vec<CheckRecord>, Failure> {
    let expectations: Vec<Expectation> = e
        .expectations
        .iter()
        .map(|x| match cfg.tol {
            Some(t) => x.with_tolerance(t),
            None => x.clone(),
        })
        .filter(|x| selected(&x.name(), &cfg.checks))
        .collect();
    let mut out: Vec<CheckRecord> = expectations
        .iter()
        .map(|x| {
            e.check(x, cfg.samples, cfg.seed).unwrap_or_else(|err| {
                CheckRecord::new(x.name(), f64::NAN, Vec::new(), x.tolerance()).with_note(err.to_string())
            })
        })
        .collect();
    let wants_einstein = expectations.iter().any(|x| matches!(x, Expectation::Einstein { .. }))
        || (!cfg.checks.is_empty() && selected(REGRESSION_CHECK, &cfg.checks));
    if wants_einstein {
        out.extend(einstein_regression(e, cfg));
    }
    if out.is_empty() && !cfg.checks.is_empty() {
        return Err(Failure::Usage(format!("no check of entry `{}` matches {:?}", e.id, cfg.checks)));
    }
    Ok(out)
}

pub fn run(cfg: &SuiteConfig) -> Result<bool, Failure> {
    let e = super::entry(cfg)?;
    let mut env = Envelope::new("verify", cfg);
    env.checks = checks(&e, cfg)?;
    env.write(cfg.format, cfg.out.as_deref())?;
    Ok(env.pass())
}
