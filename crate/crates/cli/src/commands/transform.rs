//! `transform`: the torsion-free `U*(2m)` connection of an entry, tabulated
//! at sample points and verified.

use serde::Serialize;
use ustar_core::error::GeomError;
use ustar_core::gallery::GalleryEntry;
use ustar_core::qk2ustar::{Calibration, ModifiedConnection, QkData};
use ustar_core::report::{CheckRecord, Worst};
use ustar_core::structures::Orientation;
use ustar_core::tensorcalc::{Connection, MetricField, VectorField};

use crate::config::SuiteConfig;
use crate::output::Envelope;
use crate::Failure;

pub const DEFAULT_TOL: f64 = 1e-6;

/// One Killing field with the chart it is written in.
struct Target {
    chart: String,
    main: bool,
    metric: MetricField,
    orientation: Orientation,
    killing: VectorField,
    samples: Vec<Vec<f64>>,
    zero_set: Vec<Vec<f64>>,
}

fn targets(e: &GalleryEntry, main_chart: &str, cfg: &SuiteConfig) -> Vec<Target> {
    let mut out = Vec::new();
    if let Some(k) = &e.killing {
        out.push(Target {
            chart: main_chart.into(),
            main: true,
            metric: e.metric.clone(),
            orientation: e.orientation,
            killing: k.clone(),
            samples: e.sample(cfg.samples, cfg.seed),
            zero_set: Vec::new(),
        });
    }
    for alt in &e.alternates {
        if let Some(k) = &alt.killing {
            out.push(Target {
                chart: alt.name.clone(),
                main: false,
                metric: alt.metric.clone(),
                orientation: alt.orientation,
                killing: k.clone(),
                samples: e.sample_alternate(alt, cfg.samples, cfg.seed).into_iter().map(|(_, q)| q).collect(),
                zero_set: alt.zero_set.clone(),
            });
        }
    }
    out
}

#[derive(Serialize)]
struct GammaSample {
    index: usize,
    point: Vec<f64>,
    /// `gamma[(k·n + i)·n + j] = Γᵏᵢⱼ`; null when evaluation failed.
    gamma: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ChartSection {
    chart: String,
    calibration: Option<Calibration>,
    evaluated: usize,
    skipped_zero_moment: usize,
    skipped_points: Vec<Vec<f64>>,
    christoffel: Vec<GammaSample>,
}

#[derive(Serialize)]
struct ConformalSample {
    index: usize,
    point: Vec<f64>,
    /// Row-major `μ₁⁻² g`.
    rescaled_metric: Vec<f64>,
    /// Row-major companion metric at the same point.
    companion_metric: Vec<f64>,
}

#[derive(Serialize)]
struct ConformalSection {
    /// Least-squares `s` in `μ₁⁻² g ≈ s · companion`.
    scale: f64,
    samples: Vec<ConformalSample>,
}

fn suffix(mut c: CheckRecord, chart: &str) -> CheckRecord {
    c.check_name = format!("{}@{chart}", c.check_name);
    c
}

/// Sorts points into evaluable ones and those on the zero set of the moment.
fn classify(data: &QkData, points: &[Vec<f64>]) -> (Vec<(usize, Vec<f64>)>, Vec<Vec<f64>>) {
    let (mut kept, mut skipped) = (Vec::new(), Vec::new());
    for (i, x) in points.iter().enumerate() {
        match data.moment_section(x) {
            Err(GeomError::ZeroMoment { .. }) => skipped.push(x.clone()),
            _ => kept.push((i, x.clone())),
        }
    }
    (kept, skipped)
}

fn run_target(t: &Target, tol: f64, env: &mut Envelope) -> Result<(ChartSection, Option<QkData>, Vec<(usize, Vec<f64>)>), Failure> {
    let raw = QkData::new(t.metric.clone(), t.killing.clone(), t.orientation).map_err(|e| match e {
        GeomError::DimensionMismatch { .. } => Failure::Usage(format!("transform needs a four-dimensional chart: {e}")),
        other => Failure::Runtime(other.to_string()),
    })?;
    let (fit_points, _) = classify(&raw, &t.samples);
    let fit_points: Vec<Vec<f64>> = fit_points.into_iter().map(|(_, x)| x).collect();
    let mut section = ChartSection {
        chart: t.chart.clone(),
        calibration: None,
        evaluated: 0,
        skipped_zero_moment: 0,
        skipped_points: Vec::new(),
        christoffel: Vec::new(),
    };
    let (data, cal) = match raw.calibrate(&fit_points) {
        Ok(v) => v,
        Err(e) => {
            env.checks.push(suffix(CheckRecord::new("calibration", f64::NAN, Vec::new(), tol).with_note(e.to_string()), &t.chart));
            return Ok((section, None, Vec::new()));
        }
    };
    section.calibration = Some(cal);
    let all: Vec<Vec<f64>> = t.samples.iter().chain(&t.zero_set).cloned().collect();
    let (kept, skipped) = classify(&data, &all);
    section.evaluated = kept.len();
    section.skipped_zero_moment = skipped.len();
    section.skipped_points = skipped;
    let points: Vec<Vec<f64>> = kept.iter().map(|(_, x)| x.clone()).collect();
    let report = data.verify(&points, tol).map_err(super::runtime)?;
    env.checks.extend(report.checks.into_iter().map(|c| suffix(c, &t.chart)));
    let conn = ModifiedConnection::new(data.clone());
    section.christoffel = kept
        .iter()
        .map(|(i, x)| GammaSample { index: *i, point: x.clone(), gamma: conn.gamma(x).ok().map(|g| g.data().to_vec()) })
        .collect();
    Ok((section, Some(data), kept))
}

/// Compares `μ₁⁻² g` with the entry's companion metric up to one constant
/// factor, and `∇̃` with the companion's Levi-Civita connection.
fn conformal(data: &QkData, companion: &MetricField, kept: &[(usize, Vec<f64>)], tol: f64, env: &mut Envelope) -> ConformalSection {
    let mut samples = Vec::new();
    for (i, x) in kept {
        let pair = (|| -> ustar_core::error::Result<(Vec<f64>, Vec<f64>)> {
            let mu1 = data.moment_section(x)?.mu1;
            let g = data.metric().eval(x)?.scale(1.0 / (mu1 * mu1));
            Ok((g.data().to_vec(), companion.eval(x)?.data().to_vec()))
        })();
        let (rescaled_metric, companion_metric) = pair.unwrap_or_else(|_| (vec![f64::NAN; 16], vec![f64::NAN; 16]));
        samples.push(ConformalSample { index: *i, point: x.clone(), rescaled_metric, companion_metric });
    }
    let (mut ab, mut bb) = (0.0, 0.0);
    for s in &samples {
        for (a, b) in s.rescaled_metric.iter().zip(&s.companion_metric) {
            ab += a * b;
            bb += b * b;
        }
    }
    let scale = ab / bb;
    let mut metric = Worst::default();
    let mut lc = Worst::default();
    for s in &samples {
        let size = s.companion_metric.iter().fold(0.0f64, |m, v| m.max(v.abs())) * scale.abs();
        let r = s.rescaled_metric.iter().zip(&s.companion_metric).fold(0.0f64, |m, (a, b)| m.max((a - scale * b).abs()));
        metric.update(r / size, &s.point);
        lc.update(data.conformal_discrepancy(companion, &s.point).unwrap_or(f64::NAN), &s.point);
    }
    env.checks.push(metric.record("conformal_companion_metric", tol).with_note(format!("mu1^-2 g = s * companion with s = {scale:.16e}")));
    env.checks.push(lc.record("conformal_levi_civita", tol));
    ConformalSection { scale, samples }
}

pub fn run(cfg: &SuiteConfig, killing: Option<&str>) -> Result<bool, Failure> {
    let e = super::entry(cfg)?;
    let manifest = super::manifest(cfg.manifest.as_deref())?;
    let main_chart = manifest.get(&e.id).and_then(|r| r.charts.first()).map_or("main", |c| c.name.as_str());
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut all = targets(&e, main_chart, cfg);
    if all.is_empty() {
        return Err(Failure::Usage(format!("NoKillingField: entry `{}` carries no Killing field", e.id)));
    }
    if let Some(name) = killing {
        let names: Vec<String> = all.iter().map(|t| t.chart.clone()).collect();
        all.retain(|t| t.chart == name);
        if all.is_empty() {
            return Err(Failure::Usage(format!("entry `{}` has no Killing field in chart `{name}`; known: {}", e.id, names.join(", "))));
        }
    }
    let mut env = Envelope::new("transform", cfg);
    env.insert("tolerance", tol);
    let mut sections = Vec::new();
    let mut conformal_section = None;
    for t in &all {
        let (section, data, kept) = run_target(t, tol, &mut env)?;
        if let (true, Some(data), Some(companion)) = (t.main, &data, &e.companion) {
            conformal_section = Some(conformal(data, companion, &kept, tol, &mut env));
        }
        sections.push(section);
    }
    env.insert("skipped_zero_moment", sections.iter().map(|s| s.skipped_zero_moment).sum::<usize>());
    env.insert("charts", &sections);
    if let Some(c) = conformal_section {
        env.insert("conformal", c);
    }
    env.write(cfg.format, cfg.out.as_deref())?;
    Ok(env.pass())
}
