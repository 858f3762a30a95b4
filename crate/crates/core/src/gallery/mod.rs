//! Closed-form metrics, fields and structures as executable chart data.
//!
//! Each [`GalleryEntry`] carries its own expected-invariant table, read from
//! the bundled manifest, and [`GalleryEntry::self_test`] checks it.

pub mod bergman;
pub mod flat;
pub mod manifest;
pub mod s4;
pub mod regression;
pub mod siegel;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::report::{CheckRecord, Report, Worst};
use crate::structures::{
    kahler_check, kahler_potential_check, nijenhuis, AlmostComplexField, ComplexChartMetric, Orientation,
    QuaternionicTriple,
};
use crate::tensorcalc::{killing_residual, metric_curvature, MetricField, ScalarField, VectorField};

pub use manifest::{load_entry, Expectation, Manifest, ManifestEntry, BUNDLED_MANIFEST};
pub use siegel::{siegel_exterior, siegel_stable};

pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Another presentation of an entry's metric.
#[derive(Clone)]
pub struct AltChart {
    pub name: String,
    pub metric: MetricField,
    pub orientation: Orientation,
    pub killing: Option<VectorField>,
    /// Sampling box; unused when `from_main` is set.
    pub ranges: Vec<(f64, f64)>,
    /// Transition from the main chart.
    pub from_main: Option<PointMap>,
    /// Exact points where the moment section of `killing` vanishes.
    pub zero_set: Vec<Vec<f64>>,
}

impl AltChart {
    pub fn new(
        name: &str,
        metric: MetricField,
        orientation: Orientation,
        killing: Option<VectorField>,
        ranges: Vec<(f64, f64)>,
    ) -> Self {
        Self { name: name.into(), metric, orientation, killing, ranges, from_main: None, zero_set: Vec::new() }
    }

    pub fn with_zero_set(mut self, points: Vec<Vec<f64>>) -> Self {
        self.zero_set = points;
        self
    }

    pub fn with_map<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.from_main = Some(Arc::new(f));
        self
    }
}

#[derive(Clone)]
pub struct GalleryEntry {
    pub id: String,
    pub summary: String,
    pub metric: MetricField,
    /// Sampling box for the main chart.
    pub ranges: Vec<(f64, f64)>,
    pub orientation: Orientation,
    pub killing: Option<VectorField>,
    pub structure: Option<AlmostComplexField>,
    pub triple: Option<QuaternionicTriple>,
    /// Kähler potential `f` with the expected `s` in `i∂∂̄f = s·ω`.
    pub potential: Option<(ScalarField, f64)>,
    /// Holomorphic chart and the factor `k` with `g = k·Re Σ h dz dz̄`.
    pub complex_chart: Option<(ComplexChartMetric, f64)>,
    pub to_complex: Option<PointMap>,
    /// A related metric on the same chart (the conformal scalar-flat
    /// companion of the Bergman family).
    pub companion: Option<MetricField>,
    pub alternates: Vec<AltChart>,
    pub param: Option<f64>,
    pub expectations: Vec<Expectation>,
}

impl GalleryEntry {
    pub fn new(id: &str, summary: &str, metric: MetricField, ranges: Vec<(f64, f64)>) -> Self {
        assert_eq!(ranges.len(), metric.dim());
        Self {
            id: id.into(),
            summary: summary.into(),
            metric,
            ranges,
            orientation: Orientation::Coordinate,
            killing: None,
            structure: None,
            triple: None,
            potential: None,
            complex_chart: None,
            to_complex: None,
            companion: None,
            alternates: Vec::new(),
            param: None,
            expectations: Vec::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn alternate(&self, name: &str) -> Option<&AltChart> {
        self.alternates.iter().find(|a| a.name == name)
    }

    /// `n` points drawn uniformly from the sampling box, keeping those the
    /// chart accepts. Deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        sample_box(self.chart(), &self.ranges, n, seed)
    }

    /// Points of an alternate chart: images of main-chart samples when a
    /// transition is known, otherwise drawn from its own box.
    pub fn sample_alternate(&self, alt: &AltChart, n: usize, seed: u64) -> Vec<(Option<Vec<f64>>, Vec<f64>)> {
        match &alt.from_main {
            Some(f) => self
                .sample(n, seed)
                .into_iter()
                .map(|p| {
                    let q = f(&p);
                    (Some(p), q)
                })
                .filter(|(_, q)| alt.metric.chart().contains(q))
                .collect(),
            None => sample_box(alt.metric.chart(), &alt.ranges, n, seed).into_iter().map(|q| (None, q)).collect(),
        }
    }

    /// Runs the expected-invariant table on `n` sample points.
    pub fn self_test(&self, n: usize, seed: u64) -> Result<Report> {
        let mut report = Report::default();
        for e in &self.expectations {
            report.push(self.check(e, n, seed)?);
        }
        Ok(report)
    }

    fn metric_for(&self, chart: &Option<String>) -> Result<(MetricField, Vec<Vec<f64>>)> {
        match chart.as_deref() {
            None | Some("main") => Ok((self.metric.clone(), Vec::new())),
            Some(name) => {
                let alt = self
                    .alternate(name)
                    .ok_or_else(|| GeomError::Invalid(format!("entry {} has no chart {name}", self.id)))?;
                Ok((alt.metric.clone(), Vec::new()))
            }
        }
    }

    fn points_for(&self, chart: &Option<String>, n: usize, seed: u64) -> Vec<Vec<f64>> {
        match chart.as_deref() {
            None | Some("main") => self.sample(n, seed),
            Some(name) => match self.alternate(name) {
                Some(alt) => self.sample_alternate(alt, n, seed).into_iter().map(|(_, q)| q).collect(),
                None => Vec::new(),
            },
        }
    }

    /// Evaluates one expectation.
    pub fn check(&self, e: &Expectation, n: usize, seed: u64) -> Result<CheckRecord> {
        let name = e.name();
        let mut worst = Worst::default();
        match e {
            Expectation::ScalarCurvature { value, tol, chart } => {
                let (g, _) = self.metric_for(chart)?;
                for p in self.points_for(chart, n, seed) {
                    let r = metric_curvature(&g, &p)?.scalar;
                    worst.update((r - value).abs(), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::ScalarSpread { tol } => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for p in self.sample(n, seed) {
                    let r = metric_curvature(&self.metric, &p)?.scalar;
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                Ok(CheckRecord::new(name, hi - lo, Vec::new(), *tol).with_note(format!("scalar curvature in [{lo:.12e}, {hi:.12e}]")))
            }
            Expectation::ConstantCurvature { kappa, tol } => {
                for p in self.sample(n, seed) {
                    let c = metric_curvature(&self.metric, &p)?;
                    let (k, res) = c.constant_curvature_residual();
                    worst.update(res.max((k - kappa).abs()), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::Sectional { a, b, value, tol, chart } => {
                let (g, _) = self.metric_for(chart)?;
                let dim = g.dim();
                let mut u = vec![0.0; dim];
                let mut v = vec![0.0; dim];
                u[*a] = 1.0;
                v[*b] = 1.0;
                for p in self.points_for(chart, n, seed) {
                    let k = metric_curvature(&g, &p)?.sectional(&u, &v);
                    worst.update((k - value).abs(), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::Einstein { tol } => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for p in self.sample(n, seed) {
                    let c = metric_curvature(&self.metric, &p)?;
                    let lambda = c.scalar / self.dim() as f64;
                    lo = lo.min(lambda);
                    hi = hi.max(lambda);
                    // relative to the metric's size so the check is scale-free
                    worst.update(c.einstein_residual() / c.g.max_abs(), &p);
                }
                let spread = hi - lo;
                let mut rec = worst.record(name, *tol);
                rec.max_residual = rec.max_residual.max(spread);
                rec.pass = rec.max_residual <= *tol;
                Ok(rec.with_note(format!("lambda in [{lo:.12e}, {hi:.12e}]")))
            }
            Expectation::Killing { tol } => {
                let x = self.killing.as_ref().ok_or_else(|| missing(&self.id, "Killing field"))?;
                for p in self.sample(n, seed) {
                    let g = self.metric.eval(&p)?;
                    worst.update(killing_residual(&self.metric, x, &p)? / g.max_abs(), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::Kahler { tol } => {
                let j = self.structure.as_ref().ok_or_else(|| missing(&self.id, "complex structure"))?;
                for p in self.sample(n, seed) {
                    let k = kahler_check(&self.metric, j, &p)?;
                    let nij = nijenhuis(j, &p)?;
                    let sq = j.square_residual(&p)?;
                    worst.update(k.hermitian_residual.max(k.domega_residual).max(nij).max(sq), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::ScalarFlat { tol } => {
                for p in self.sample(n, seed) {
                    worst.update(metric_curvature(&self.metric, &p)?.scalar.abs(), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::RicciAsd { tol } => {
                let j = self.structure.as_ref().ok_or_else(|| missing(&self.id, "complex structure"))?;
                for p in self.sample(n, seed) {
                    let c = metric_curvature(&self.metric, &p)?;
                    let i = j.eval(&p)?;
                    let omega = crate::tensorcalc::Form::from_matrix(&crate::structures::hermitian_form(&c.g, &i));
                    // ρ(X, Y) = Ric(IX, Y)
                    let rho = crate::tensorcalc::Form::from_matrix(&i.transpose().mul(&c.ricci));
                    let (wp, wm) = crate::structures::sd_split(&c.g, Orientation::Coordinate, &omega)?;
                    let orient = if wp.max_abs() >= wm.max_abs() { Orientation::Coordinate } else { Orientation::Reversed };
                    let (rp, _) = crate::structures::sd_split(&c.g, orient, &rho)?;
                    worst.update(rp.max_abs(), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::Potential { tol } => {
                let (f, scale) = self.potential.as_ref().ok_or_else(|| missing(&self.id, "potential"))?;
                let j = self.structure.as_ref().ok_or_else(|| missing(&self.id, "complex structure"))?;
                for p in self.sample(n, seed) {
                    let g = self.metric.jets(&p)?;
                    let w = crate::structures::hermitian_form(&g.values(), &j.eval(&p)?);
                    let omega = crate::tensorcalc::Form::from_matrix(&w);
                    let r = kahler_potential_check(f, j, &omega, &p)?;
                    worst.update(r.residual.max((r.scale - scale).abs()), &p);
                }
                Ok(worst.record(name, *tol))
            }
            Expectation::ChartConsistency { tol } => {
                for alt in &self.alternates {
                    let Some(_) = alt.from_main else { continue };
                    for (p, q) in self.sample_alternate(alt, n, seed) {
                        let p = p.expect("mapped sample");
                        let c1 = metric_curvature(&self.metric, &p)?;
                        let c2 = metric_curvature(&alt.metric, &q)?;
                        let r1 = c1.riemann.squared_norm(&c1.g, &c1.ginv);
                        let r2 = c2.riemann.squared_norm(&c2.g, &c2.ginv);
                        let scale = 1.0 + r1.abs().sqrt();
                        worst.update(((c1.scalar - c2.scalar).abs() / scale).max((r1 - r2).abs() / (scale * scale)), &p);
                    }
                }
                Ok(worst.record(name, *tol))
            }
        }
    }
}

fn missing(id: &str, what: &str) -> GeomError {
    GeomError::Invalid(format!("entry {id} has no {what}"))
}

/// Uniform samples from a box, filtered by the chart domain.
pub fn sample_box(chart: &Chart, ranges: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 100 * n.max(1) {
        tries += 1;
        let p: Vec<f64> = ranges.iter().map(|(a, b)| rng.random_range(*a..*b)).collect();
        if chart.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Constructs an entry from a constructor name and optional parameter,
/// without expectations.
pub fn construct(constructor: &str, param: Option<f64>) -> Result<GalleryEntry> {
    let c = param.unwrap_or(0.0);
    let e = match constructor {
        "s4" => s4::s4_entry(),
        "s4_scalarflat" => s4::s4_scalarflat_entry(),
        "s4_perturbed" => s4::s4_perturbed_entry(param.unwrap_or(0.1)),
        "hyperbolic" => s4::hyperbolic_factor_entry(),
        "s2" => s4::sphere_factor_entry(),
        "euclidean" => flat::euclidean_entry(param.map(|v| v as usize).unwrap_or(4)),
        "fubini_study" => flat::fubini_study_entry(),
        "bergman" => bergman::bergman_entry(c),
        "scalflat" => bergman::scalflat_entry(c),
        "flat_hk" => {
            let m = param.unwrap_or(1.0);
            if m < 1.0 || m.fract() != 0.0 {
                return Err(GeomError::Invalid(format!("flat_hk needs a positive integer m, got {m}")));
            }
            flat::flat_hk_entry(m as usize)
        }
        other => return Err(GeomError::Invalid(format!("unknown gallery constructor {other}"))),
    };
    Ok(e)
}
