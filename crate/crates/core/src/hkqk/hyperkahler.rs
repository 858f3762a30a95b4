//! Hyperkähler triples and the Haydys form `F = ω₁ + dd^c₁μ`.

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2};
use crate::linalg::Mat;
use crate::report::{Report, Worst};
use crate::structures::{quaternion_relations_residual, structure_from_form, type11_test};
use crate::tensorcalc::fd::partial_vec_richardson;
use crate::tensorcalc::{ext_d, Form, FormField, MetricField, ScalarField, VectorField};

/// Tolerance on `dμ = i_Xω₁` before a function is accepted as a moment map.
pub const MOMENT_MAP_TOL: f64 = 1e-7;

/// Metric with three Kähler forms whose structures `Iᵢ = −g⁻¹ωᵢ` should
/// satisfy the quaternion relations.
#[derive(Clone)]
pub struct HyperkahlerData {
    metric: MetricField,
    forms: [FormField; 3],
}

/// Point residuals of the hyperkähler conditions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HkResiduals {
    /// `max |dωᵢ|`.
    pub closure: f64,
    /// Quaternion relations of `(I, J, K)`.
    pub relations: f64,
    /// `max |g(IᵢX, IᵢY) − g(X, Y)|`.
    pub isometry: f64,
}

impl HkResiduals {
    pub fn max(&self) -> f64 {
        self.closure.max(self.relations).max(self.isometry)
    }
}

impl HyperkahlerData {
    pub fn new(metric: MetricField, forms: [FormField; 3]) -> Result<Self> {
        if forms.iter().any(|f| f.degree() != 2 || f.chart().dim() != metric.dim()) {
            return Err(GeomError::Invalid("hyperkähler forms must be 2-forms on the metric's chart".into()));
        }
        if metric.dim() % 4 != 0 {
            return Err(GeomError::DimensionMismatch { expected: 4 * (metric.dim() / 4 + 1), got: metric.dim() });
        }
        Ok(Self { metric, forms })
    }

    /// Flat `ℂᵐ ⊕ jℂᵐ` in the gallery's coordinates.
    pub fn flat(m: usize) -> Self {
        let chart = Chart::euclidean(format!("hk{m}"), 4 * m);
        let forms = crate::gallery::flat::flat_hk_forms(m).map(|w| {
            let strict = w.strict_components();
            FormField::new(chart.clone(), 2, move |_| strict.iter().map(|v| Jet2::constant(*v)).collect())
        });
        Self { metric: MetricField::euclidean(chart), forms }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn forms(&self) -> &[FormField; 3] {
        &self.forms
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    pub fn form_values(&self, x: &[f64]) -> Result<[Form<f64>; 3]> {
        Ok([self.forms[0].eval(x)?, self.forms[1].eval(x)?, self.forms[2].eval(x)?])
    }

    /// `(I, J, K)` with `ωᵢ(X, Y) = g(IᵢX, Y)`.
    pub fn structures(&self, x: &[f64]) -> Result<[Mat<f64>; 3]> {
        Ok(self.structures_jet(x)?.map(|m| m.values()))
    }

    /// The structures to first order.
    pub fn structures_jet(&self, x: &[f64]) -> Result<[Mat<Jet1>; 3]> {
        let jets = self.metric.jets(x)?;
        let mut out = Vec::with_capacity(3);
        for f in &self.forms {
            let w = f.eval_jet(x)?.truncate().to_matrix();
            out.push(structure_from_form(&jets.ginv, &w));
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    }

    pub fn residuals(&self, x: &[f64]) -> Result<HkResiduals> {
        let mut closure: f64 = 0.0;
        for f in &self.forms {
            closure = closure.max(ext_d(f, x)?.values().max_abs());
        }
        let [i, j, k] = self.structures(x)?;
        let g = self.metric.eval(x)?;
        let isometry = [&i, &j, &k]
            .iter()
            .map(|a| a.transpose().mul(&g).mul(a).sub(&g).max_abs())
            .fold(0.0, f64::max);
        Ok(HkResiduals { closure, relations: quaternion_relations_residual(&i, &j, &k), isometry })
    }

    pub fn check(&self, points: &[Vec<f64>], tol: f64) -> Report {
        let (mut c, mut r, mut s) = (Worst::default(), Worst::default(), Worst::default());
        for p in points {
            let res = self.residuals(p).unwrap_or(HkResiduals { closure: f64::NAN, relations: f64::NAN, isometry: f64::NAN });
            c.update(res.closure, p);
            r.update(res.relations, p);
            s.update(res.isometry, p);
        }
        let mut rep = Report::default();
        rep.push(c.record("forms_closed", tol));
        rep.push(r.record("quaternion_relations", tol));
        rep.push(s.record("structures_isometric", tol));
        rep
    }

    /// `max |dμ − i_Xω₁|` at `x`.
    pub fn moment_map_residual(&self, mu: &ScalarField, field: &VectorField, x: &[f64]) -> Result<f64> {
        let m = mu.eval_jet(x)?;
        let dmu: Vec<f64> = (0..x.len()).map(|k| m.grad_at(k)).collect();
        let ix = self.forms[0].eval(x)?.interior(&field.eval(x)?);
        Ok(dmu.iter().zip(ix.components()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// `F = ω₁ + dd^c₁μ` with `d^c₁μ = −dμ∘I₁`.
///
/// Fails with [`GeomError::NotMomentMap`] unless `dμ = i_Xω₁` at `x`.
pub fn haydys_form(hk: &HyperkahlerData, mu: &ScalarField, field: &VectorField, x: &[f64]) -> Result<Form<f64>> {
    let residual = hk.moment_map_residual(mu, field, x)?;
    if !(residual <= MOMENT_MAP_TOL) {
        return Err(GeomError::NotMomentMap { residual });
    }
    haydys_form_unchecked(hk, mu, x)
}

fn haydys_form_unchecked(hk: &HyperkahlerData, mu: &ScalarField, x: &[f64]) -> Result<Form<f64>> {
    let n = x.len();
    let m = mu.eval_jet(x)?;
    let dmu: Vec<Jet1> = (0..n).map(|k| m.partial(k)).collect();
    let i1 = &hk.structures_jet(x)?[0];
    // (dμ∘I)_j = Σ_k ∂_kμ Iᵏⱼ
    let dc: Vec<Jet1> = (0..n)
        .map(|j| (0..n).fold(Jet1::constant(0.0), |acc, k| acc - dmu[k].clone() * i1[(k, j)].clone()))
        .collect();
    let ddc = Form::one_form(dc).exterior_derivative();
    Ok(hk.forms[0].eval(x)?.add(&ddc))
}

/// Residuals of the Haydys form at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaydysResiduals {
    /// `max |dF|`, by Richardson differences of `F`.
    pub closure: f64,
    /// Type-(1,1) residual for each of `I, J, K`.
    pub type11: [f64; 3],
}

pub fn haydys_residuals(hk: &HyperkahlerData, mu: &ScalarField, field: &VectorField, x: &[f64]) -> Result<HaydysResiduals> {
    let f = haydys_form(hk, mu, field, x)?;
    let s = hk.structures(x)?;
    let type11 = [0, 1, 2].map(|a| type11_test(&f, &s[a]));
    let n = x.len();
    let eval = |p: &[f64]| haydys_form_unchecked(hk, mu, p).map(|f| f.components().to_vec()).unwrap_or_else(|_| vec![f64::NAN; n * n]);
    let d: Vec<Vec<f64>> = (0..n).map(|k| partial_vec_richardson(eval, x, k, 1e-3)).collect();
    let mut closure: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                let v = d[a][b * n + c] - d[b][a * n + c] + d[c][a * n + b];
                closure = closure.max(v.abs());
            }
        }
    }
    Ok(HaydysResiduals { closure, type11 })
}
