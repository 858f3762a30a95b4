//! Derived regression constants: negative-control residuals and fitted
//! constants computed once by independent oracles and committed with the
//! hash of this generator.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::Jet2;
use crate::linalg::Mat;
use crate::probe::{holonomy_survey, SurveyOptions};
use crate::qk2ustar::{parallel_residual, ModifiedConnection, QkData};
use crate::report::{CheckRecord, Report};
use crate::structures::{kahler_check, nijenhuis, standard_j, AlmostComplexField};
use crate::tensorcalc::fd::partial_vec_richardson;
use crate::tensorcalc::{christoffel_from, killing_residual, levi_civita, riemann_fd, Christoffel, MetricField, VectorField};

use super::{bergman, load_entry};
use crate::hkqk::SwannChart;

/// Committed constants file.
pub const BUNDLED_REGRESSION: &str = include_str!("../../data/regression.toml");
const GENERATOR_SOURCE: &str = include_str!("regression.rs");

/// Point `(ρ, x₁, x₂, x₃)` with `ρ = 1` used by the Bergman-family controls.
pub const RHO_ONE: [f64; 4] = [1.0, 0.3, -0.2, 0.4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionConstant {
    pub name: String,
    pub value: f64,
    /// Absolute tolerance for recomputation.
    pub tol: f64,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFile {
    pub schema_version: u32,
    pub generator_sha256: String,
    #[serde(rename = "constant")]
    pub constants: Vec<RegressionConstant>,
}

impl RegressionFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = toml::from_str(text).map_err(|e| GeomError::Invalid(format!("regression file: {e}")))?;
        if f.schema_version != 1 {
            return Err(GeomError::Invalid(format!("unsupported regression schema {}", f.schema_version)));
        }
        Ok(f)
    }

    pub fn bundled() -> Result<Self> {
        Self::parse(BUNDLED_REGRESSION)
    }

    pub fn get(&self, name: &str) -> Option<&RegressionConstant> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        toml::to_string_pretty(self).expect("serializable")
    }

    /// Whether the committed constants came from the current generator.
    pub fn is_current(&self) -> bool {
        self.generator_sha256 == generator_hash()
    }

    /// Compares recomputed constants against the committed ones.
    pub fn compare(&self, computed: &[RegressionConstant]) -> Report {
        let mut r = Report::default();
        for c in computed {
            match self.get(&c.name) {
                Some(s) => r.push(CheckRecord::new(c.name.clone(), (c.value - s.value).abs(), vec![], s.tol)),
                None => r.push(CheckRecord::new(c.name.clone(), f64::INFINITY, vec![], c.tol).with_note("missing from file")),
            }
        }
        r
    }
}

pub fn generator_hash() -> String {
    Sha256::digest(GENERATOR_SOURCE.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Committed value of a constant.
pub fn constant(name: &str) -> Option<f64> {
    RegressionFile::bundled().ok()?.get(name).map(|c| c.value)
}

/// Christoffel symbols from Richardson differences of the metric components.
fn christoffel_fd(g: &MetricField, x: &[f64], h: f64) -> Result<Christoffel> {
    let n = g.dim();
    let gv = g.eval(x)?;
    let ginv = gv.inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
    let comp = |p: &[f64]| g.eval(p).map(|m| m.data().to_vec()).unwrap_or_else(|_| vec![f64::NAN; n * n]);
    let dg: Vec<Mat<f64>> = (0..n).map(|k| Mat::from_vec(n, partial_vec_richardson(comp, x, k, h))).collect();
    Ok(christoffel_from(&ginv, &dg))
}

/// Einstein constant `R/n` using only finite differences of `g`.
pub fn einstein_constant_fd(g: &MetricField, x: &[f64]) -> Result<(f64, f64)> {
    let r = riemann_fd(|p| christoffel_fd(g, p, 1e-3), x, 1e-3)?;
    let mc = crate::tensorcalc::MetricCurvature::from_parts(g.eval(x)?, r)?;
    Ok((mc.scalar / g.dim() as f64, mc.einstein_residual()))
}

/// `J = P J₀ P⁻¹` with `P = Id + ε(x₀ E₀₂ + x₂ E₁₃)`: almost complex but not
/// integrable.
pub fn perturbed_structure(eps: f64) -> Result<AlmostComplexField> {
    AlmostComplexField::new(Chart::euclidean("r4", 4), move |x| {
        let mut p = Mat::<Jet2>::identity(4);
        p[(0, 2)] = x[0].clone() * eps;
        p[(1, 3)] = x[2].clone() * eps;
        let j0 = standard_j(4).map(|v| Jet2::constant(*v));
        p.mul(&j0).mul(&p.inverse().expect("unipotent"))
    })
}

fn calibrated(id: &str) -> Result<QkData> {
    let e = load_entry(id)?;
    let killing = e.killing.clone().ok_or_else(|| GeomError::Invalid(format!("{id} has no Killing field")))?;
    Ok(QkData::new(e.metric.clone(), killing, e.orientation)?.calibrate(&e.sample(10, 1))?.0)
}

fn entry(name: &str, value: f64, tol: f64, oracle: &str) -> RegressionConstant {
    RegressionConstant { name: name.into(), value, tol, oracle: oracle.into() }
}

/// Recomputes every constant.
pub fn compute() -> Result<Vec<RegressionConstant>> {
    let mut out = Vec::new();

    let (lambda, _) = einstein_constant_fd(&bergman::bergman_metric(0.0), &RHO_ONE)?;
    out.push(entry("bergman_einstein_lambda", lambda, 1e-6, "R/4 from Richardson differences of Richardson-differenced Christoffel symbols"));

    let g = bergman::scalflat_metric(0.0);
    let radial = VectorField::new(g.chart().clone(), |x| {
        vec![x[0].clone(), Jet2::constant(0.0), Jet2::constant(0.0), Jet2::constant(0.0)]
    });
    out.push(entry("scalflat_radial_killing_residual", killing_residual(&g, &radial, &RHO_ONE)?, 1e-10, "max |L_{ρ∂ρ} g| at ρ = 1"));

    let j = perturbed_structure(0.1)?;
    out.push(entry("perturbed_nijenhuis", nijenhuis(&j, &[0.3, 0.1, 0.2, -0.5])?, 1e-10, "max |N_J| of the conjugated structure"));

    let k = kahler_check(&bergman::bergman_metric(0.0), &bergman::scalflat_structure(0.0)?, &RHO_ONE)?;
    out.push(entry("bergman_with_scalflat_i_domega", k.domega_residual, 1e-10, "max |dω| for the Bergman metric with the scalar-flat structure at ρ = 1"));
    out.push(entry("bergman_with_scalflat_i_hermitian", k.hermitian_residual, 1e-10, "hermitian residual of the same pair"));

    let d = calibrated("bergman")?;
    let lc = levi_civita(d.metric(), &RHO_ONE)?;
    let i = d.structure()?.eval_first_order(&RHO_ONE)?;
    out.push(entry("levi_civita_parallel_residual", parallel_residual(&lc, &i), 1e-10, "max |∇I| for the Levi-Civita connection at ρ = 1"));

    let sc = SwannChart::new(d.clone(), 2.0)?;
    let mut y = RHO_ONE.to_vec();
    y.extend([0.4, 1.1, -0.7, 1.3]);
    out.push(entry("swann_horizontal_lift_residual", sc.lift_residual(&y, false)?, 1e-10, "max |i_X̄φᵢ − c d(μᵢt)| without the moment terms"));

    let e = load_entry("bergman")?;
    let g0 = e.metric.eval(&RHO_ONE)?;
    let triple = d.triple(&RHO_ONE)?;
    let conn = ModifiedConnection::new(d);
    let opts = SurveyOptions { n_loops: 200, seed: 42, ..Default::default() };
    let (survey, _) = holonomy_survey(&conn, &g0, &triple, &RHO_ONE, &opts)?;
    out.push(entry("bergman_holonomy_pass_fraction", survey.pass_fraction, 0.0, "fraction of 200 seeded loops with U* defect ≤ 1e-4"));
    Ok(out)
}

/// Fresh constants file for the current generator.
pub fn regenerate() -> Result<RegressionFile> {
    Ok(RegressionFile { schema_version: 1, generator_sha256: generator_hash(), constants: compute()? })
}
