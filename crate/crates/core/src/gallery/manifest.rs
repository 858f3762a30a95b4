//! The gallery manifest: entries, their charts and expected invariants.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

use super::{construct, GalleryEntry};

/// Manifest shipped with the crate.
pub const BUNDLED_MANIFEST: &str = include_str!("../../data/gallery.toml");

/// One row of an expected-invariant table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    /// Riemannian scalar curvature equals `value`.
    ScalarCurvature {
        value: f64,
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chart: Option<String>,
    },
    /// Scalar curvature is constant (max − min).
    ScalarSpread { tol: f64 },
    /// `R_ijkl = κ(g_ik g_jl − g_il g_jk)`.
    ConstantCurvature { kappa: f64, tol: f64 },
    /// Sectional curvature of the coordinate plane `(∂_a, ∂_b)`.
    Sectional {
        a: usize,
        b: usize,
        value: f64,
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        chart: Option<String>,
    },
    /// `Ric = λg` with constant `λ`.
    Einstein { tol: f64 },
    Killing { tol: f64 },
    /// Hermitian, closed and integrable.
    Kahler { tol: f64 },
    /// `i∂∂̄f` is the recorded multiple of the Kähler form.
    Potential { tol: f64 },
    /// Scalar curvature and `‖Riem‖²` agree across charts.
    ChartConsistency { tol: f64 },
    /// Scalar curvature vanishes.
    ScalarFlat { tol: f64 },
    /// The Ricci form is anti-self-dual for the orientation of the Kähler form.
    RicciAsd { tol: f64 },
}

impl Expectation {
    pub fn name(&self) -> String {
        match self {
            Self::ScalarCurvature { value, chart, .. } => with_chart(format!("scalar_curvature={value}"), chart),
            Self::ScalarSpread { .. } => "scalar_curvature_constant".into(),
            Self::ConstantCurvature { kappa, .. } => format!("constant_curvature={kappa}"),
            Self::Sectional { a, b, value, chart, .. } => with_chart(format!("sectional({a},{b})={value}"), chart),
            Self::Einstein { .. } => "einstein".into(),
            Self::Killing { .. } => "killing".into(),
            Self::Kahler { .. } => "kahler".into(),
            Self::Potential { .. } => "kahler_potential".into(),
            Self::ChartConsistency { .. } => "chart_consistency".into(),
            Self::ScalarFlat { .. } => "scalar_flat".into(),
            Self::RicciAsd { .. } => "ricci_asd".into(),
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Self::ScalarCurvature { tol, .. }
            | Self::ScalarSpread { tol }
            | Self::ConstantCurvature { tol, .. }
            | Self::Sectional { tol, .. }
            | Self::Einstein { tol }
            | Self::Killing { tol }
            | Self::Kahler { tol }
            | Self::Potential { tol }
            | Self::ChartConsistency { tol }
            | Self::ScalarFlat { tol }
            | Self::RicciAsd { tol } => *tol,
        }
    }

    /// Same check at a different tolerance.
    pub fn with_tolerance(&self, t: f64) -> Self {
        let mut e = self.clone();
        match &mut e {
            Self::ScalarCurvature { tol, .. }
            | Self::ScalarSpread { tol }
            | Self::ConstantCurvature { tol, .. }
            | Self::Sectional { tol, .. }
            | Self::Einstein { tol }
            | Self::Killing { tol }
            | Self::Kahler { tol }
            | Self::Potential { tol }
            | Self::ChartConsistency { tol }
            | Self::ScalarFlat { tol }
            | Self::RicciAsd { tol } => *tol = t,
        }
        e
    }
}

fn with_chart(s: String, chart: &Option<String>) -> String {
    match chart {
        Some(c) => format!("{s}@{c}"),
        None => s,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartInfo {
    pub name: String,
    pub coordinates: Vec<String>,
    pub domain: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub constructor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    pub summary: String,
    #[serde(default)]
    pub charts: Vec<ChartInfo>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(rename = "entry", default)]
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| GeomError::Invalid(format!("malformed manifest: {e}")))?;
        if m.schema_version != 1 {
            return Err(GeomError::Invalid(format!("unsupported manifest schema_version {}", m.schema_version)));
        }
        let mut ids: Vec<&str> = m.entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeomError::Invalid(format!("duplicate manifest id {}", w[0])));
        }
        for e in &m.entries {
            for x in &e.expect {
                if !(x.tolerance() > 0.0) {
                    return Err(GeomError::Invalid(format!("entry {}: tolerance must be positive", e.id)));
                }
            }
        }
        Ok(m)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_MANIFEST).expect("bundled manifest parses")
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.id.as_str()).collect()
    }

    /// Builds an entry and attaches its expectations.
    pub fn load(&self, id: &str) -> Result<GalleryEntry> {
        let row = self.get(id).ok_or_else(|| GeomError::Invalid(format!("unknown gallery entry {id}")))?;
        let mut e = construct(&row.constructor, row.param)?;
        e.id = row.id.clone();
        e.expectations = row.expect.clone();
        Ok(e)
    }
}

/// Loads an entry from the bundled manifest.
pub fn load_entry(id: &str) -> Result<GalleryEntry> {
    Manifest::bundled().load(id)
}
