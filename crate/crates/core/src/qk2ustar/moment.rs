use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Scalar};
use crate::linalg::Mat;
use crate::structures::{sd_frame, sd_split, structure_from_form, AlmostComplexField, Orientation};
use crate::tensorcalc::{killing_residual, levi_civita, Christoffel, Form, MetricField, VectorField};

/// `|𝛍|` at or below this is treated as the zero set.
pub const ZERO_MOMENT_TOL: f64 = 1e-10;
/// Largest accepted `max |L_X g|`.
pub const KILLING_TOL: f64 = 1e-6;
/// Largest accepted residual of the calibration fit.
pub const CALIBRATION_TOL: f64 = 1e-5;

/// A 4-dimensional quaternionic Kähler metric (self-dual Einstein) with a
/// Killing field, plus the calibration constant `k` of its moment section.
#[derive(Clone)]
pub struct QkData {
    metric: MetricField,
    field: VectorField,
    orientation: Orientation,
    calibration: f64,
}

/// Result of fitting `d(k μ₁) = i_X ω₁`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Calibration {
    pub k: f64,
    pub residual: f64,
    pub samples: usize,
}

/// The moment section at one point.
#[derive(Clone, Debug)]
pub struct MomentSection {
    /// Self-dual frame `ω₁, ω₂, ω₃` from the orthonormal coframe.
    pub frame: [Form<f64>; 3],
    /// `𝛍 = Σ μᵢ ωᵢ` in that frame.
    pub components: [f64; 3],
    /// Rotated frame with `𝛍 = μ₁ ω₁'`.
    pub rotated: [Form<f64>; 3],
    pub mu1: f64,
    pub dmu1: Vec<f64>,
}

impl MomentSection {
    pub fn section(&self) -> Form<f64> {
        self.rotated[0].scale(self.mu1)
    }
}

/// `α = −½ d log μ₁`, with the second expression `−½ μ₁⁻¹ ω₁(X, ·)` kept
/// alongside for comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaForm {
    pub components: Vec<f64>,
    pub from_omega: Vec<f64>,
}

impl AlphaForm {
    pub fn agreement(&self) -> f64 {
        crate::linalg::max_abs_diff(&self.components, &self.from_omega)
    }
}

/// Residuals of `dμ₁ = i_Xω₁`, `μ₁θ₂ = i_Xω₃`, `μ₁θ₃ = −i_Xω₂` in the rotated
/// frame, where `∇ω₁ = θ₂⊗ω₃ − θ₃⊗ω₂`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MomentResiduals {
    pub dmu: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl MomentResiduals {
    pub fn max(&self) -> f64 {
        self.dmu.max(self.theta2).max(self.theta3)
    }
}

/// First-order data at a point.
pub(crate) struct PointJets {
    pub g: Mat<Jet1>,
    pub ginv: Mat<Jet1>,
    pub frame: [Form<Jet1>; 3],
    /// Calibrated components `μᵢ`.
    pub mu: [Jet1; 3],
    pub mu1: Jet1,
    /// `ω₁' = Σ μᵢ ωᵢ / μ₁`.
    pub omega1: Form<Jet1>,
    pub xfield: Vec<f64>,
    /// `(dX♭)⁺`, uncalibrated.
    pub sd: Form<Jet1>,
}

impl QkData {
    pub fn new(metric: MetricField, field: VectorField, orientation: Orientation) -> Result<Self> {
        if metric.dim() != 4 {
            return Err(GeomError::DimensionMismatch { expected: 4, got: metric.dim() });
        }
        Ok(Self { metric, field, orientation, calibration: 1.0 })
    }

    pub fn with_calibration(mut self, k: f64) -> Self {
        self.calibration = k;
        self
    }

    /// Fits the calibration constant over `points` and returns the calibrated
    /// data. Fails when the fit residual exceeds [`CALIBRATION_TOL`].
    pub fn calibrate(self, points: &[Vec<f64>]) -> Result<(Self, Calibration)> {
        let raw = self.clone().with_calibration(1.0);
        let (mut aa, mut ab) = (0.0, 0.0);
        let mut pairs = Vec::with_capacity(points.len());
        for x in points {
            let pj = raw.point_jets(x)?;
            let a = pj.mu1.gradient(4);
            let b = pj.omega1.values().interior(&pj.xfield).components().to_vec();
            aa += crate::linalg::dot(&a, &a);
            ab += crate::linalg::dot(&a, &b);
            pairs.push((a, b));
        }
        if !(aa > 0.0) {
            return Err(GeomError::Calibration("moment section has vanishing derivative on the sample".into()));
        }
        let k = ab / aa;
        let residual = pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b).map(move |(ai, bi)| (k * ai - bi).abs()))
            .fold(0.0, f64::max);
        let cal = Calibration { k, residual, samples: points.len() };
        if !(residual <= CALIBRATION_TOL) {
            return Err(GeomError::Calibration(format!("fit residual {residual:e} for k = {k}")));
        }
        Ok((self.with_calibration(k), cal))
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    pub fn chart(&self) -> &crate::chart::Chart {
        self.metric.chart()
    }

    pub(crate) fn point_jets(&self, x: &[f64]) -> Result<PointJets> {
        let kill = killing_residual(&self.metric, &self.field, x)?;
        if !(kill <= KILLING_TOL) {
            return Err(GeomError::NotKilling { residual: kill });
        }
        let g2 = self.metric.eval_jet(x)?;
        let xj = self.field.eval_jet(x)?;
        let xfield: Vec<f64> = xj.iter().map(|v| v.value()).collect();
        let dflat = Form::one_form(g2.mul_vec(&xj)).exterior_derivative();
        let g = g2.map(|v| v.truncate());
        let ginv = g.inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
        let (sd, _) = sd_split(&g, self.orientation, &dflat)?;
        let sign = match self.orientation {
            Orientation::Coordinate => 1.0,
            Orientation::Reversed => -1.0,
        };
        let frame = sd_frame(&g2, sign).map(|f| f.truncate());
        let k = self.calibration;
        let mu = [0, 1, 2].map(|a| sd.inner(&frame[a], &ginv) * (0.5 * k));
        let norm2 = mu.iter().fold(Jet1::constant(0.0), |acc, m| acc + m.clone() * m.clone());
        if !(norm2.value().sqrt() > ZERO_MOMENT_TOL) {
            return Err(GeomError::ZeroMoment { norm: norm2.value().sqrt() });
        }
        let mu1 = norm2.sqrt();
        let inv = mu1.recip();
        let mut omega1 = Form::zeros(4, 2);
        for a in 0..3 {
            omega1 = omega1.add(&frame[a].scale_by(&(mu[a].clone() * inv.clone())));
        }
        Ok(PointJets { g, ginv, frame, mu, mu1, omega1, xfield, sd })
    }

    /// `(dX♭)⁺` at `x` (uncalibrated).
    pub fn self_dual_differential(&self, x: &[f64]) -> Result<Form<f64>> {
        Ok(self.point_jets(x)?.sd.values())
    }

    pub fn moment_section(&self, x: &[f64]) -> Result<MomentSection> {
        let pj = self.point_jets(x)?;
        let mu = [0, 1, 2].map(|a| pj.mu[a].value());
        let rotated = rotated_frame(&pj.frame.clone().map(|f| f.values()), &mu);
        Ok(MomentSection {
            frame: pj.frame.map(|f| f.values()),
            components: mu,
            rotated,
            mu1: pj.mu1.value(),
            dmu1: pj.mu1.gradient(4),
        })
    }

    pub fn alpha(&self, x: &[f64]) -> Result<AlphaForm> {
        let pj = self.point_jets(x)?;
        let m1 = pj.mu1.value();
        let components = pj.mu1.gradient(4).iter().map(|d| -0.5 * d / m1).collect();
        let ix = pj.omega1.values().interior(&pj.xfield);
        let from_omega = ix.components().iter().map(|c| -0.5 * c / m1).collect();
        Ok(AlphaForm { components, from_omega })
    }

    /// The distinguished complex structure `I` with `ω₁'(X, Y) = g(IX, Y)`.
    pub fn structure(&self) -> Result<AlmostComplexField> {
        let data = self.clone();
        AlmostComplexField::from_first_order(self.chart().clone(), move |x| {
            let pj = data.point_jets(x)?;
            Ok(structure_from_form(&pj.ginv, &pj.omega1.to_matrix()))
        })
    }

    /// Values of `(I, J, K)` dual to the rotated frame.
    pub fn triple(&self, x: &[f64]) -> Result<[Mat<f64>; 3]> {
        let ms = self.moment_section(x)?;
        let ginv = self.metric.eval(x)?.inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
        Ok(ms.rotated.map(|w| structure_from_form(&ginv, &w.to_matrix())))
    }

    /// `α` and the triple from a single evaluation of the point data.
    pub fn alpha_and_triple(&self, x: &[f64]) -> Result<(Vec<f64>, [Mat<f64>; 3])> {
        let pj = self.point_jets(x)?;
        let m1 = pj.mu1.value();
        let alpha = pj.mu1.gradient(4).iter().map(|d| -0.5 * d / m1).collect();
        let mu = [0, 1, 2].map(|a| pj.mu[a].value());
        let rotated = rotated_frame(&pj.frame.clone().map(|f| f.values()), &mu);
        let ginv = pj.ginv.values();
        Ok((alpha, rotated.map(|w| structure_from_form(&ginv, &w.to_matrix()))))
    }

    /// Checks the component equations of `∇𝛍 = Σ i_Xωᵢ ⊗ ωᵢ` in the rotated
    /// frame.
    pub fn moment_residuals(&self, x: &[f64]) -> Result<MomentResiduals> {
        let pj = self.point_jets(x)?;
        let gamma = levi_civita(&self.metric, x)?;
        let mu = [0, 1, 2].map(|a| pj.mu[a].value());
        let rotated = rotated_frame(&pj.frame.clone().map(|f| f.values()), &mu);
        let ginv = pj.ginv.values();
        let m1 = pj.mu1.value();
        let nabla = covariant_derivative_2form(&pj.omega1, &gamma);
        let ix = |w: &Form<f64>| w.interior(&pj.xfield).components().to_vec();
        let (ix1, ix2, ix3) = (ix(&pj.omega1.values()), ix(&rotated[1]), ix(&rotated[2]));
        let dmu = pj.mu1.gradient(4);
        let mut res = MomentResiduals { dmu: 0.0, theta2: 0.0, theta3: 0.0 };
        for k in 0..4 {
            let theta2 = 0.5 * nabla[k].inner(&rotated[2], &ginv);
            let theta3 = -0.5 * nabla[k].inner(&rotated[1], &ginv);
            res.dmu = res.dmu.max((dmu[k] - ix1[k]).abs());
            res.theta2 = res.theta2.max((m1 * theta2 - ix3[k]).abs());
            res.theta3 = res.theta3.max((m1 * theta3 + ix2[k]).abs());
        }
        Ok(res)
    }

    /// `log` of the density of `μ₁^{−(2m+2)} ν` (`m = 1`), with gradient.
    pub fn log_invariant_density(&self, x: &[f64]) -> Result<Jet1> {
        let pj = self.point_jets(x)?;
        let det = pj.g.det();
        Ok(det.ln() * 0.5 - pj.mu1.ln() * 4.0)
    }

    /// `μ₁² ω₁∧ω₁/2` as a multiple of the Riemannian volume form, computed
    /// from the uncalibrated section `(dX♭)⁺ = μ₁ω₁`.
    pub fn raw_square_over_volume(&self, x: &[f64]) -> Result<f64> {
        let pj = self.point_jets(x)?;
        let sd = pj.sd.values();
        let top = *sd.wedge(&sd).get(&[0, 1, 2, 3]) * 0.5;
        let vol = pj.g.values().det().sqrt();
        Ok(top / vol)
    }
}

/// `(∇_k ω)_ij = ∂_k ω_ij − Γˡ_ki ω_lj − Γˡ_kj ω_il` for each `k`.
pub fn covariant_derivative_2form(omega: &Form<Jet1>, gamma: &Christoffel) -> Vec<Form<f64>> {
    let n = omega.dim();
    let w = omega.values().to_matrix();
    (0..n)
        .map(|k| {
            let m = Mat::from_fn(n, |i, j| {
                let mut v = omega.get(&[i, j]).partial(k);
                for l in 0..n {
                    v -= gamma.get(l, k, i) * w[(l, j)] + gamma.get(l, k, j) * w[(i, l)];
                }
                v
            });
            Form::from_matrix(&m)
        })
        .collect()
}

/// Rotates the frame so that its first member is along `μ`.
pub fn rotated_frame(frame: &[Form<f64>; 3], mu: &[f64; 3]) -> [Form<f64>; 3] {
    let r = rotation_with_first_row(mu);
    [0, 1, 2].map(|a| frame[0].scale(r[a][0]).add(&frame[1].scale(r[a][1])).add(&frame[2].scale(r[a][2])))
}

/// An `SO(3)` matrix whose first row is `v/|v|`.
pub fn rotation_with_first_row(v: &[f64; 3]) -> [[f64; 3]; 3] {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let n = [v[0] / norm, v[1] / norm, v[2] / norm];
    let axis = (0..3).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let d = e[0] * n[0] + e[1] * n[1] + e[2] * n[2];
    let mut v2 = [e[0] - d * n[0], e[1] - d * n[1], e[2] - d * n[2]];
    let l = (v2[0] * v2[0] + v2[1] * v2[1] + v2[2] * v2[2]).sqrt();
    v2.iter_mut().for_each(|c| *c /= l);
    let v3 = [n[1] * v2[2] - n[2] * v2[1], n[2] * v2[0] - n[0] * v2[2], n[0] * v2[1] - n[1] * v2[0]];
    [n, v2, v3]
}

/// `moment_section` for a calibrated construction.
pub fn moment_section_4d(data: &QkData, x: &[f64]) -> Result<MomentSection> {
    data.moment_section(x)
}

pub fn alpha_from_moment(data: &QkData, x: &[f64]) -> Result<AlphaForm> {
    data.alpha(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_special_orthogonal() {
        let r = rotation_with_first_row(&[0.3, -1.2, 0.5]);
        let m = Mat::from_fn(3, |i, j| r[i][j]);
        assert!(m.mul(&m.transpose()).sub(&Mat::identity(3)).max_abs() < 1e-15);
        assert!((m.det() - 1.0).abs() < 1e-14);
    }
}
