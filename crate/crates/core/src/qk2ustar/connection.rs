use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1};
use crate::linalg::Mat;
use crate::report::{CheckRecord, Report, Worst};
use crate::structures::{quaternion_relations_residual, AlmostComplexField};
use crate::tensorcalc::{levi_civita, Christoffel, Connection, MetricField};

use super::moment::QkData;

/// `S(Z, Y) = α(Z)Y + α(Y)Z − Σ_{A=I,J,K} (α(AY)AZ + α(AZ)AY)` as
/// coefficients `Sᵏᵢⱼ` for `Z = ∂ᵢ`, `Y = ∂ⱼ`.
pub fn modification_tensor(alpha: &[f64], triple: &[Mat<f64>; 3]) -> Christoffel {
    let n = alpha.len();
    let mut s = Christoffel::zeros(n);
    // (α∘A)_j = α_l Aˡ_j
    let alpha_a: Vec<Vec<f64>> = triple
        .iter()
        .map(|a| (0..n).map(|j| (0..n).map(|l| alpha[l] * a[(l, j)]).sum()).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                if k == j {
                    v += alpha[i];
                }
                if k == i {
                    v += alpha[j];
                }
                for (a, aa) in triple.iter().zip(&alpha_a) {
                    v -= aa[j] * a[(k, i)] + aa[i] * a[(k, j)];
                }
                *s.get_mut(k, i, j) = v;
            }
        }
    }
    s
}

/// `Γ̃ = Γ + S`.
pub fn modified_connection(gamma: &Christoffel, alpha: &[f64], triple: &[Mat<f64>; 3]) -> Result<Christoffel> {
    let rel = quaternion_relations_residual(&triple[0], &triple[1], &triple[2]);
    if !(rel <= 1e-8) {
        return Err(GeomError::Invalid(format!("triple violates the quaternion relations by {rel:e}")));
    }
    let s = modification_tensor(alpha, triple);
    let n = alpha.len();
    Ok(Christoffel::from_vec(n, gamma.data().iter().zip(s.data()).map(|(a, b)| a + b).collect()))
}

/// Trace over `Y` of `Y ↦ S(Z, Y)` for `Z = ∂ᵢ`, for each `i`.
pub fn modification_trace(s: &Christoffel) -> Vec<f64> {
    let n = s.dim();
    (0..n).map(|i| (0..n).map(|j| s.get(j, i, j)).sum()).collect()
}

/// The `m = 1` simplification `2(α(Z)Y + α(Y)Z − g(Y,Z)α♯)` of the
/// modification; `factor = 1` gives the undoubled variant for comparison.
pub fn conformal_modification(alpha: &[f64], g: &Mat<f64>, factor: f64) -> Christoffel {
    let n = alpha.len();
    let ginv = g.inverse().expect("nondegenerate metric");
    let sharp = ginv.mul_vec(alpha);
    let mut s = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = -g[(i, j)] * sharp[k];
                if k == j {
                    v += alpha[i];
                }
                if k == i {
                    v += alpha[j];
                }
                *s.get_mut(k, i, j) = factor * v;
            }
        }
    }
    s
}

/// The torsion-free connection `∇̃` built from a calibrated construction.
#[derive(Clone)]
pub struct ModifiedConnection {
    data: QkData,
}

impl ModifiedConnection {
    pub fn new(data: QkData) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &QkData {
        &self.data
    }
}

impl Connection for ModifiedConnection {
    fn chart(&self) -> &Chart {
        self.data.chart()
    }

    fn gamma(&self, x: &[f64]) -> Result<Christoffel> {
        let gamma = levi_civita(self.data.metric(), x)?;
        let (alpha, triple) = self.data.alpha_and_triple(x)?;
        modified_connection(&gamma, &alpha, &triple)
    }
}

/// `max |(∇_k I)ᵃ_b|` for a connection and a structure known to first order.
pub fn parallel_residual(gamma: &Christoffel, i: &Mat<Jet1>) -> f64 {
    let n = i.dim();
    let iv = i.values();
    let mut worst = 0.0f64;
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut v = i[(a, b)].partial(k);
                for c in 0..n {
                    v += gamma.get(a, k, c) * iv[(c, b)] - gamma.get(c, k, b) * iv[(a, c)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// `max_k |∂_k log ϱ − Γʲ_kj|`: the relative failure of `ϱ dx¹…dxⁿ` to be
/// parallel.
pub fn volume_residual(gamma: &Christoffel, log_density: &Jet1) -> f64 {
    let n = gamma.dim();
    (0..n)
        .map(|k| {
            let tr: f64 = (0..n).map(|j| gamma.get(j, k, j)).sum();
            (log_density.partial(k) - tr).abs()
        })
        .fold(0.0, f64::max)
}

/// Checks `∇̃I = 0`, torsion and `∇̃(μ₁^{−(2m+2)}ν) = 0` over a sample set.
pub fn verify_ustar<F>(
    conn: &dyn Connection,
    structure: &AlmostComplexField,
    log_density: F,
    points: &[Vec<f64>],
    tol: f64,
) -> Report
where
    F: Fn(&[f64]) -> Result<Jet1>,
{
    let (mut par, mut tor, mut vol) = (Worst::default(), Worst::default(), Worst::default());
    for x in points {
        let outcome = (|| -> Result<(f64, f64, f64)> {
            let gamma = conn.gamma(x)?;
            let i = structure.eval_first_order(x)?;
            Ok((parallel_residual(&gamma, &i), gamma.torsion().max_abs(), volume_residual(&gamma, &log_density(x)?)))
        })();
        let (p, t, v) = outcome.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        par.update(p, x);
        tor.update(t, x);
        vol.update(v, x);
    }
    let mut r = Report::default();
    r.push(par.record("parallel_complex_structure", tol));
    r.push(tor.record("torsion", tol));
    r.push(vol.record("invariant_volume", tol));
    r
}

impl QkData {
    /// Full verification of the construction at the given points.
    pub fn verify(&self, points: &[Vec<f64>], tol: f64) -> Result<Report> {
        let conn = ModifiedConnection::new(self.clone());
        let structure = self.structure()?;
        let data = self.clone();
        let mut r = verify_ustar(&conn, &structure, move |x| data.log_invariant_density(x), points, tol);
        let (mut eq, mut alpha) = (Worst::default(), Worst::default());
        for x in points {
            eq.update(self.moment_residuals(x).map(|m| m.max()).unwrap_or(f64::NAN), x);
            alpha.update(self.alpha(x).map(|a| a.agreement()).unwrap_or(f64::NAN), x);
        }
        r.push(eq.record("moment_equations", tol));
        r.push(alpha.record("alpha_dual_formula", tol));
        Ok(r)
    }

    /// `max |Γ̃ − Γ(target)|` where `target` should be the Levi-Civita
    /// connection of `μ₁⁻² g` written independently.
    pub fn conformal_discrepancy(&self, target: &MetricField, x: &[f64]) -> Result<f64> {
        let a = ModifiedConnection::new(self.clone()).gamma(x)?;
        let b = levi_civita(target, x)?;
        Ok(a.max_abs_diff(&b))
    }
}

/// Block-diagonal constant triple on `ℝ⁴ᵐ` dual to `e01+e23, e02+e31,
/// e03+e12` in each block.
pub fn flat_triple(m: usize) -> [Mat<f64>; 3] {
    let forms = crate::structures::sd_frame(&Mat::<f64>::identity(4), 1.0);
    let blocks = forms.map(|w| w.to_matrix().scale(-1.0));
    blocks.map(|b| {
        Mat::from_fn(4 * m, |r, c| if r / 4 == c / 4 { b[(r % 4, c % 4)] } else { 0.0 })
    })
}

/// Outcome of the trace test for one `m`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TraceCheck {
    pub m: usize,
    /// `max_Z |tr S(Z, ·) − (4m+4) α(Z)|`.
    pub residual_4m4: f64,
    /// `max_Z |tr S(Z, ·) − (4m+2) α(Z)|`.
    pub residual_4m2: f64,
}

/// Trace of the modification for a given `α` and the flat triple.
pub fn trace_check(m: usize, alpha: &[f64]) -> TraceCheck {
    let s = modification_tensor(alpha, &flat_triple(m));
    let tr = modification_trace(&s);
    let mf = m as f64;
    let res = |c: f64| tr.iter().zip(alpha).map(|(t, a)| (t - c * a).abs()).fold(0.0, f64::max);
    TraceCheck { m, residual_4m4: res(4.0 * mf + 4.0), residual_4m2: res(4.0 * mf + 2.0) }
}

/// Report records for the trace constant.
pub fn trace_report(ms: &[usize], alpha_seed: &[f64]) -> Report {
    let mut r = Report::default();
    for &m in ms {
        let alpha: Vec<f64> = (0..4 * m).map(|i| alpha_seed[i % alpha_seed.len()]).collect();
        let t = trace_check(m, &alpha);
        r.push(CheckRecord::new(format!("trace_4m_plus_4_m{m}"), t.residual_4m4, alpha.clone(), 1e-10));
        r.push(CheckRecord::informational(
            format!("trace_4m_plus_2_m{m}"),
            t.residual_4m2,
            "the (4m+2) weight is not reproduced by the direct trace; (4m+4) is",
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_leaves_connection() {
        let t = flat_triple(1);
        let s = modification_tensor(&[0.0; 4], &t);
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn modification_is_symmetric_and_traces_to_4m_plus_4() {
        for m in 1..=3 {
            let t = flat_triple(m);
            assert!(quaternion_relations_residual(&t[0], &t[1], &t[2]) < 1e-15);
            let alpha: Vec<f64> = (0..4 * m).map(|i| (i as f64 * 0.37).sin()).collect();
            let s = modification_tensor(&alpha, &t);
            assert_eq!(s.torsion().max_abs(), 0.0);
            let c = trace_check(m, &alpha);
            assert!(c.residual_4m4 < 1e-12, "{c:?}");
            assert!(c.residual_4m2 > 1e-3);
        }
        // α = dx₁, m = 1: trace = 8 α(Z)
        let mut a = vec![0.0; 4];
        a[0] = 1.0;
        let tr = modification_trace(&modification_tensor(&a, &flat_triple(1)));
        assert!((tr[0] - 8.0).abs() < 1e-14 && tr[1].abs() < 1e-14);
    }

    #[test]
    fn four_dimensional_modification_is_doubled_conformal_form() {
        let t = flat_triple(1);
        let alpha = [0.3, -0.1, 0.7, 0.2];
        let s = modification_tensor(&alpha, &t);
        let c2 = conformal_modification(&alpha, &Mat::identity(4), 2.0);
        assert!(s.max_abs_diff(&c2) < 1e-15);
        let c1 = conformal_modification(&alpha, &Mat::identity(4), 1.0);
        assert!(s.max_abs_diff(&c1) > 0.1);
    }
}
