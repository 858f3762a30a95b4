use crate::error::Result;
use crate::jet::Differentiable;
use crate::linalg::Mat;

use super::connection::{christoffel_from, Christoffel, Connection, LeviCivita};
use super::fd::partial_vec_richardson;
use super::metric::MetricField;

/// `Rⁱⱼₖₗ`, the components of `R(∂ₖ, ∂ₗ)∂ⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `R_jl = Rⁱⱼᵢₗ`.
    pub fn ricci(&self) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(n, |j, l| (0..n).map(|i| self.get(i, j, i, l)).sum())
    }

    /// `R_ijkl = g_im Rᵐⱼₖₗ`.
    pub fn lowered(&self, g: &Mat<f64>) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] =
                            (0..n).map(|m| g[(i, m)] * self.get(m, j, k, l)).sum();
                    }
                }
            }
        }
        out
    }

    /// Residual of the first Bianchi identity `Rⁱⱼₖₗ + Rⁱₖₗⱼ + Rⁱₗⱼₖ = 0`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l) + self.get(i, k, l, j) + self.get(i, l, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// `|Riem|² = R_ijkl R^ijkl`.
    pub fn squared_norm(&self, g: &Mat<f64>, ginv: &Mat<f64>) -> f64 {
        let n = self.n;
        let low = self.lowered(g);
        // raise all four indices of the lowered tensor
        let raise = |t: &[f64], slot: usize| -> Vec<f64> {
            let mut out = vec![0.0; t.len()];
            let strides = [n * n * n, n * n, n, 1];
            for (flat, o) in out.iter_mut().enumerate() {
                let a = (flat / strides[slot]) % n;
                let base = flat - a * strides[slot];
                *o = (0..n).map(|b| ginv[(a, b)] * t[base + b * strides[slot]]).sum();
            }
            out
        };
        let mut up = low.clone();
        for slot in 0..4 {
            up = raise(&up, slot);
        }
        low.iter().zip(&up).map(|(a, b)| a * b).sum()
    }
}

/// Curvature of a connection at `x`. Requires coefficient derivatives.
pub fn riemann(conn: &dyn Connection, x: &[f64]) -> Result<Riemann> {
    let gj = conn.gamma_jet(x)?;
    let n = gj.dim();
    let gv = gj.values();
    let mut data = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in (k + 1)..n {
                    let mut v = gj.get(i, l, j).partial(k) - gj.get(i, k, j).partial(l);
                    for m in 0..n {
                        v += gv.get(i, k, m) * gv.get(m, l, j) - gv.get(i, l, m) * gv.get(m, k, j);
                    }
                    data[((i * n + j) * n + k) * n + l] = v;
                    data[((i * n + j) * n + l) * n + k] = -v;
                }
            }
        }
    }
    Ok(Riemann { n, data })
}

/// Curvature of a connection known only to first order: `∂Γ` by
/// Richardson-extrapolated central differences with step `h`.
pub fn riemann_fd<F>(gamma: F, x: &[f64], h: f64) -> Result<Riemann>
where
    F: Fn(&[f64]) -> Result<Christoffel>,
{
    let g0 = gamma(x)?;
    let n = g0.dim();
    let mut dgam = Vec::with_capacity(n);
    for k in 0..n {
        let failure = std::cell::RefCell::new(None);
        let d = partial_vec_richardson(
            |p| match gamma(p) {
                Ok(g) => g.data().to_vec(),
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    vec![f64::NAN; n * n * n]
                }
            },
            x,
            k,
            h,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        dgam.push(Christoffel::from_vec(n, d));
    }
    let mut data = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in (k + 1)..n {
                    let mut v = dgam[k].get(i, l, j) - dgam[l].get(i, k, j);
                    for m in 0..n {
                        v += g0.get(i, k, m) * g0.get(m, l, j) - g0.get(i, l, m) * g0.get(m, k, j);
                    }
                    data[((i * n + j) * n + k) * n + l] = v;
                    data[((i * n + j) * n + l) * n + k] = -v;
                }
            }
        }
    }
    Ok(Riemann { n, data })
}

/// Curvature quantities of a metric at one point.
#[derive(Clone, Debug)]
pub struct MetricCurvature {
    pub g: Mat<f64>,
    pub ginv: Mat<f64>,
    pub riemann: Riemann,
    pub ricci: Mat<f64>,
    pub scalar: f64,
}

impl MetricCurvature {
    /// Sectional curvature of the plane spanned by `u`, `v`.
    pub fn sectional(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.g.dim();
        let low = self.riemann.lowered(&self.g);
        // K = R(u,v,v,u) / (|u|²|v|² − ⟨u,v⟩²) with R(X,Y,Z,W) = g(R(X,Y)Z, W)
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        // g(R(∂k,∂l)∂j, ∂i) = R_ijkl
                        num += low[((i * n + j) * n + k) * n + l] * u[i] * v[j] * u[k] * v[l];
                    }
                }
            }
        }
        let g = |a: &[f64], b: &[f64]| -> f64 {
            (0..n).map(|i| (0..n).map(|j| self.g[(i, j)] * a[i] * b[j]).sum::<f64>()).sum()
        };
        num / (g(u, u) * g(v, v) - g(u, v).powi(2))
    }

    /// Max residual of `Ric − λ g` with `λ = R/n`.
    pub fn einstein_residual(&self) -> f64 {
        let n = self.g.dim() as f64;
        let lambda = self.scalar / n;
        self.ricci.sub(&self.g.scale(lambda)).max_abs()
    }

    /// Max residual of `R_ijkl − κ (g_ik g_jl − g_il g_jk)` for the best-fit κ
    /// from the scalar curvature.
    pub fn constant_curvature_residual(&self) -> (f64, f64) {
        let n = self.g.dim();
        let kappa = self.scalar / (n as f64 * (n as f64 - 1.0));
        let low = self.riemann.lowered(&self.g);
        let g = &self.g;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let model = kappa * (g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]);
                        worst = worst.max((low[((i * n + j) * n + k) * n + l] - model).abs());
                    }
                }
            }
        }
        (kappa, worst)
    }
}

impl MetricCurvature {
    /// Assembles the derived quantities from a metric value and its curvature.
    pub fn from_parts(g: Mat<f64>, riemann: Riemann) -> Result<Self> {
        let ginv = g.inverse().ok_or(crate::error::GeomError::DegenerateMetric { rel_det: 0.0 })?;
        let ricci = riemann.ricci();
        let n = g.dim();
        let scalar = (0..n).map(|j| (0..n).map(|l| ginv[(j, l)] * ricci[(j, l)]).sum::<f64>()).sum();
        Ok(Self { g, ginv, riemann, ricci, scalar })
    }
}

pub fn metric_curvature(g: &MetricField, x: &[f64]) -> Result<MetricCurvature> {
    let jets = g.jets(x)?;
    let gamma = christoffel_from(&jets.ginv, &jets.dg);
    let n = g.dim();
    let gv = gamma.values();
    let mut data = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in (k + 1)..n {
                    let mut v = gamma.get(i, l, j).partial(k) - gamma.get(i, k, j).partial(l);
                    for m in 0..n {
                        v += gv.get(i, k, m) * gv.get(m, l, j) - gv.get(i, l, m) * gv.get(m, k, j);
                    }
                    data[((i * n + j) * n + k) * n + l] = v;
                    data[((i * n + j) * n + l) * n + k] = -v;
                }
            }
        }
    }
    let riemann = Riemann { n, data };
    let ricci = riemann.ricci();
    let ginv = jets.inverse_values();
    let scalar = (0..n).map(|j| (0..n).map(|l| ginv[(j, l)] * ricci[(j, l)]).sum::<f64>()).sum();
    Ok(MetricCurvature { g: jets.values(), ginv, riemann, ricci, scalar })
}

/// Riemannian scalar curvature, normalised so the round unit n-sphere has
/// `n(n−1)`.
pub fn ricci_scalar(g: &MetricField, x: &[f64]) -> Result<f64> {
    Ok(metric_curvature(g, x)?.scalar)
}

/// Curvature of the Levi-Civita connection of `g` through the generic
/// connection path.
pub fn levi_civita_riemann(g: &MetricField, x: &[f64]) -> Result<Riemann> {
    riemann(&LeviCivita::new(g.clone()), x)
}
