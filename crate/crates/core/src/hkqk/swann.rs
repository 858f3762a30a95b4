//! The Swann bundle `P̂ × ℝ⁺` over a four-dimensional quaternionic Kähler
//! base, on an Euler-angle patch of the `SO(3)` frame bundle.
//!
//! Coordinates are the base coordinates, Euler angles `(ψ₁, ψ₂, ψ₃)` with
//! `R = R_z(ψ₁)R_y(ψ₂)R_z(ψ₃)`, and `t > 0`. A frame `R` means the basis
//! `ω'ᵢ = Σⱼ Rⱼᵢ ωⱼ` of `Λ⁺`, and `SO(3)` acts on the right, so the
//! connection is `a = R⁻¹dR + R⁻¹AR` with `∇ωⱼ = Σₗ ωₗ Aₗⱼ`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::Mat;
use crate::qk2ustar::{rotation_with_first_row, QkData};
use crate::report::{Report, Worst};
use crate::structures::{quaternion_relations_residual, sd_frame, Orientation};
use crate::tensorcalc::connection::christoffel_from;
use crate::tensorcalc::fd::partial_vec_richardson;
use crate::tensorcalc::Form;

/// Euler patch: `ψ₂ ∈ (EULER_MARGIN, π − EULER_MARGIN)`.
pub const EULER_MARGIN: f64 = 0.1;

/// Header string recorded with every Swann report.
pub const FRAME_CONVENTION: &str =
    "SO(3) acts on frames from the right; R = Rz(psi1) Ry(psi2) Rz(psi3); a = R^-1 dR + R^-1 A R; E_i generate R -> R exp(s e_i)";

const BASE: usize = 4;
const DIM: usize = 8;
const T: usize = 7;

/// `v ↦ v̂` with `v̂w = v × w`.
pub fn hat<T: Scalar>(v: &[T; 3]) -> Mat<T> {
    let z = T::zero();
    Mat::from_vec(
        3,
        vec![
            z.clone(), -v[2].clone(), v[1].clone(),
            v[2].clone(), z.clone(), -v[0].clone(),
            -v[1].clone(), v[0].clone(), z,
        ],
    )
}

/// Inverse of [`hat`] on antisymmetric matrices.
pub fn vee<T: Scalar>(m: &Mat<T>) -> [T; 3] {
    [m[(2, 1)].clone(), m[(0, 2)].clone(), m[(1, 0)].clone()]
}

fn rz<T: Scalar>(a: &T) -> Mat<T> {
    let (c, s) = (a.cos(), a.sin());
    let (z, o) = (T::zero(), T::from(1.0));
    Mat::from_vec(3, vec![c.clone(), -s.clone(), z.clone(), s, c, z.clone(), z.clone(), z, o])
}

fn ry<T: Scalar>(a: &T) -> Mat<T> {
    let (c, s) = (a.cos(), a.sin());
    let (z, o) = (T::zero(), T::from(1.0));
    Mat::from_vec(3, vec![c.clone(), z.clone(), s.clone(), z.clone(), o, z.clone(), -s, z, c])
}

pub fn euler_rotation<T: Scalar>(psi: &[T]) -> Mat<T> {
    rz(&psi[0]).mul(&ry(&psi[1])).mul(&rz(&psi[2]))
}

/// Euler angles of `r` on the patch, or `None` when `ψ₂` falls outside it.
pub fn euler_angles(r: &Mat<f64>) -> Option<[f64; 3]> {
    let b = r[(2, 2)].clamp(-1.0, 1.0).acos();
    if !(b > EULER_MARGIN && b < PI - EULER_MARGIN) {
        return None;
    }
    let a = r[(1, 2)].atan2(r[(0, 2)]);
    let c = r[(2, 1)].atan2(-r[(2, 0)]);
    Some([a, b, c])
}

/// Matrices `A_k` (one per base coordinate) of the `sp(1)` part of the
/// Levi-Civita connection on the self-dual frame: `∇_k ωⱼ = Σₗ ωₗ (A_k)ₗⱼ`.
pub fn sp1_connection(data: &QkData, x: &[f64]) -> Result<Vec<Mat<Jet1>>> {
    let n = BASE;
    let g2 = data.metric().eval_jet(x)?;
    let jets = data.metric().jets(x)?;
    let gamma = christoffel_from(&jets.ginv, &jets.dg);
    let sign = match data.orientation() {
        Orientation::Coordinate => 1.0,
        Orientation::Reversed => -1.0,
    };
    let frame2 = sd_frame(&g2, sign);
    let frame1: Vec<Form<Jet1>> = frame2.iter().map(|f| f.truncate()).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let nabla: Vec<Form<Jet1>> = frame2
            .iter()
            .zip(&frame1)
            .map(|(w2, w1)| {
                let d0 = w2.map(|v| v.partial(k));
                let mut d = d0.clone();
                for a in 0..n {
                    for b in (a + 1)..n {
                        let mut v = d0.get(&[a, b]).clone();
                        for l in 0..n {
                            v = v - gamma.get(l, k, a).clone() * w1.get(&[l, b]).clone()
                                - gamma.get(l, k, b).clone() * w1.get(&[a, l]).clone();
                        }
                        d.set(&[a, b], v);
                    }
                }
                d
            })
            .collect();
        out.push(Mat::from_fn(3, |l, j| nabla[j].inner(&frame1[l], &jets.ginv) * 0.5));
    }
    Ok(out)
}

/// First-order data of the Swann bundle at a point.
#[derive(Clone, Debug)]
pub struct SwannPoint {
    /// Connection forms, with first derivatives.
    pub a: [Form<Jet1>; 3],
    /// Tautological frame `ω'ᵢ`, pulled back from the base.
    pub omega: [Form<f64>; 3],
    /// Generators `Eᵢ` of the right action.
    pub e: [Vec<f64>; 3],
    /// Frame components `μ'ᵢ = Σⱼ Rⱼᵢ μⱼ` of the calibrated moment section.
    pub mu: [Jet1; 3],
    pub t: f64,
}

impl SwannPoint {
    /// `daᵢ + aⱼ∧aₖ` for cyclic `(i, j, k)`.
    pub fn curvature(&self) -> [Form<f64>; 3] {
        let av = self.a.clone().map(|f| f.values());
        [0, 1, 2].map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            self.a[i].exterior_derivative().add(&av[j].wedge(&av[k]))
        })
    }

    /// `φᵢ = d(t aᵢ) = dt∧aᵢ + t daᵢ`.
    pub fn phi(&self) -> [Form<f64>; 3] {
        let mut dt = vec![0.0; DIM];
        dt[T] = 1.0;
        let dt = Form::one_form(dt);
        [0, 1, 2].map(|i| dt.wedge(&self.a[i].values()).add(&self.a[i].exterior_derivative().scale(self.t)))
    }
}

/// Swann bundle over a calibrated quaternionic Kähler base with a chosen
/// curvature constant `c` (`daᵢ + aⱼ∧aₖ = c ω'ᵢ`).
#[derive(Clone)]
pub struct SwannChart {
    base: QkData,
    c: f64,
    chart: Chart,
}

/// Fit of the curvature constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureFit {
    pub c: f64,
    pub residual: f64,
}

/// Bundle points over the given base points: fibre coordinates drawn inside
/// the Euler patch with `t ∈ (0.5, 2)`. Deterministic in `seed`.
pub fn swann_sample(base: &[Vec<f64>], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    base.iter()
        .map(|x| {
            let mut y = x.clone();
            y.push(rng.random_range(-3.0..3.0));
            y.push(rng.random_range(0.3..2.8));
            y.push(rng.random_range(-3.0..3.0));
            y.push(rng.random_range(0.5..2.0));
            y
        })
        .collect()
}

impl SwannChart {
    pub fn new(base: QkData, c: f64) -> Result<Self> {
        if base.metric().dim() != BASE {
            return Err(GeomError::DimensionMismatch { expected: BASE, got: base.metric().dim() });
        }
        let bc = base.chart().clone();
        let mut labels: Vec<String> = bc.labels().to_vec();
        labels.extend(["psi1", "psi2", "psi3", "t"].map(String::from));
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let chart = Chart::new(format!("swann({})", bc.name()), &refs, move |y| {
            bc.contains(&y[..BASE]) && y[5] > EULER_MARGIN && y[5] < PI - EULER_MARGIN && y[T] > 0.0
        });
        Ok(Self { base, c, chart })
    }

    /// Fits `c` by least squares of `daᵢ + aⱼ∧aₖ` against `ω'ᵢ` over `points`.
    pub fn calibrate(base: QkData, points: &[Vec<f64>]) -> Result<(Self, CurvatureFit)> {
        let sc = Self::new(base, 0.0)?;
        let (mut num, mut den) = (0.0, 0.0);
        let mut pairs = Vec::new();
        for y in points {
            let p = sc.point(y)?;
            for (f, w) in p.curvature().iter().zip(&p.omega) {
                num += dot(f, w);
                den += dot(w, w);
                pairs.push((f.clone(), w.clone()));
            }
        }
        if !(den > 0.0) {
            return Err(GeomError::Calibration("no sample points".into()));
        }
        let c = num / den;
        let residual = pairs.iter().map(|(f, w)| f.sub(&w.scale(c)).max_abs()).fold(0.0, f64::max);
        Ok((Self { c, ..sc }, CurvatureFit { c, residual }))
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn base(&self) -> &QkData {
        &self.base
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn point(&self, y: &[f64]) -> Result<SwannPoint> {
        self.chart.check(y)?;
        let x = &y[..BASE];
        let to8: Vec<usize> = (0..BASE).collect();
        let amat: Vec<Mat<Jet1>> =
            sp1_connection(&self.base, x)?.into_iter().map(|m| m.map(|v| v.embed(&to8, DIM))).collect();
        let psi: Vec<Jet2> = (0..3).map(|a| Jet2::variable(y[BASE + a], BASE + a, DIM)).collect();
        let r2 = euler_rotation(&psi);
        let r = r2.map(|v| v.truncate());
        let rt = r.transpose();
        let mut comps: [Vec<Jet1>; 3] = [vec![], vec![], vec![]];
        for k in 0..DIM {
            let m = if k < BASE {
                rt.mul(&amat[k]).mul(&r)
            } else if k < T {
                rt.mul(&r2.map(|v| v.partial(k)))
            } else {
                Mat::zeros(3)
            };
            let v = vee(&m);
            for i in 0..3 {
                comps[i].push(v[i].clone());
            }
        }
        let a = comps.map(Form::one_form);
        // generators: a(E_i) = e_i on the fiber block
        let mfib = Mat::from_fn(3, |j, al| a[j].components()[BASE + al].value());
        let minv = mfib.inverse().ok_or(GeomError::Singular(mfib.det()))?;
        let e = [0, 1, 2].map(|i| {
            let mut v = vec![0.0; DIM];
            for al in 0..3 {
                v[BASE + al] = minv[(al, i)];
            }
            v
        });
        let pj = self.base.point_jets(x)?;
        let base_forms = pj.frame.clone().map(|f| f.values());
        let rv = r.values();
        let omega = [0, 1, 2].map(|i| {
            let mut w = Form::zeros(DIM, 2);
            for a in 0..BASE {
                for b in (a + 1)..BASE {
                    let v: f64 = (0..3).map(|j| rv[(j, i)] * base_forms[j].get(&[a, b])).sum();
                    w.set(&[a, b], v);
                }
            }
            w
        });
        let mu8: Vec<Jet1> = pj.mu.iter().map(|m| m.embed(&to8, DIM)).collect();
        let mu = [0, 1, 2].map(|i| (0..3).fold(Jet1::constant(0.0), |acc, j| acc + r[(j, i)].clone() * mu8[j].clone()));
        Ok(SwannPoint { a, omega, e, mu, t: y[T] })
    }

    /// `(φ₁, φ₂, φ₃)` at `y`.
    pub fn forms(&self, y: &[f64]) -> Result<[Form<f64>; 3]> {
        Ok(self.point(y)?.phi())
    }

    /// Lift `Y = X̄ − cΣμ'ᵢEᵢ` of the base Killing field; with
    /// `with_moment = false`, just the horizontal lift `X̄`.
    pub fn lifted_field(&self, y: &[f64], with_moment: bool) -> Result<Vec<f64>> {
        let p = self.point(y)?;
        self.lift_at(&p, y, with_moment)
    }

    fn lift_at(&self, p: &SwannPoint, y: &[f64], with_moment: bool) -> Result<Vec<f64>> {
        let xb = self.base.field().eval(&y[..BASE])?;
        let mut v = vec![0.0; DIM];
        v[..BASE].copy_from_slice(&xb);
        for i in 0..3 {
            let ai: f64 = (0..BASE).map(|k| p.a[i].components()[k].value() * xb[k]).sum();
            let coef = ai + if with_moment { self.c * p.mu[i].value() } else { 0.0 };
            for (vk, ek) in v.iter_mut().zip(&p.e[i]) {
                *vk -= coef * ek;
            }
        }
        Ok(v)
    }

    /// `max_i |i_Yφᵢ − c d(μ'ᵢt)|`.
    pub fn lift_residual(&self, y: &[f64], with_moment: bool) -> Result<f64> {
        let p = self.point(y)?;
        let yv = self.lift_at(&p, y, with_moment)?;
        let phi = p.phi();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let lhs = phi[i].interior(&yv);
            let mut rhs: Vec<f64> = p.mu[i].gradient(DIM).iter().map(|d| self.c * p.t * d).collect();
            rhs[T] += self.c * p.mu[i].value();
            for (a, b) in lhs.components().iter().zip(&rhs) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }

    /// Hyperkähler moment map `c(μ'₁t, μ'₂t, μ'₃t)` of the lifted action.
    pub fn moment(&self, y: &[f64]) -> Result<[f64; 3]> {
        let p = self.point(y)?;
        Ok(p.mu.clone().map(|m| self.c * m.value() * p.t))
    }

    /// `max_i |φᵢ − (dt∧aᵢ + s·t aⱼ∧aₖ + t c ω'ᵢ)|` for the sign `s` of the
    /// quadratic term; the curvature relations force `s = −1`.
    pub fn expansion_residual(&self, y: &[f64], s: f64) -> Result<f64> {
        let p = self.point(y)?;
        let phi = p.phi();
        let av = p.a.clone().map(|f| f.values());
        let mut dt = vec![0.0; DIM];
        dt[T] = 1.0;
        let dt = Form::one_form(dt);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let e = dt.wedge(&av[i]).add(&av[j].wedge(&av[k]).scale(s * p.t)).add(&p.omega[i].scale(p.t * self.c));
            worst = worst.max(phi[i].sub(&e).max_abs());
        }
        Ok(worst)
    }

    /// `max |dφᵢ|` by Richardson differences.
    pub fn closure_residual(&self, y: &[f64], h: f64) -> Result<f64> {
        self.forms(y)?;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let f = |q: &[f64]| self.forms(q).map(|f| f[i].components().to_vec()).unwrap_or_else(|_| vec![f64::NAN; DIM * DIM]);
            let d: Vec<Vec<f64>> = (0..DIM).map(|k| partial_vec_richardson(&f, y, k, h)).collect();
            for a in 0..DIM {
                for b in (a + 1)..DIM {
                    for c in (b + 1)..DIM {
                        worst = worst.max((d[a][b * DIM + c] - d[b][a * DIM + c] + d[c][a * DIM + b]).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `max |L_Y φᵢ|` by Richardson differences.
    pub fn lie_residual(&self, y: &[f64], h: f64) -> Result<f64> {
        let yv = self.lifted_field(y, true)?;
        let dy: Vec<Vec<f64>> = (0..DIM)
            .map(|k| partial_vec_richardson(|q| self.lifted_field(q, true).unwrap_or_else(|_| vec![f64::NAN; DIM]), y, k, h))
            .collect();
        let phi = self.forms(y)?;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let f = |q: &[f64]| self.forms(q).map(|f| f[i].components().to_vec()).unwrap_or_else(|_| vec![f64::NAN; DIM * DIM]);
            let dphi: Vec<Vec<f64>> = (0..DIM).map(|k| partial_vec_richardson(&f, y, k, h)).collect();
            for a in 0..DIM {
                for b in (a + 1)..DIM {
                    let mut v = 0.0;
                    for k in 0..DIM {
                        v += yv[k] * dphi[k][a * DIM + b] + phi[i].get(&[k, b]) * dy[a][k] + phi[i].get(&[a, k]) * dy[b][k];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Quaternion relations of `I₁ = −φ₂⁻¹φ₃`, `I₂ = −φ₃⁻¹φ₁`, `I₃ = −φ₁⁻¹φ₂`;
    /// independent of the signature of the underlying metric.
    pub fn triple_residual(&self, y: &[f64]) -> Result<f64> {
        let w = self.forms(y)?.map(|f| f.to_matrix());
        let inv = |m: &Mat<f64>| m.inverse().ok_or(GeomError::Singular(m.det()));
        let i1 = inv(&w[1])?.mul(&w[2]).scale(-1.0);
        let i2 = inv(&w[2])?.mul(&w[0]).scale(-1.0);
        let i3 = inv(&w[0])?.mul(&w[1]).scale(-1.0);
        Ok(quaternion_relations_residual(&i1, &i2, &i3))
    }

    /// `max |a_i(E_j) − δᵢⱼ|`.
    pub fn duality_residual(&self, y: &[f64]) -> Result<f64> {
        let p = self.point(y)?;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = p.a[i].components().iter().zip(&p.e[j]).map(|(a, e)| a.value() * e).sum();
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        Ok(worst)
    }

    /// A point over base point `x` on the level set `μ'₁t = 1`, `μ'₂ = μ'₃ = 0`.
    pub fn level_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ms = self.base.moment_section(x)?;
        let n = ms.mu1;
        let u = ms.components.map(|v| v / n);
        let rows = rotation_with_first_row(&u);
        // the frame's first column is μ/μ₁; twisting about it keeps that
        let r0 = Mat::from_fn(3, |i, j| rows[j][i]);
        for s in 0..16 {
            let ang = s as f64 * PI / 8.0;
            let rx = Mat::from_vec(3, vec![1.0, 0.0, 0.0, 0.0, ang.cos(), -ang.sin(), 0.0, ang.sin(), ang.cos()]);
            if let Some(psi) = euler_angles(&r0.mul(&rx)) {
                let mut y = x.to_vec();
                y.extend(psi);
                y.push(1.0 / n);
                return Ok(y);
            }
        }
        Err(GeomError::Invalid("no Euler patch contains the level-set frame".into()))
    }

    /// At a level-set point: `(max |i_{E₁}φ₁ + dt|, descended μ = −t, −1/μ₁)`.
    pub fn descended_moment(&self, y: &[f64]) -> Result<(f64, f64, f64)> {
        let p = self.point(y)?;
        let ie = p.phi()[0].interior(&p.e[0]);
        let mut res: f64 = 0.0;
        for (k, v) in ie.components().iter().enumerate() {
            let target = if k == T { -1.0 } else { 0.0 };
            res = res.max((v - target).abs());
        }
        let mu1 = self.base.moment_section(&y[..BASE])?.mu1;
        Ok((res, -p.t, -1.0 / mu1))
    }

    pub fn check(&self, points: &[Vec<f64>], tol: f64) -> Report {
        let mut w = [Worst::default(), Worst::default(), Worst::default(), Worst::default()];
        for y in points {
            let vals = (|| -> Result<[f64; 4]> {
                let p = self.point(y)?;
                let curv = p
                    .curvature()
                    .iter()
                    .zip(&p.omega)
                    .map(|(f, o)| f.sub(&o.scale(self.c)).max_abs())
                    .fold(0.0, f64::max);
                Ok([self.duality_residual(y)?, curv, self.lift_residual(y, true)?, self.triple_residual(y)?])
            })()
            .unwrap_or([f64::NAN; 4]);
            for (wi, v) in w.iter_mut().zip(vals) {
                wi.update(v, y);
            }
        }
        let mut r = Report::default();
        r.push(w[0].record("connection_duality", 1e-10));
        r.push(w[1].record("curvature_relations", tol));
        r.push(w[2].record("lifted_moment_map", tol));
        r.push(w[3].record("triple_relations", 1e-6));
        r
    }
}

fn dot(a: &Form<f64>, b: &Form<f64>) -> f64 {
    a.components().iter().zip(b.components()).map(|(x, y)| x * y).sum()
}
