//! Hyperkähler quotient of flat `ℍ^{m+1}` by the circle
//! `(z, w) ↦ (e^{iθ}z, e^{−iθ}w)` at level `ν₁ = (|z|² − |w|²)/2 − ℓ = 0`,
//! `ν₂ + iν₃ = Σ z_α w_α = 0`: the Calabi metric on `T*ℂPᵐ`.
//!
//! Slice chart: the U(1) gauge makes the pivot `z_{α₀}` real positive. The
//! coordinates are `(Re z_α, Im z_α, Re w_α, Im w_α)` for `α ≠ α₀`; the level
//! set fixes `z_{α₀} = x₀ > 0` and `w_{α₀}` in closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::gallery::flat::{flat_hk_forms, w_index, z_index};
use crate::jet::{Differentiable, Jet1, Jet2, Scalar};
use crate::linalg::Mat;
use crate::tensorcalc::{christoffel_from, riemann_fd, Christoffel, Form, MetricCurvature};

/// Level-set tolerance for ambient points.
pub const LEVEL_TOL: f64 = 1e-10;
/// Required gap between the pivot modulus and every other `|z_α|`.
pub const GAUGE_MARGIN: f64 = 1e-8;
/// Step for the finite-difference curvature.
pub const CURVATURE_STEP: f64 = 1e-3;

/// Slice chart of the Calabi quotient with a fixed pivot index.
#[derive(Clone)]
pub struct CalabiSlice {
    m: usize,
    level: f64,
    pivot: usize,
    chart: Chart,
}

/// Quotient data at a slice point.
#[derive(Clone, Debug)]
pub struct QuotientMetric {
    /// Metric in slice coordinates, with first derivatives.
    pub g: Mat<Jet1>,
    /// Quotient Kähler forms, with first derivatives.
    pub forms: [Form<Jet1>; 3],
    /// Horizontal lifts of the slice coordinate vectors.
    pub horizontal: Vec<Vec<f64>>,
    /// Orbit direction `iz∂z − iw∂w` at the ambient point.
    pub orbit: Vec<f64>,
    /// Ambient point.
    pub ambient: Vec<f64>,
}

impl QuotientMetric {
    pub fn values(&self) -> Mat<f64> {
        self.g.values()
    }

    /// `max_{a,i} |⟨h_a, Iᵢ V⟩|` and `max_a |⟨h_a, V⟩|` together: zero when the
    /// lifts are horizontal and tangent to the level set.
    pub fn horizontality(&self) -> f64 {
        let n = self.orbit.len();
        let m = n / 4;
        let dirs: Vec<Vec<f64>> = std::iter::once(self.orbit.clone())
            .chain(flat_hk_forms(m).iter().map(|w| {
                let s = w.to_matrix().scale(-1.0);
                s.mul_vec(&self.orbit)
            }))
            .collect();
        let mut worst: f64 = 0.0;
        for h in &self.horizontal {
            for d in &dirs {
                worst = worst.max(dot(h, d).abs());
            }
        }
        worst
    }

    /// `max |dωᵢ|` of the quotient forms.
    pub fn closure(&self) -> f64 {
        self.forms.iter().map(|f| f.exterior_derivative().max_abs()).fold(0.0, f64::max)
    }
}

impl CalabiSlice {
    /// Slice of the quotient of `ℍ^{m+1}` (real dimension `4m`) at level `ℓ > 0`.
    pub fn new(m: usize, level: f64, pivot: usize) -> Result<Self> {
        if m == 0 || pivot > m {
            return Err(GeomError::Invalid(format!("pivot {pivot} out of range for m = {m}")));
        }
        if !(level > 0.0) {
            return Err(GeomError::Invalid("level must be positive".into()));
        }
        let labels: Vec<String> = (0..=m)
            .filter(|&a| a != pivot)
            .flat_map(|a| [format!("x{a}"), format!("y{a}"), format!("p{a}"), format!("q{a}")])
            .collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let probe = Self { m, level, pivot, chart: Chart::euclidean("tmp", 4 * m) };
        let chart = Chart::new(format!("calabi{m}_pivot{pivot}"), &refs, move |s| probe.gauge_margin(s) > GAUGE_MARGIN);
        Ok(Self { m, level, pivot, chart })
    }

    /// `count` slice points with coordinates in `(−0.6, 0.6)` that the chart
    /// accepts. Deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4 * self.m;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(-0.6..0.6)).collect();
            if self.chart().contains(&s) {
                out.push(s);
            }
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.m).filter(move |&a| a != self.pivot)
    }

    /// `x₀ − max_{α≠α₀} |z_α|`.
    fn gauge_margin(&self, s: &[f64]) -> f64 {
        let amb = self.embed(&s.iter().map(|v| Jet2::constant(*v)).collect::<Vec<_>>());
        let x0 = amb[z_index(self.pivot)].value();
        let top = self
            .others()
            .map(|a| amb[z_index(a)].value().hypot(amb[z_index(a) + 1].value()))
            .fold(0.0, f64::max);
        x0 - top
    }

    /// The ambient point over slice coordinates, in jet arithmetic.
    pub fn embed<T: Scalar>(&self, s: &[T]) -> Vec<T> {
        let n1 = self.m + 1;
        let mut amb = vec![T::zero(); 4 * n1];
        let (mut sre, mut sim) = (T::zero(), T::zero());
        let mut b = T::from(2.0 * self.level);
        for (slot, a) in self.others().enumerate() {
            let (x, y, p, q) = (&s[4 * slot], &s[4 * slot + 1], &s[4 * slot + 2], &s[4 * slot + 3]);
            amb[z_index(a)] = x.clone();
            amb[z_index(a) + 1] = y.clone();
            amb[w_index(n1, a)] = p.clone();
            amb[w_index(n1, a) + 1] = q.clone();
            sre = sre + x.clone() * p.clone() - y.clone() * q.clone();
            sim = sim + x.clone() * q.clone() + y.clone() * p.clone();
            b = b + p.square() + q.square() - x.square() - y.square();
        }
        // x₀² − |S|²/x₀² = B, w₀ = −S/x₀
        let s2 = sre.square() + sim.square();
        let big_x = (b.clone() + (b.square() + s2 * 4.0).sqrt()) * 0.5;
        let x0 = big_x.sqrt();
        let inv = x0.recip();
        amb[w_index(n1, self.pivot)] = -(sre * inv.clone());
        amb[w_index(n1, self.pivot) + 1] = -(sim * inv);
        amb[z_index(self.pivot)] = x0;
        amb
    }

    /// `(ν₁, ν₂, ν₃)` at an ambient point.
    pub fn moment(&self, amb: &[f64]) -> [f64; 3] {
        moment(self.m, self.level, amb)
    }

    /// Quotient metric and forms at slice point `s`.
    pub fn quotient(&self, s: &[f64]) -> Result<QuotientMetric> {
        self.chart.check(s)?;
        let n = 4 * self.m;
        let big = 4 * (self.m + 1);
        let amb2 = self.embed(&Jet2::seed(s));
        let ambient: Vec<f64> = amb2.iter().map(|v| v.value()).collect();
        let residual = self.moment(&ambient).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(residual <= LEVEL_TOL) {
            return Err(GeomError::OffLevelSet { residual });
        }
        let amb1: Vec<Jet1> = amb2.iter().map(|v| v.truncate()).collect();
        let orbit1 = orbit_direction(self.m + 1, &amb1);
        let vnorm = dot(&orbit1, &orbit1);
        // ∂_a P with one more derivative order
        let dp: Vec<Vec<Jet1>> = (0..n).map(|a| amb2.iter().map(|v| v.partial(a)).collect()).collect();
        let pv: Vec<Jet1> = dp.iter().map(|d| dot(d, &orbit1)).collect();
        let g = Mat::from_fn(n, |a, b| dot(&dp[a], &dp[b]) - pv[a].clone() * pv[b].clone() / vnorm.clone());
        let flat = flat_hk_forms(self.m + 1);
        let forms = [0, 1, 2].map(|i| {
            let mut f = Form::zeros(n, 2);
            for a in 0..n {
                for b in (a + 1)..n {
                    let mut v = Jet1::constant(0.0);
                    for p in 0..big {
                        for q in 0..big {
                            let c = *flat[i].get(&[p, q]);
                            if c != 0.0 {
                                v = v + dp[a][p].clone() * dp[b][q].clone() * c;
                            }
                        }
                    }
                    f.set(&[a, b], v);
                }
            }
            f
        });
        let orbit: Vec<f64> = orbit1.iter().map(|v| v.value()).collect();
        let vn = vnorm.value();
        let horizontal = dp
            .iter()
            .zip(&pv)
            .map(|(d, c)| d.iter().zip(&orbit).map(|(x, o)| x.value() - c.value() / vn * o).collect())
            .collect();
        Ok(QuotientMetric { g, forms, horizontal, orbit, ambient })
    }

    /// Levi-Civita symbols of the quotient metric at `s`.
    pub fn christoffel(&self, s: &[f64]) -> Result<Christoffel> {
        let g = self.quotient(s)?.g;
        let n = g.dim();
        let ginv = g.values().inverse().ok_or(GeomError::DegenerateMetric { rel_det: 0.0 })?;
        let dg: Vec<Mat<f64>> = (0..n).map(|k| g.map(|v| v.grad_at(k))).collect();
        Ok(christoffel_from(&ginv, &dg))
    }

    /// Curvature by differencing the Christoffel symbols.
    pub fn curvature(&self, s: &[f64]) -> Result<MetricCurvature> {
        let g = self.quotient(s)?.values();
        let r = riemann_fd(|p| self.christoffel(p), s, CURVATURE_STEP)?;
        MetricCurvature::from_parts(g, r)
    }

    /// Gauge-fixes an ambient level-set point: the pivot is the largest `|z_α|`.
    pub fn gauge_fix(m: usize, level: f64, amb: &[f64]) -> Result<(Self, Vec<f64>)> {
        let n1 = m + 1;
        if amb.len() != 4 * n1 {
            return Err(GeomError::DimensionMismatch { expected: 4 * n1, got: amb.len() });
        }
        let residual = moment(m, level, amb).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(residual <= LEVEL_TOL) {
            return Err(GeomError::OffLevelSet { residual });
        }
        let mut mods: Vec<(f64, usize)> = (0..n1).map(|a| (amb[z_index(a)].hypot(amb[z_index(a) + 1]), a)).collect();
        mods.sort_by(|a, b| b.0.total_cmp(&a.0));
        let margin = mods[0].0 - mods.get(1).map_or(0.0, |v| v.0);
        if !(margin > GAUGE_MARGIN) {
            return Err(GeomError::GaugeDegenerate { margin });
        }
        let pivot = mods[0].1;
        let theta = amb[z_index(pivot) + 1].atan2(amb[z_index(pivot)]);
        let (c, sn) = (theta.cos(), theta.sin());
        // z ↦ e^{−iθ}z, w ↦ e^{iθ}w
        let rot = |re: f64, im: f64, sgn: f64| (c * re + sgn * sn * im, c * im - sgn * sn * re);
        let slice = Self::new(m, level, pivot)?;
        let mut s = Vec::with_capacity(4 * m);
        for a in slice.others() {
            let (x, y) = rot(amb[z_index(a)], amb[z_index(a) + 1], 1.0);
            let (p, q) = rot(amb[w_index(n1, a)], amb[w_index(n1, a) + 1], -1.0);
            s.extend([x, y, p, q]);
        }
        Ok((slice, s))
    }
}

/// `(ν₁, ν₂, ν₃)` on `ℍ^{m+1}`.
pub fn moment(m: usize, level: f64, amb: &[f64]) -> [f64; 3] {
    let n1 = m + 1;
    let mut nu = [-level, 0.0, 0.0];
    for a in 0..n1 {
        let (x, y) = (amb[z_index(a)], amb[z_index(a) + 1]);
        let (p, q) = (amb[w_index(n1, a)], amb[w_index(n1, a) + 1]);
        nu[0] += 0.5 * (x * x + y * y - p * p - q * q);
        nu[1] += x * p - y * q;
        nu[2] += x * q + y * p;
    }
    nu
}

/// `iz∂z − iw∂w` on `ℍ^{n1}`, in real components.
pub fn orbit_direction<T: Scalar>(n1: usize, amb: &[T]) -> Vec<T> {
    let mut v = vec![T::zero(); 4 * n1];
    for a in 0..n1 {
        let (z, w) = (z_index(a), w_index(n1, a));
        v[z] = -amb[z + 1].clone();
        v[z + 1] = amb[z].clone();
        v[w] = amb[w + 1].clone();
        v[w + 1] = -amb[w].clone();
    }
    v
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_lies_on_level_set() {
        let sl = CalabiSlice::new(2, 1.0, 1).unwrap();
        let s = [0.2, -0.1, 0.4, 0.3, -0.3, 0.25, 0.1, -0.6];
        let amb = sl.embed(&s);
        let nu = sl.moment(&amb);
        assert!(nu.iter().all(|v| v.abs() < 1e-14), "{nu:?}");
        assert!(amb[z_index(1)] > 0.0 && amb[z_index(1) + 1] == 0.0);
    }

    #[test]
    fn gauge_fix_inverts_embedding() {
        let sl = CalabiSlice::new(1, 1.0, 0).unwrap();
        let s = [0.3, -0.2, 0.5, 0.1];
        let mut amb = sl.embed(&s);
        // rotate by the circle action
        let th: f64 = 0.7;
        let (c, sn) = (th.cos(), th.sin());
        for a in 0..2 {
            let z = z_index(a);
            let (x, y) = (amb[z], amb[z + 1]);
            amb[z] = c * x - sn * y;
            amb[z + 1] = sn * x + c * y;
            let w = w_index(2, a);
            let (p, q) = (amb[w], amb[w + 1]);
            amb[w] = c * p + sn * q;
            amb[w + 1] = -sn * p + c * q;
        }
        let (back, t) = CalabiSlice::gauge_fix(1, 1.0, &amb).unwrap();
        assert_eq!(back.pivot(), 0);
        for (a, b) in s.iter().zip(&t) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn off_level_and_degenerate_gauge_are_rejected() {
        let mut amb = vec![0.0; 8];
        amb[z_index(0)] = 1.0;
        assert!(matches!(CalabiSlice::gauge_fix(1, 1.0, &amb), Err(GeomError::OffLevelSet { .. })));
        let r = 2f64.sqrt() / 2f64.sqrt();
        amb[z_index(0)] = r;
        amb[z_index(1)] = r;
        assert!(matches!(CalabiSlice::gauge_fix(1, 1.0, &amb), Err(GeomError::GaugeDegenerate { .. })));
    }
}
