//! Parallel transport around closed loops and holonomy membership surveys.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{GeomError, Result};
use crate::groups::{complex_from_real, standard_commutator, u_star_test};
use crate::linalg::{to_dmatrix, Mat};
use crate::tensorcalc::Connection;

/// Default transport tolerance.
pub const TRANSPORT_TOL: f64 = 1e-8;
/// Membership tolerance for transported elements.
pub const MEMBERSHIP_TOL: f64 = 1e-4;
/// Closure tolerance for loops.
pub const CLOSURE_TOL: f64 = 1e-12;
const MAX_STEPS: usize = 1 << 14;

type CurveFn = Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// One piece of a loop, parametrized on `[0, 1]`.
#[derive(Clone)]
pub enum Segment {
    Line { start: Vec<f64>, end: Vec<f64> },
    /// Position and velocity as functions of the parameter.
    Curve(CurveFn),
}

impl Segment {
    pub fn curve<F>(f: F) -> Self
    where
        F: Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        Segment::Curve(Arc::new(f))
    }

    /// Position and velocity at parameter `s`.
    pub fn eval(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Segment::Line { start, end } => {
                let vel: Vec<f64> = start.iter().zip(end).map(|(a, b)| b - a).collect();
                let pos = start.iter().zip(&vel).map(|(a, v)| a + s * v).collect();
                (pos, vel)
            }
            Segment::Curve(f) => f(s),
        }
    }

    fn reversed(&self) -> Self {
        match self {
            Segment::Line { start, end } => Segment::Line { start: end.clone(), end: start.clone() },
            Segment::Curve(f) => {
                let f = f.clone();
                Segment::curve(move |s| {
                    let (p, v) = f(1.0 - s);
                    (p, v.into_iter().map(|x| -x).collect())
                })
            }
        }
    }
}

/// Closed piecewise-smooth loop based at `basepoint`.
#[derive(Clone)]
pub struct LoopSpec {
    pub basepoint: Vec<f64>,
    pub segments: Vec<Segment>,
    /// Initial RK4 steps per segment; refined by doubling.
    pub subdivisions: usize,
}

impl LoopSpec {
    pub fn new(basepoint: Vec<f64>, segments: Vec<Segment>, subdivisions: usize) -> Result<Self> {
        let l = Self { basepoint, segments, subdivisions: subdivisions.max(1) };
        l.validate()?;
        Ok(l)
    }

    /// Closed polygon through `vertices`, starting and ending at the first.
    pub fn polygon(vertices: &[Vec<f64>], subdivisions: usize) -> Result<Self> {
        let n = vertices.len();
        let segments =
            (0..n).map(|k| Segment::Line { start: vertices[k].clone(), end: vertices[(k + 1) % n].clone() }).collect();
        Self::new(vertices[0].clone(), segments, subdivisions)
    }

    /// Coordinate rectangle in the `(i, j)` plane with signed sides `a`, `b`.
    pub fn rectangle(base: &[f64], i: usize, j: usize, a: f64, b: f64, subdivisions: usize) -> Result<Self> {
        let shift = |da: f64, db: f64| {
            let mut p = base.to_vec();
            p[i] += da;
            p[j] += db;
            p
        };
        Self::polygon(&[shift(0.0, 0.0), shift(a, 0.0), shift(a, b), shift(0.0, b)], subdivisions)
    }

    pub fn reversed(&self) -> Self {
        Self {
            basepoint: self.basepoint.clone(),
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            subdivisions: self.subdivisions,
        }
    }

    /// `self` followed by `other` (same basepoint).
    pub fn then(&self, other: &Self) -> Result<Self> {
        let segments = self.segments.iter().chain(&other.segments).cloned().collect();
        Self::new(self.basepoint.clone(), segments, self.subdivisions.max(other.subdivisions))
    }

    fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(GeomError::Invalid("loop has no segments".into()));
        }
        let mut at = self.basepoint.clone();
        for seg in &self.segments {
            let (start, _) = seg.eval(0.0);
            if crate::linalg::max_abs_diff(&start, &at) > CLOSURE_TOL {
                return Err(GeomError::Invalid("loop segments are not contiguous".into()));
            }
            at = seg.eval(1.0).0;
        }
        if crate::linalg::max_abs_diff(&at, &self.basepoint) > CLOSURE_TOL {
            return Err(GeomError::Invalid("loop is not closed".into()));
        }
        Ok(())
    }
}

/// Holonomy of a loop on the basepoint tangent space.
#[derive(Clone, Debug)]
pub struct HolonomyElement {
    /// `H[(i, j)]`: component `i` of the transport of `∂_j`.
    pub matrix: Mat<f64>,
    /// Richardson estimate of the integrator error (max-norm).
    pub error: f64,
    /// RK4 steps per segment in the accepted solution.
    pub steps: usize,
}

/// `dP/ds = −Γ(ẋ) P`, `Γ(ẋ)ⁱₖ = Γⁱⱼₖ ẋʲ`.
fn rhs(conn: &dyn Connection, seg: &Segment, s: f64, p: &Mat<f64>) -> Result<Mat<f64>> {
    let (x, v) = seg.eval(s);
    if !conn.chart().contains(&x) {
        return Err(GeomError::DomainViolation { chart: conn.chart().name().to_string(), point: x });
    }
    let gam = conn.gamma(&x)?;
    let n = p.dim();
    let a = Mat::from_fn(n, |i, k| -(0..n).map(|j| gam.get(i, j, k) * v[j]).sum::<f64>());
    Ok(a.mul(p))
}

/// Transport with a fixed number of RK4 steps per segment.
pub fn transport_fixed(conn: &dyn Connection, lp: &LoopSpec, steps: usize) -> Result<Mat<f64>> {
    let n = conn.dim();
    let mut p = Mat::identity(n);
    let h = 1.0 / steps as f64;
    for seg in &lp.segments {
        for k in 0..steps {
            let s = k as f64 * h;
            let k1 = rhs(conn, seg, s, &p)?;
            let k2 = rhs(conn, seg, s + h / 2.0, &p.add(&k1.scale(h / 2.0)))?;
            let k3 = rhs(conn, seg, s + h / 2.0, &p.add(&k2.scale(h / 2.0)))?;
            let k4 = rhs(conn, seg, s + h, &p.add(&k3.scale(h)))?;
            p = p.add(&k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0));
        }
    }
    Ok(p)
}

/// Transport around `lp`, doubling the step count until the Richardson
/// error estimate is below `tol`; returns the extrapolated element.
pub fn parallel_transport(conn: &dyn Connection, lp: &LoopSpec, tol: f64) -> Result<HolonomyElement> {
    lp.validate()?;
    let mut steps = lp.subdivisions;
    let mut coarse = transport_fixed(conn, lp, steps)?;
    let mut estimate = f64::INFINITY;
    while steps * 2 <= MAX_STEPS {
        let fine = transport_fixed(conn, lp, steps * 2)?;
        estimate = fine.sub(&coarse).max_abs() / 15.0;
        steps *= 2;
        if estimate <= tol {
            let matrix = fine.add(&fine.sub(&coarse).scale(1.0 / 15.0));
            return Ok(HolonomyElement { matrix, error: estimate, steps });
        }
        coarse = fine;
    }
    Err(GeomError::ToleranceNotMet { estimate, tol })
}

/// Real basis of `T_x` in which `I` is the standard structure on interleaved
/// coordinates `z_a = x_{2a} + i x_{2a+1}` and `J` is `A(z, w) = (w̄, −z̄)`:
/// columns `f_a, I f_a` with `f_{m+a} = −J f_a`, `(f_a)` quaternionic
/// Gram–Schmidt in `g`.
pub fn adapted_frame(g: &Mat<f64>, triple: &[Mat<f64>; 3]) -> Result<Mat<f64>> {
    let n = g.dim();
    if n % 4 != 0 {
        return Err(GeomError::DimensionMismatch { expected: 4 * (n / 4 + 1), got: n });
    }
    let m = n / 4;
    let [i, j, k] = triple;
    let ip = |a: &[f64], b: &[f64]| -> f64 { (0..n).map(|r| (0..n).map(|c| g[(r, c)] * a[r] * b[c]).sum::<f64>()).sum() };
    let mut quat: Vec<Vec<f64>> = Vec::new();
    let mut firsts: Vec<Vec<f64>> = Vec::new();
    for c in 0..n {
        if firsts.len() == m {
            break;
        }
        let mut v: Vec<f64> = (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for q in &quat {
                let d = ip(&v, q);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = ip(&v, &v).sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        for e in [v.clone(), i.mul_vec(&v), j.mul_vec(&v), k.mul_vec(&v)] {
            quat.push(e);
        }
        firsts.push(v);
    }
    if firsts.len() < m {
        return Err(GeomError::Invalid("triple does not span the tangent space".into()));
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let fs: Vec<Vec<f64>> = firsts.iter().cloned().chain(firsts.iter().map(|f| j.mul_vec(f).into_iter().map(|x| -x).collect())).collect();
    for f in &fs {
        cols.push(f.clone());
        cols.push(i.mul_vec(f));
    }
    Ok(Mat::from_fn(n, |r, c| cols[c][r]))
}

/// Membership defect of a holonomy element in the adapted frame `e`:
/// `max(‖[H, I₀]‖, U*(2m) defect)`.
pub fn membership_defect(h: &Mat<f64>, e: &Mat<f64>) -> Result<f64> {
    let einv = e.inverse().ok_or(GeomError::Singular(e.det()))?;
    let hf: DMatrix<f64> = to_dmatrix(&einv.mul(h).mul(e));
    let comm = standard_commutator(&hf);
    let t = u_star_test(&complex_from_real(&hf), 1e-12)?;
    Ok(comm.max(t.defect()))
}

/// Survey outcome; serialized as the survey report.
#[derive(Clone, Debug, Serialize)]
pub struct SurveyReport {
    pub n_loops: usize,
    pub pass_fraction: f64,
    pub max_defect: f64,
    pub frame_hash: String,
    pub seed: u64,
}

/// Options for [`holonomy_survey`].
#[derive(Clone, Copy, Debug)]
pub struct SurveyOptions {
    pub n_loops: usize,
    pub seed: u64,
    pub side_range: (f64, f64),
    pub tol: f64,
    pub membership_tol: f64,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        Self { n_loops: 200, seed: 0, side_range: (0.05, 0.2), tol: TRANSPORT_TOL, membership_tol: MEMBERSHIP_TOL }
    }
}

/// Random coordinate rectangle for loop `k` of a survey.
pub fn survey_loop(base: &[f64], k: usize, opts: &SurveyOptions) -> Result<LoopSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(k as u64);
    let n = base.len();
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let (lo, hi) = opts.side_range;
    let mut side = || rng.random_range(lo..hi) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let (a, b) = (side(), side());
    LoopSpec::rectangle(base, i, j, a, b, 8)
}

/// Transports `n_loops` random rectangles at `base` and tests each element
/// for membership in `U*(2m)` in the frame adapted to `triple`.
pub fn holonomy_survey(
    conn: &dyn Connection,
    g: &Mat<f64>,
    triple: &[Mat<f64>; 3],
    base: &[f64],
    opts: &SurveyOptions,
) -> Result<(SurveyReport, Vec<f64>)> {
    let frame = adapted_frame(g, triple)?;
    let defects: Vec<f64> = (0..opts.n_loops)
        .into_par_iter()
        .map(|k| {
            let lp = survey_loop(base, k, opts)?;
            let h = parallel_transport(conn, &lp, opts.tol)?;
            membership_defect(&h.matrix, &frame)
        })
        .collect::<Result<_>>()?;
    let pass = defects.iter().filter(|d| **d <= opts.membership_tol).count();
    let report = SurveyReport {
        n_loops: opts.n_loops,
        pass_fraction: if opts.n_loops == 0 { 1.0 } else { pass as f64 / opts.n_loops as f64 },
        max_defect: defects.iter().cloned().fold(0.0, f64::max),
        frame_hash: frame_hash(&frame),
        seed: opts.seed,
    };
    Ok((report, defects))
}

/// SHA-256 of the frame entries rounded to 1e−9.
pub fn frame_hash(e: &Mat<f64>) -> String {
    let mut h = Sha256::new();
    for v in e.data() {
        let r = (v * 1e9).round() as i64;
        h.update(r.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Rotation angle of a 2d holonomy in a `g`-orthonormal frame.
pub fn rotation_angle(h: &Mat<f64>, g: &Mat<f64>) -> f64 {
    // L with g = LᵀL (Cholesky of a 2×2)
    let l11 = g[(0, 0)].sqrt();
    let l12 = g[(0, 1)] / l11;
    let l22 = (g[(1, 1)] - l12 * l12).sqrt();
    let l = Mat::from_vec(2, vec![l11, l12, 0.0, l22]);
    let linv = l.inverse().expect("positive-definite metric");
    let r = l.mul(h).mul(&linv);
    r[(1, 0)].atan2(r[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::tensorcalc::{LeviCivita, MetricField};

    #[test]
    fn flat_transport_is_identity() {
        let g = MetricField::euclidean(Chart::euclidean("r4", 4));
        let conn = LeviCivita::new(g);
        let lp = LoopSpec::polygon(&[vec![0.0; 4], vec![1.0, 0.5, 0.0, 0.2], vec![0.3, -1.0, 0.7, 0.0]], 4).unwrap();
        let h = parallel_transport(&conn, &lp, 1e-10).unwrap();
        assert!(h.matrix.sub(&Mat::identity(4)).max_abs() < 1e-9);
    }

    #[test]
    fn open_path_is_rejected() {
        let seg = Segment::Line { start: vec![0.0, 0.0], end: vec![1.0, 0.0] };
        assert!(LoopSpec::new(vec![0.0, 0.0], vec![seg], 4).is_err());
    }

    #[test]
    fn adapted_frame_puts_triple_in_standard_form() {
        let m = 2;
        let s = crate::gallery::flat::flat_hk_structures(m);
        let e = adapted_frame(&Mat::identity(4 * m), &s).unwrap();
        let einv = e.inverse().unwrap();
        let jf = to_dmatrix(&einv.mul(&s[1]).mul(&e));
        // J in the frame is A: (z, w) ↦ (w̄, −z̄); as a real map it commutes
        // with nothing complex-linear, so check it on basis vectors
        let n = 4 * m;
        for c in 0..n {
            let mut v = nalgebra::DVector::zeros(n);
            v[c] = 1.0;
            let jv = &jf * &v;
            let z: Vec<num_complex::Complex64> = (0..2 * m).map(|a| num_complex::Complex64::new(v[2 * a], v[2 * a + 1])).collect();
            let expect: Vec<num_complex::Complex64> = (0..2 * m)
                .map(|a| if a < m { z[a + m].conj() } else { -z[a - m].conj() })
                .collect();
            for a in 0..2 * m {
                assert!((jv[2 * a] - expect[a].re).abs() < 1e-12 && (jv[2 * a + 1] - expect[a].im).abs() < 1e-12);
            }
        }
        assert!(standard_commutator(&to_dmatrix(&einv.mul(&s[0]).mul(&e))) < 1e-12);
    }
}
