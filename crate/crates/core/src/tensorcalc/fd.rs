//! Central finite differences. These are independent of the jet machinery
//! and exist to cross-check it.

use crate::linalg::Mat;

/// Default oracle step.
pub const FD_STEP: f64 = 1e-5;

/// `∂f/∂x_k` by the central difference with step `h`.
pub fn partial<F>(f: F, x: &[f64], k: usize, h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut p = x.to_vec();
    p[k] = x[k] + h;
    let fp = f(&p);
    p[k] = x[k] - h;
    let fm = f(&p);
    (fp - fm) / (2.0 * h)
}

/// Partial derivative of a vector-valued function.
pub fn partial_vec<F>(f: F, x: &[f64], k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut p = x.to_vec();
    p[k] = x[k] + h;
    let fp = f(&p);
    p[k] = x[k] - h;
    let fm = f(&p);
    fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// Richardson-extrapolated central difference, fourth order.
pub fn partial_vec_richardson<F>(f: F, x: &[f64], k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let d1 = partial_vec(&f, x, k, h);
    let d2 = partial_vec(&f, x, k, h / 2.0);
    d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

pub fn gradient<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    (0..x.len()).map(|k| partial(&f, x, k, h)).collect()
}

/// Hessian by second central differences.
pub fn hessian<F>(f: F, x: &[f64], h: f64) -> Mat<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let f0 = f(x);
    Mat::from_fn(n, |i, j| {
        let mut p = x.to_vec();
        if i == j {
            p[i] = x[i] + h;
            let fp = f(&p);
            p[i] = x[i] - h;
            let fm = f(&p);
            (fp - 2.0 * f0 + fm) / (h * h)
        } else {
            let mut eval = |si: f64, sj: f64| {
                p[i] = x[i] + si * h;
                p[j] = x[j] + sj * h;
                f(&p)
            };
            (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let f = |x: &[f64]| x[0] * x[0] * x[1];
        let g = gradient(f, &[1.0, 2.0], 1e-4);
        assert!((g[0] - 4.0).abs() < 1e-8 && (g[1] - 1.0).abs() < 1e-8);
        let h = hessian(f, &[1.0, 2.0], 1e-4);
        assert!((h[(0, 1)] - 2.0).abs() < 1e-6 && (h[(0, 0)] - 4.0).abs() < 1e-6);
    }
}
