//! Stable-point predicate for the ℂ*-quotient of the flat model.

use num_complex::Complex64;

/// `|u|² > exp(−‖z‖²/2)`; `w` must be nonzero.
pub fn siegel_stable(z: &[Complex64], w: &[Complex64], u: Complex64) -> bool {
    if w.iter().all(|c| c.norm_sqr() == 0.0) || u.norm_sqr() == 0.0 {
        return false;
    }
    let nz: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    u.norm_sqr() > (-nz / 2.0).exp()
}

/// The same predicate in the coordinates `u = e^{iu₂}`, `z = 2u₁`:
/// `‖u₁‖² > Im u₂`.
pub fn siegel_exterior(u1: &[Complex64], u2: Complex64) -> bool {
    let n: f64 = u1.iter().map(|c| c.norm_sqr()).sum();
    n > u2.im
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_with_large_u_is_stable() {
        assert!(siegel_stable(&[c(0.0, 0.0)], &[c(1.0, 0.0)], c(2.0, 0.0)));
    }

    #[test]
    fn boundary_is_excluded() {
        let z = [c(0.7, -0.4), c(0.1, 0.2)];
        let nz: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let u = c((-nz / 4.0).exp(), 0.0);
        // u² rounds exactly onto the boundary value
        let boundary = u.norm_sqr() <= (-nz / 2.0).exp();
        assert_eq!(siegel_stable(&z, &[c(1.0, 0.0)], u), !boundary);
        assert!(!siegel_stable(&z, &[c(1.0, 0.0)], u * 0.999_999));
    }

    #[test]
    fn circle_bundle_points_are_stable() {
        let z = [c(0.3, 0.2), c(-1.1, 0.5)];
        let w = [c(0.4, -0.2), c(0.0, 0.9)];
        let nz: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let nw: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        let u = Complex64::from_polar(((nw - nz) / 4.0).exp(), 1.3);
        assert!(siegel_stable(&z, &w, u));
    }

    #[test]
    fn exterior_form_agrees() {
        // u = e^{iu₂}: |u|² = e^{−2 Im u₂}; z = 2u₁: ‖z‖²/2 = 2‖u₁‖²
        let u1 = [c(0.2, 0.1)];
        for im in [-0.5, 0.0, 0.04, 0.06, 1.0] {
            let u2 = c(0.3, im);
            let u = (Complex64::i() * u2).exp();
            let z: Vec<Complex64> = u1.iter().map(|v| v * 2.0).collect();
            assert_eq!(siegel_stable(&z, &[c(1.0, 0.0)], u), siegel_exterior(&u1, u2));
        }
    }
}
