//! Numerically stable root solving for the small complex polynomials the
//! correspondence algebra needs.
//!
//! Quadratics are solved in closed form: the larger-magnitude root first
//! (choosing the sign of the square root to avoid cancellation against the
//! linear coefficient), the other by Vieta. Solutions are projective, so a
//! vanishing leading coefficient yields roots at infinity instead of blowups.

use crate::error::{Error, Result};
use crate::sphere::ExtendedComplex;
use num_complex::Complex64;

/// Roots of a2·x² + a1·x + a0 = 0 on the Riemann sphere, with the magnitude
/// of the discriminant after scaling the coefficients to unit max-norm
/// (the coincidence indicator: ≈0 means a double root).
///
/// Errors with `DegenerateRoot` when all three coefficients vanish.
pub fn solve_quadratic(
    a2: Complex64,
    a1: Complex64,
    a0: Complex64,
) -> Result<([ExtendedComplex; 2], f64)> {
    let scale = a2.norm().max(a1.norm()).max(a0.norm());
    if scale == 0.0 {
        return Err(Error::DegenerateRoot);
    }
    let s = 1.0 / scale;
    let (a, b, c) = (a2 * s, a1 * s, a0 * s);
    let disc = b * b - 4.0 * a * c;
    let disc_mag = disc.norm();

    if a.norm() == 0.0 {
        // Linear: one root at infinity.
        if b.norm() == 0.0 {
            // Constant nonzero: both roots at infinity (projective double root).
            return Ok(([ExtendedComplex::Infinity, ExtendedComplex::Infinity], disc_mag));
        }
        return Ok((
            [ExtendedComplex::from_ratio(-c, b), ExtendedComplex::Infinity],
            disc_mag,
        ));
    }

    let mut sq = disc.sqrt();
    // Pick the square-root branch aligned with b so b + sq never cancels.
    if (b.conj() * sq).re < 0.0 {
        sq = -sq;
    }
    let q = -0.5 * (b + sq);
    if q.norm() == 0.0 {
        // b = 0 and disc = -4ac with sqrt cancelling: roots ±sqrt(-c/a).
        let r = (-c / a).sqrt();
        return Ok((
            [ExtendedComplex::finite(r), ExtendedComplex::finite(-r)],
            disc_mag,
        ));
    }
    let x1 = ExtendedComplex::from_ratio(q, a);
    let x2 = ExtendedComplex::from_ratio(c, q);
    Ok(([x1, x2], disc_mag))
}

/// Roots of the binary quadratic a2·x² + a1·x·u + a0·u² where the input is
/// itself projective: substitutes the pair (n : d) for the coefficient
/// parameter of a family c2(n,d)·x² + c1(n,d)·x + c0(n,d). Convenience for
/// callers that build coefficients from projective data.
pub fn residual_magnitude(a2: Complex64, a1: Complex64, a0: Complex64, x: Complex64) -> f64 {
    let scale = a2.norm().max(a1.norm()).max(a0.norm());
    if scale == 0.0 {
        return f64::INFINITY;
    }
    let v = a2 * x * x + a1 * x + a0;
    v.norm() / (scale * (1.0 + x.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::multiset_close;
    use crate::sphere::ExtendedComplex::Finite;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_real_roots() {
        // (x-1)(x+2) = x² + x - 2
        let (roots, disc) = solve_quadratic(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!(multiset_close(
            &roots,
            &[Finite(c(1.0, 0.0)), Finite(c(-2.0, 0.0))],
            1e-14
        ));
        assert!(disc > 0.1);
    }

    #[test]
    fn leading_zero_gives_infinity() {
        let (roots, _) = solve_quadratic(c(0.0, 0.0), c(1.0, 0.0), c(-3.0, 0.0)).unwrap();
        assert!(multiset_close(
            &roots,
            &[Finite(c(3.0, 0.0)), ExtendedComplex::Infinity],
            1e-14
        ));
    }

    #[test]
    fn all_zero_is_degenerate() {
        assert!(matches!(
            solve_quadratic(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::DegenerateRoot)
        ));
    }

    #[test]
    fn double_root_flagged() {
        // (x - 2)² = x² - 4x + 4
        let (roots, disc) = solve_quadratic(c(1.0, 0.0), c(-4.0, 0.0), c(4.0, 0.0)).unwrap();
        assert!(disc < 1e-12);
        assert!(roots[0].approx_eq(&Finite(c(2.0, 0.0)), 1e-7));
        assert!(roots[1].approx_eq(&Finite(c(2.0, 0.0)), 1e-7));
    }

    #[test]
    fn cancellation_prone_coefficients() {
        // x² - (1e8 + 1e-8)x + 1: roots 1e8 and 1e-8; the naive formula loses
        // the small root entirely.
        let (roots, _) =
            solve_quadratic(c(1.0, 0.0), c(-(1e8 + 1e-8), 0.0), c(1.0, 0.0)).unwrap();
        let mut vals: Vec<f64> = roots
            .iter()
            .map(|r| r.to_complex().unwrap().re)
            .collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1e-8).abs() / 1e-8 < 1e-12);
        assert!((vals[1] - 1e8).abs() / 1e8 < 1e-12);
    }

    #[test]
    fn pure_imaginary_pair() {
        // x² + 1 = 0 via the q = 0 path (b = 0).
        let (roots, _) = solve_quadratic(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(multiset_close(
            &roots,
            &[Finite(c(0.0, 1.0)), Finite(c(0.0, -1.0))],
            1e-14
        ));
    }

    #[test]
    fn residuals_vanish_at_roots() {
        let (a2, a1, a0) = (c(2.0, 1.0), c(-3.0, 0.5), c(0.7, -2.0));
        let (roots, _) = solve_quadratic(a2, a1, a0).unwrap();
        for r in roots {
            if let Some(x) = r.to_complex() {
                assert!(residual_magnitude(a2, a1, a0, x) < 1e-14);
            }
        }
    }
}
