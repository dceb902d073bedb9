//! Points of the Riemann sphere with an explicit point at infinity.
//!
//! All comparisons are chordal (the spherical metric), so equality involving
//! infinity is well-defined and the branch structure of correspondences can be
//! traversed through poles without special cases.

use num_complex::Complex64;

/// A point of the Riemann sphere: a finite complex value or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

use ExtendedComplex::{Finite, Infinity};

impl ExtendedComplex {
    /// Wraps a finite value. Both components must be finite and non-NaN.
    pub fn finite(z: Complex64) -> Self {
        debug_assert!(z.re.is_finite() && z.im.is_finite(), "non-finite value {z}");
        Finite(z)
    }

    pub const ZERO: ExtendedComplex = Finite(Complex64::new(0.0, 0.0));

    /// Projective value num/den with zero denominators mapping to infinity.
    ///
    /// (0 : 0) has no meaning on the sphere; callers must rule it out, and in
    /// debug builds it asserts.
    pub fn from_ratio(num: Complex64, den: Complex64) -> Self {
        if den.norm_sqr() == 0.0 {
            debug_assert!(num.norm_sqr() != 0.0, "indeterminate ratio 0/0");
            return Infinity;
        }
        let q = num / den;
        if q.re.is_finite() && q.im.is_finite() {
            Finite(q)
        } else {
            Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinity)
    }

    pub fn is_nan(&self) -> bool {
        match self {
            Finite(z) => z.re.is_nan() || z.im.is_nan(),
            Infinity => false,
        }
    }

    /// The finite value, if any.
    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            Finite(z) => Some(*z),
            Infinity => None,
        }
    }

    /// Chordal (spherical) distance; ranges over [0, 2] with d(0, ∞) = 2.
    pub fn chordal(&self, other: &ExtendedComplex) -> f64 {
        match (self, other) {
            (Infinity, Infinity) => 0.0,
            (Finite(z), Infinity) | (Infinity, Finite(z)) => {
                let n = z.norm();
                if n <= 1.0 {
                    2.0 / (1.0 + n * n).sqrt()
                } else {
                    // 2/|z| / sqrt(1/|z|² + 1): overflow-free for huge |z|.
                    let r = 1.0 / n;
                    2.0 * r / (1.0 + r * r).sqrt()
                }
            }
            (Finite(z), Finite(w)) => chordal_finite(*z, *w),
        }
    }

    /// Equality up to chordal tolerance.
    pub fn approx_eq(&self, other: &ExtendedComplex, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    /// Embedding into the unit sphere in R³ (stereographic), so that
    /// Euclidean chords equal chordal distances.
    pub fn embed(&self) -> [f64; 3] {
        match self {
            Infinity => [0.0, 0.0, 1.0],
            Finite(z) => {
                let n = z.norm_sqr();
                if n.is_finite() {
                    let d = 1.0 + n;
                    [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
                } else {
                    // |z|² overflowed; the point is numerically at infinity.
                    let r = 1.0 / z.norm();
                    let zr = Complex64::new(z.re * r, z.im * r); // unit direction
                    let rr = r * r;
                    let d = rr + 1.0;
                    [2.0 * zr.re * r / d, 2.0 * zr.im * r / d, (1.0 - rr) / d]
                }
            }
        }
    }
}

fn chordal_finite(z: Complex64, w: Complex64) -> f64 {
    let (nz, nw) = (z.norm(), w.norm());
    if nz <= 1.0 && nw <= 1.0 {
        2.0 * (z - w).norm() / ((1.0 + nz * nz).sqrt() * (1.0 + nw * nw).sqrt())
    } else if nz > 1.0 && nw > 1.0 {
        // Invert both coordinates: |1/z - 1/w| = |z - w| / (|z||w|).
        let (zi, wi) = (z.inv(), w.inv());
        let (ni, mi) = (zi.norm(), wi.norm());
        2.0 * (zi - wi).norm() / ((1.0 + ni * ni).sqrt() * (1.0 + mi * mi).sqrt())
    } else {
        // One small, one large: scale by the large modulus to avoid overflow.
        let (s, l) = if nz <= 1.0 { (z, w) } else { (w, z) };
        let nl = l.norm();
        let r = 1.0 / nl;
        let diff = (s * r - l * r).norm();
        2.0 * diff / ((1.0 + s.norm_sqr()).sqrt() * (r * r + 1.0).sqrt())
    }
}

impl std::ops::Neg for ExtendedComplex {
    type Output = ExtendedComplex;
    fn neg(self) -> ExtendedComplex {
        match self {
            Finite(z) => Finite(-z),
            Infinity => Infinity,
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        ExtendedComplex::finite(z)
    }
}

impl From<f64> for ExtendedComplex {
    fn from(x: f64) -> Self {
        ExtendedComplex::finite(Complex64::new(x, 0.0))
    }
}

impl std::fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finite(z) => write!(f, "{z}"),
            Infinity => write!(f, "inf"),
        }
    }
}

/// Do two small point multisets agree pointwise up to chordal tolerance?
/// Tries every pairing, so it is exact for the 2- and 3-element sets the
/// correspondence produces.
pub fn multiset_close(xs: &[ExtendedComplex], ys: &[ExtendedComplex], tol: f64) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    match_rest(xs, ys, &mut used, 0, tol)
}

fn match_rest(
    xs: &[ExtendedComplex],
    ys: &[ExtendedComplex],
    used: &mut [bool],
    i: usize,
    tol: f64,
) -> bool {
    if i == xs.len() {
        return true;
    }
    for j in 0..ys.len() {
        if !used[j] && xs[i].chordal(&ys[j]) <= tol {
            used[j] = true;
            if match_rest(xs, ys, used, i + 1, tol) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Symmetric Hausdorff distance between two small point sets.
pub fn set_distance(xs: &[ExtendedComplex], ys: &[ExtendedComplex]) -> f64 {
    let one_way = |from: &[ExtendedComplex], to: &[ExtendedComplex]| {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| x.chordal(y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_way(xs, ys).max(one_way(ys, xs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chordal_basics() {
        let zero = ExtendedComplex::ZERO;
        let inf = Infinity;
        assert_eq!(zero.chordal(&inf), 2.0);
        assert_eq!(inf.chordal(&inf), 0.0);
        assert!((zero.chordal(&Finite(c(1.0, 0.0))) - 2.0f64 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chordal_symmetry_and_inversion_invariance() {
        // d(z, w) = d(1/z, 1/w) is an isometry of the sphere.
        let pts = [c(0.5, 0.3), c(2.0, -1.0), c(-100.0, 40.0), c(1e-3, 0.0)];
        for z in pts {
            for w in pts {
                if z == w {
                    continue;
                }
                let d1 = Finite(z).chordal(&Finite(w));
                let d2 = Finite(w).chordal(&Finite(z));
                let d3 = Finite(z.inv()).chordal(&Finite(w.inv()));
                assert!((d1 - d2).abs() < 1e-14);
                assert!((d1 - d3).abs() < 1e-12, "{d1} vs {d3}");
            }
        }
    }

    #[test]
    fn chordal_huge_values_match_infinity() {
        let huge = Finite(c(1e200, -3e200));
        assert!(huge.chordal(&Infinity) < 1e-12);
        assert!(ExtendedComplex::ZERO.chordal(&huge) > 2.0 - 1e-12);
    }

    #[test]
    fn embed_chords_equal_chordal() {
        let pts = [
            Finite(c(0.0, 0.0)),
            Finite(c(1.5, -2.0)),
            Finite(c(-0.2, 0.1)),
            Infinity,
        ];
        for a in &pts {
            for b in &pts {
                let pa = a.embed();
                let pb = b.embed();
                let chord = ((pa[0] - pb[0]).powi(2)
                    + (pa[1] - pb[1]).powi(2)
                    + (pa[2] - pb[2]).powi(2))
                .sqrt();
                assert!((chord - a.chordal(b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn from_ratio_pole() {
        let w = ExtendedComplex::from_ratio(c(1.0, 0.0), c(0.0, 0.0));
        assert!(w.is_infinite());
    }

    #[test]
    fn multiset_matching() {
        let a = [Finite(c(1.0, 0.0)), Infinity];
        let b = [Infinity, Finite(c(1.0, 1e-12))];
        assert!(multiset_close(&a, &b, 1e-8));
        let d = [Infinity, Finite(c(1.0, 0.1))];
        assert!(!multiset_close(&a, &d, 1e-8));
    }
}
