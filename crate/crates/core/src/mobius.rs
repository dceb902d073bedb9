//! Projective 2×2 complex matrices acting on the Riemann sphere.

use crate::error::{Error, Result};
use crate::roots::solve_quadratic;
use crate::sphere::ExtendedComplex;
use num_complex::Complex64;

/// A Möbius transformation z ↦ (az + b)/(cz + d), stored projectively:
/// any nonzero scalar multiple is the same map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        MobiusMap { a, b, c, d }
    }

    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Self {
        let r = |x: f64| Complex64::new(x, 0.0);
        MobiusMap::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        MobiusMap::from_reals(1.0, 0.0, 0.0, 1.0)
    }

    /// z ↦ z + t.
    pub fn translation(t: Complex64) -> Self {
        MobiusMap::new(Complex64::ONE, t, Complex64::ZERO, Complex64::ONE)
    }

    /// z ↦ λz.
    pub fn scaling(lambda: Complex64) -> Self {
        MobiusMap::new(lambda, Complex64::ZERO, Complex64::ZERO, Complex64::ONE)
    }

    /// The involution with fixed points p and q: z ↦ ((p+q)z − 2pq)/(2z − (p+q)).
    pub fn involution_fixing(p: Complex64, q: Complex64) -> Self {
        MobiusMap::new(
            p + q,
            -2.0 * p * q,
            Complex64::new(2.0, 0.0),
            -(p + q),
        )
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Scales entries to unit Frobenius norm.
    pub fn normalize(&self) -> Self {
        let n = self.frobenius_norm();
        debug_assert!(n > 0.0, "zero matrix is not a Möbius map");
        let s = 1.0 / n;
        MobiusMap::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// |det| after scaling to unit Frobenius norm falls below `det_min`.
    pub fn is_degenerate(&self, det_min: f64) -> bool {
        let n = self.normalize();
        n.det().norm() <= det_min
    }

    /// Projective evaluation with correct handling of infinity and poles.
    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Finite(z) => {
                ExtendedComplex::from_ratio(self.a * z + self.b, self.c * z + self.d)
            }
            ExtendedComplex::Infinity => ExtendedComplex::from_ratio(self.a, self.c),
        }
    }

    /// Matrix product: (m1 ∘ m2) as maps, i.e. apply m2 first.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
        .normalize()
    }

    /// The inverse map (adjugate, renormalized).
    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.d, -self.b, -self.c, self.a).normalize()
    }

    /// trace²/det: the projectively invariant squared trace of the det-1
    /// normalization. Parabolic or identity ⟺ value 4.
    pub fn trace_sq(&self) -> Complex64 {
        let t = self.a + self.d;
        t * t / self.det()
    }

    /// Fixed points on the sphere (a pair; coincident for parabolics).
    /// Solves cz² + (d−a)z − b = 0 projectively.
    pub fn fixed_points(&self) -> Result<[ExtendedComplex; 2]> {
        let (roots, _disc) = solve_quadratic(self.c, self.d - self.a, -self.b)?;
        Ok(roots)
    }

    /// Derivative at a finite point: det / (cz + d)².
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// Projective distance: 0 when the two matrices agree up to a scalar.
    /// Computed as 1 − |⟨A, B⟩| / (‖A‖‖B‖) on Frobenius inner products.
    pub fn projective_distance(&self, other: &MobiusMap) -> f64 {
        let inner = self.a * other.a.conj()
            + self.b * other.b.conj()
            + self.c * other.c.conj()
            + self.d * other.d.conj();
        1.0 - inner.norm() / (self.frobenius_norm() * other.frobenius_norm())
    }

    /// Equality as maps: agreement up to a nonzero scalar, within tol.
    pub fn projectively_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projectively_eq(&MobiusMap::identity(), tol)
    }

    /// Rejects degenerate matrices.
    pub fn checked(self, det_min: f64) -> Result<Self> {
        if self.is_degenerate(det_min) {
            Err(Error::InvariantViolation(format!(
                "degenerate Möbius matrix, |det| ≤ {det_min} after normalization"
            )))
        } else {
            Ok(self)
        }
    }
}

impl std::ops::Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        self.compose(&rhs)
    }
}

impl std::fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
