//! The two-parameter family of (2:2) correspondences
//!
//!   u² + u·v + v² = 3k,   u = (az+1)/(z+1),  v = (aw−1)/(w−1),
//!
//! in the coordinates where the compatible involution is J(z) = −z.
//! (Published parameter values may differ from ours by the Möbius conjugacy
//! that brings J to this normal form.)
//!
//! Everything is evaluated projectively: the branches have poles at z = −1
//! and w = 1 and the renderer has to traverse them.

use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::policy::NumericPolicy;
use crate::rng::SplitMix64;
use crate::roots::{residual_magnitude, solve_quadratic};
use crate::sphere::{set_distance, ExtendedComplex};
use num_complex::Complex64;

/// Degenerate coordinate changes: reject a within this distance of ±1.
const A_DEGENERATE_TOL: f64 = 1e-9;

/// One evaluation of a branch pair: the two image points plus the magnitude
/// of the discriminant of the cleared quadratic actually solved, normalized
/// to unit coefficient scale. Zero means the two points coincide (a critical
/// value).
#[derive(Debug, Clone, Copy)]
pub struct BranchImage {
    pub points: [ExtendedComplex; 2],
    pub disc: f64,
}

impl BranchImage {
    pub fn coincident(&self, policy: &NumericPolicy) -> bool {
        self.disc < policy.coincident_disc
    }
}

/// A member of the family, parameterized by complex (a, k).
#[derive(Debug, Clone, Copy)]
pub struct Correspondence {
    pub a: Complex64,
    pub k: Complex64,
    pub policy: NumericPolicy,
}

impl Correspondence {
    pub fn new(a: Complex64, k: Complex64) -> Result<Self> {
        Correspondence::with_policy(a, k, NumericPolicy::default())
    }

    pub fn with_policy(a: Complex64, k: Complex64, policy: NumericPolicy) -> Result<Self> {
        let one = Complex64::ONE;
        if (a - one).norm() < A_DEGENERATE_TOL || (a + one).norm() < A_DEGENERATE_TOL {
            return Err(Error::ParameterDegenerate(a));
        }
        Ok(Correspondence { a, k, policy })
    }

    /// The family's normal-form involution J(z) = −z.
    pub fn jmap(&self) -> MobiusMap {
        MobiusMap::from_reals(-1.0, 0.0, 0.0, 1.0)
    }

    /// u = (az+1)/(z+1) as a projective pair (num : den); (a : 1) at z = ∞.
    fn u_proj(&self, z: ExtendedComplex) -> (Complex64, Complex64) {
        match z {
            ExtendedComplex::Finite(z) => (self.a * z + Complex64::ONE, z + Complex64::ONE),
            ExtendedComplex::Infinity => (self.a, Complex64::ONE),
        }
    }

    /// Coefficients of the cleared quadratic A·w² + B·w + C = 0 satisfied by
    /// the forward images of z.
    fn forward_coeffs(&self, z: ExtendedComplex) -> (Complex64, Complex64, Complex64) {
        let (n, d) = self.u_proj(z);
        let a = self.a;
        let k3 = 3.0 * self.k;
        let dd = d * d;
        let nd = n * d;
        let tail = n * n - k3 * dd;
        let big_a = a * a * dd + a * nd + tail;
        let big_b = -2.0 * a * dd - (a + Complex64::ONE) * nd - 2.0 * tail;
        let big_c = dd + nd + tail;
        (big_a, big_b, big_c)
    }

    /// The two solutions w of the defining equation for given z.
    ///
    /// z = −1 (u = ∞) degenerates to the double image w = 1, which is what the
    /// cleared-denominator polynomial gives in the projective limit.
    pub fn forward(&self, z: ExtendedComplex) -> Result<BranchImage> {
        let (big_a, big_b, big_c) = self.forward_coeffs(z);
        let (points, disc) = solve_quadratic(big_a, big_b, big_c)?;
        Ok(BranchImage { points, disc })
    }

    /// The two solutions z for given w, via the (z, w) ↦ (−w, −z) symmetry:
    /// backward(w) = −forward(−w).
    pub fn backward(&self, w: ExtendedComplex) -> Result<BranchImage> {
        let img = self.forward(-w)?;
        Ok(BranchImage {
            points: [-img.points[0], -img.points[1]],
            disc: img.disc,
        })
    }

    /// Relative residual of the cleared-denominator polynomial at (z, w).
    /// Total on the sphere: for w = ∞ the leading coefficient must vanish.
    pub fn residual(&self, z: ExtendedComplex, w: ExtendedComplex) -> f64 {
        let (big_a, big_b, big_c) = self.forward_coeffs(z);
        let scale = big_a.norm().max(big_b.norm()).max(big_c.norm());
        if scale == 0.0 {
            return f64::INFINITY;
        }
        match w {
            ExtendedComplex::Finite(w) => residual_magnitude(big_a, big_b, big_c, w),
            ExtendedComplex::Infinity => big_a.norm() / scale,
        }
    }

    /// Residual in the (u, v) variables, |u² + uv + v² − 3k| relatively
    /// normalized; None when z or w sits at a pole of the coordinates.
    pub fn residual_uv(&self, z: ExtendedComplex, w: ExtendedComplex) -> Option<f64> {
        let u = self.u_value(z)?;
        let v = self.v_value(w)?;
        let k3 = 3.0 * self.k;
        let val = u * u + u * v + v * v - k3;
        Some(val.norm() / (1.0 + u.norm_sqr() + v.norm_sqr() + k3.norm()))
    }

    fn u_value(&self, z: ExtendedComplex) -> Option<Complex64> {
        let (n, d) = self.u_proj(z);
        if d.norm() < 1e-12 {
            None
        } else {
            Some(n / d)
        }
    }

    fn v_value(&self, w: ExtendedComplex) -> Option<Complex64> {
        // v(w) = u(−w).
        self.u_value(-w)
    }

    /// Derivative dw/dz of the branch of the correspondence through (z, w),
    /// by implicit differentiation:
    ///
    ///   dw/dz = (2u+v)(w−1)² / ((u+2v)(z+1)²).
    ///
    /// Infinite at branch points (where the two images coincide) and at the
    /// coordinate poles.
    pub fn branch_derivative(&self, z: ExtendedComplex, w: ExtendedComplex) -> Complex64 {
        let (u, v) = match (self.u_value(z), self.v_value(w)) {
            (Some(u), Some(v)) => (u, v),
            _ => return Complex64::new(f64::INFINITY, 0.0),
        };
        let (z, w) = (z.to_complex().unwrap(), w.to_complex().unwrap());
        let num = (2.0 * u + v) * (w - Complex64::ONE) * (w - Complex64::ONE);
        let den = (u + 2.0 * v) * (z + Complex64::ONE) * (z + Complex64::ONE);
        if den.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        num / den
    }

    /// Forward-critical points: solutions of (az+1)/(z+1) = ±2√k, where the
    /// two forward images coincide (the v-quadratic discriminant 12k − 3u²
    /// vanishes).
    pub fn critical_points_forward(&self) -> [ExtendedComplex; 2] {
        let s = (2.0 * self.k.sqrt(), -2.0 * self.k.sqrt());
        [self.solve_u_equals(s.0), self.solve_u_equals(s.1)]
    }

    /// Backward-critical points, via the symmetry: w is backward-critical
    /// iff −w is forward-critical.
    pub fn critical_points_backward(&self) -> [ExtendedComplex; 2] {
        let f = self.critical_points_forward();
        [-f[0], -f[1]]
    }

    /// Points where one branch has vanishing derivative dw/dz: 2u + v = 0
    /// against the defining equation forces u = ±√k. On the polynomial side
    /// these play the role of the critical point of q_c (at k = 1 they are
    /// the parabolic glue point and −2/(a+1)).
    pub fn branch_derivative_zeros(&self) -> [ExtendedComplex; 2] {
        let s = self.k.sqrt();
        [self.solve_u_equals(s), self.solve_u_equals(-s)]
    }

    /// z with u(z) = s: z = (s−1)/(a−s).
    fn solve_u_equals(&self, s: Complex64) -> ExtendedComplex {
        ExtendedComplex::from_ratio(s - Complex64::ONE, self.a - s)
    }

    /// Coefficients (c4, c2, c0) of the fixed-point polynomial
    /// p(z,z) = c4·z⁴ + c2·z² + c0 (only even powers, by the J-symmetry):
    ///
    ///   p(z,z) = 3(az²−1)² + (1−a)²z² − 3k(z²−1)².
    pub fn fixed_point_coeffs(&self) -> (Complex64, Complex64, Complex64) {
        let (a, k) = (self.a, self.k);
        let one = Complex64::ONE;
        let c4 = 3.0 * (a * a - k);
        let c2 = (one - a) * (one - a) - 6.0 * a + 6.0 * k;
        let c0 = 3.0 * (one - k);
        (c4, c2, c0)
    }

    /// Degree of p(z,z) (4, 2 or 0 as leading coefficients vanish exactly).
    pub fn fixed_point_degree(&self) -> Result<usize> {
        let (c4, c2, c0) = self.fixed_point_coeffs();
        if c4.norm() != 0.0 {
            Ok(4)
        } else if c2.norm() != 0.0 {
            Ok(2)
        } else if c0.norm() != 0.0 {
            Ok(0)
        } else {
            Err(Error::DegenerateRoot)
        }
    }

    /// Finite fixed points of the correspondence with branch multipliers.
    ///
    /// Roots of p(z,z) come in ± pairs (z² solves a quadratic); a double root
    /// at z = 0 shows up as the pair (0, −0). Each fixed point carries the
    /// multiplier dw/dz of every branch through (z, z) — one generically, two
    /// when the fixed point is also a branch point.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        let (c4, c2, c0) = self.fixed_point_coeffs();
        if c4.norm() == 0.0 && c2.norm() == 0.0 && c0.norm() == 0.0 {
            return Err(Error::DegenerateRoot);
        }
        let (s_roots, _) = solve_quadratic(c4, c2, c0)?;
        let mut out = Vec::new();
        for s in s_roots {
            let Some(s) = s.to_complex() else {
                continue; // fixed points at infinity when the degree drops
            };
            let r = s.sqrt();
            for z in [r, -r] {
                let z = ExtendedComplex::finite(z);
                out.push(FixedPoint {
                    z,
                    multipliers: self.multipliers_at(z)?,
                });
            }
        }
        Ok(out)
    }

    /// Multipliers of the branches through (z, z): one per forward image of z
    /// that lands back on z (within chordal tolerance).
    fn multipliers_at(&self, z: ExtendedComplex) -> Result<Vec<Complex64>> {
        let img = self.forward(z)?;
        let tol = self.policy.chordal_eq.max(1e-7);
        Ok(img
            .points
            .iter()
            .filter(|w| w.chordal(&z) <= tol)
            .map(|_| self.branch_derivative(z, z))
            .collect())
    }

    /// Forward images from a perturbed defining polynomial: epsilon added to
    /// the leading (w²) coefficient of the cleared quadratic. A correspondence
    /// off the family; its involution check is expected to fail. Test harness
    /// for the equivalence-relation falsification.
    pub fn forward_perturbed(&self, z: ExtendedComplex, epsilon: f64) -> Result<BranchImage> {
        let (big_a, big_b, big_c) = self.forward_coeffs(z);
        let (points, disc) =
            solve_quadratic(big_a + Complex64::new(epsilon, 0.0), big_b, big_c)?;
        Ok(BranchImage { points, disc })
    }
}

/// A fixed point of the correspondence with its branch multipliers.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub z: ExtendedComplex,
    pub multipliers: Vec<Complex64>,
}

/// The cubic of the normal form, Q(z) = z³ − 3z.
pub fn q_cubic(z: Complex64) -> Complex64 {
    z * z * z - 3.0 * z
}

/// The full covering correspondence of Q: all w with Q(w) = Q(z).
/// Contains z itself (the identity branch).
pub fn covering_correspondence(z: ExtendedComplex) -> [ExtendedComplex; 3] {
    let ([r0, r1], _) = covering_correspondence_reduced(z);
    [z, r0, r1]
}

/// The reduced covering correspondence: roots of
/// (Q(w) − Q(z))/(w − z) = w² + wz + z² − 3, solved projectively.
pub fn covering_correspondence_reduced(z: ExtendedComplex) -> ([ExtendedComplex; 2], f64) {
    let (n, d) = match z {
        ExtendedComplex::Finite(z) => (z, Complex64::ONE),
        ExtendedComplex::Infinity => (Complex64::ONE, Complex64::ZERO),
    };
    let dd = d * d;
    let (roots, disc) = solve_quadratic(dd, n * d, n * n - 3.0 * dd)
        .expect("reduced covering quadratic cannot be identically zero");
    (roots, disc)
}

/// Branch derivative of the full covering correspondence: dw/dz = Q′(z)/Q′(w).
/// Exactly 1 on the identity branch w = z.
pub fn covering_multiplier(z: Complex64, w: Complex64) -> Complex64 {
    let dq = |t: Complex64| 3.0 * t * t - 3.0;
    dq(z) / dq(w)
}

/// Report from the compatible-involution (equivalence-relation) check.
#[derive(Debug, Clone, Copy)]
pub struct InvolutionReport {
    pub passed: bool,
    pub worst_violation: f64,
    pub samples: usize,
    pub resampled: usize,
}

/// Checks that (J∘f) ∪ id is an equivalence relation for the forward map
/// given by `images`: for random z, the 3-element class {z, −w₁, −w₂} must
/// equal the class of each of its members (as sets, chordal tolerance).
pub fn involution_check_with<F>(
    images: F,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<InvolutionReport>
where
    F: Fn(ExtendedComplex) -> Result<BranchImage>,
{
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    let mut resampled = 0usize;
    let class_of = |z: ExtendedComplex| -> Result<[ExtendedComplex; 3]> {
        let img = images(z)?;
        Ok([z, -img.points[0], -img.points[1]])
    };
    let mut done = 0usize;
    while done < samples {
        if resampled > samples * 10 + 100 {
            return Err(Error::SamplingDegenerate);
        }
        let z = rng.sphere_point();
        let base = match class_of(z) {
            Ok(c) if c.iter().all(|p| !p.is_nan()) => c,
            _ => {
                resampled += 1;
                continue;
            }
        };
        let mut bad = false;
        for y in base {
            match class_of(y) {
                Ok(cy) if cy.iter().all(|p| !p.is_nan()) => {
                    worst = worst.max(set_distance(&base, &cy));
                }
                _ => {
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            resampled += 1;
            continue;
        }
        done += 1;
    }
    Ok(InvolutionReport {
        passed: worst <= tol,
        worst_violation: worst,
        samples,
        resampled,
    })
}

/// The involution check for a family member proper.
pub fn compatible_involution_check(
    c: &Correspondence,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<InvolutionReport> {
    involution_check_with(|z| c.forward(z), samples, tol, seed)
}
