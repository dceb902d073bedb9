//! The single numeric-policy record every module consults for tolerances.

/// Tolerances for sphere arithmetic and algebraic membership.
///
/// The defaults match double-precision headroom: chordal set comparisons at
/// 1e-8, relative residuals of the defining equation at 1e-9, coincident-root
/// flagging at 1e-10 on unit-normalized coefficients, and Möbius degeneracy at
/// 1e-12 after scaling to unit Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Chordal tolerance for point and set equality on the sphere.
    pub chordal_eq: f64,
    /// Relative residual bound for membership in the defining equation.
    pub residual_rel: f64,
    /// Normalized discriminant magnitude below which a root pair is flagged coincident.
    pub coincident_disc: f64,
    /// Minimum |det| of a unit-Frobenius-norm matrix before it counts as degenerate.
    pub mobius_det_min: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            chordal_eq: 1e-8,
            residual_rel: 1e-9,
            coincident_disc: 1e-10,
            mobius_det_min: 1e-12,
        }
    }
}
