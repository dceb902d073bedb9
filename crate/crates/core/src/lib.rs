//! Computational dynamics of the two-parameter family of (2:2) holomorphic
//! correspondences that mate quadratic maps with representations of C₂*C₃,
//! together with the Sturmian-word combinatorics and Kleinian-group machinery
//! used to describe pinching deformations and circle-packing boundary
//! representations.
//!
//! Module map:
//! - [`sphere`] / [`mobius`] / [`roots`]: Riemann-sphere arithmetic, projective
//!   2×2 matrices, numerically stable root solving.
//! - [`corr`]: the family-(2) correspondence — branches, covering
//!   correspondences, involutions, critical and fixed points.
//! - [`sturmian`]: p/q rotation words, landing pairs, circle quotients.
//! - [`kleinian`]: representations of C₂*C₃ in PSL₂(ℂ), group words,
//!   parabolic parameter solving, limit-set sampling.
//! - [`dynamics`]: attractor clouds, point classification, raster rendering,
//!   parameter-plane scans.
//! - [`pinch`]: the model strip deformation and its Beltrami coefficient.

pub mod corr;
pub mod dynamics;
pub mod error;
pub mod kleinian;
pub mod mobius;
pub mod pinch;
pub mod policy;
pub mod raster;
pub mod rng;
pub mod roots;
pub mod sphere;
pub mod sturmian;

pub use error::{Error, Result};
pub use policy::NumericPolicy;
pub use sphere::ExtendedComplex;

pub type Complex = num_complex::Complex64;
