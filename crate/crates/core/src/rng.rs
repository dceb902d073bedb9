//! Deterministic splitmix64 streams. No stateful global RNG anywhere:
//! every sampler takes an explicit seed so artifacts reproduce bit-exactly
//! regardless of worker count or crate versions.

use crate::sphere::ExtendedComplex;
use num_complex::Complex64;

#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Sequential splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for a salted sub-task (chain index, pixel index, ...).
    pub fn fork(seed: u64, salt: u64) -> Self {
        SplitMix64::new(splitmix64(seed ^ salt.wrapping_mul(0xA24BAED4963EE407)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform in 0..n (n > 0).
    pub fn next_below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Point distributed uniformly on the Riemann sphere (spherical measure),
    /// returned in the plane via stereographic projection.
    pub fn sphere_point(&mut self) -> ExtendedComplex {
        // Uniform on S²: height coordinate uniform in [-1, 1], then azimuth.
        let h = 2.0 * self.next_f64() - 1.0;
        let phi = std::f64::consts::TAU * self.next_f64();
        let r = (1.0 - h * h).sqrt();
        let (x, y) = (r * phi.cos(), r * phi.sin());
        if 1.0 - h < 1e-12 {
            return ExtendedComplex::Infinity;
        }
        ExtendedComplex::finite(Complex64::new(x / (1.0 - h), y / (1.0 - h)))
    }

    /// Uniform point of the disc |z - center| < radius.
    pub fn disc_point(&mut self, center: Complex64, radius: f64) -> Complex64 {
        let r = radius * self.next_f64().sqrt();
        let phi = std::f64::consts::TAU * self.next_f64();
        center + Complex64::new(r * phi.cos(), r * phi.sin())
    }
}
