//! Property tests for the algebraic kernels.

use corrdyn_core::mobius::MobiusMap;
use corrdyn_core::roots::{residual_magnitude, solve_quadratic};
use corrdyn_core::sturmian::{phi, BinaryWord};
use corrdyn_core::ExtendedComplex;
use num_complex::Complex64;
use proptest::prelude::*;

fn finite_complex() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn nondegenerate_mobius() -> impl Strategy<Value = MobiusMap> {
    (finite_complex(), finite_complex(), finite_complex(), finite_complex())
        .prop_map(|(a, b, c, d)| MobiusMap::new(a, b, c, d))
        .prop_filter("nondegenerate", |m| !m.is_degenerate(1e-6))
}

proptest! {
    /// apply(compose(A,B), z) = apply(A, apply(B, z)) within chordal tolerance.
    #[test]
    fn mobius_composition_acts_like_composition(
        a in nondegenerate_mobius(),
        b in nondegenerate_mobius(),
        z in finite_complex(),
    ) {
        let z = ExtendedComplex::finite(z);
        let lhs = a.compose(&b).apply(z);
        let rhs = a.apply(b.apply(z));
        prop_assert!(lhs.chordal(&rhs) < 1e-8, "{lhs} vs {rhs}");
    }

    /// Finite quadratic roots have tiny normalized residuals.
    #[test]
    fn quadratic_roots_satisfy_the_equation(
        a2 in finite_complex(),
        a1 in finite_complex(),
        a0 in finite_complex(),
    ) {
        prop_assume!(a2.norm() + a1.norm() + a0.norm() > 1e-6);
        let (roots, _) = solve_quadratic(a2, a1, a0).unwrap();
        for r in roots {
            if let Some(x) = r.to_complex() {
                prop_assert!(residual_magnitude(a2, a1, a0, x) < 1e-10);
            }
        }
    }

    /// phi is an involution and rotation preserves the cyclic class.
    #[test]
    fn word_operations(bits in prop::collection::vec(any::<bool>(), 1..16), shift in 0usize..16) {
        let w = BinaryWord::from_bits(&bits).unwrap();
        prop_assert_eq!(phi(&phi(&w)), w.clone());
        let rotated = w.rotate_left(shift % w.len());
        prop_assert!(rotated.cyclic_eq(&w));
        prop_assert_eq!(rotated.rotate_right(shift % w.len()), w.clone());
        prop_assert_eq!(w.reversed().reversed(), w);
    }
}
