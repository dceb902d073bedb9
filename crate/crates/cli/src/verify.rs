//! Named invariant suites behind `corrdyn verify`: each property prints one
//! pass/fail line with its worst-case margin and lands in a JSON report.

use corrdyn_core::corr::{
    compatible_involution_check, covering_correspondence, covering_correspondence_reduced,
    covering_multiplier, q_cubic, Correspondence,
};
use corrdyn_core::kleinian::{
    evaluate_word, modular_representation, trace_word_sq, GroupWord,
};
use corrdyn_core::mobius::MobiusMap;
use corrdyn_core::pinch::{beltrami_coefficient, default_model, strip_map};
use corrdyn_core::rng::SplitMix64;
use corrdyn_core::sturmian::{
    is_sturmian, mechanical_word, min_max_words, rotation_number, sturmian_orbit_angles,
    BinaryWord, RotationNumber,
};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    /// Worst margin observed, in the property's own units.
    pub margin: f64,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    let properties = match name {
        "algebra" => algebra_suite(seed),
        "sturmian" => sturmian_suite(),
        "kleinian-modular" => kleinian_modular_suite(),
        "involution" => involution_suite(seed),
        "pinch" => pinch_suite(),
        _ => return None,
    };
    let passed = properties.iter().all(|p| p.passed);
    Some(SuiteReport {
        suite: name.to_string(),
        seed,
        passed,
        properties,
    })
}

fn prop(name: &str, passed: bool, margin: f64) -> PropertyReport {
    PropertyReport {
        name: name.to_string(),
        passed,
        margin,
    }
}

fn sample_params(rng: &mut SplitMix64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    while out.len() < n {
        let a = rng.disc_point(Complex64::ZERO, 5.0);
        let k = rng.disc_point(Complex64::ONE, 0.5);
        if (a - Complex64::ONE).norm() > 0.15 && (a + Complex64::ONE).norm() > 0.15 {
            out.push((a, k));
        }
    }
    out
}

fn algebra_suite(seed: u64) -> Vec<PropertyReport> {
    let mut rng = SplitMix64::new(seed);
    let params = sample_params(&mut rng, 8);
    let mut worst_adjoint = 0.0f64;
    let mut worst_sym = 0.0f64;
    let mut worst_residual = 0.0f64;
    for (a, k) in &params {
        let corr = Correspondence::new(*a, *k).expect("sampled away from a = ±1");
        let mut checked = 0;
        while checked < 300 {
            let z = rng.sphere_point();
            let Ok(img) = corr.forward(z) else { continue };
            if img.points.iter().any(|p| p.is_nan()) {
                continue;
            }
            for w in img.points {
                worst_residual = worst_residual.max(corr.residual(z, w));
                if let Ok(back) = corr.backward(w) {
                    let d = back
                        .points
                        .iter()
                        .map(|p| p.chordal(&z))
                        .fold(f64::INFINITY, f64::min);
                    worst_adjoint = worst_adjoint.max(d);
                }
            }
            if let Ok(back) = corr.backward(-z) {
                let mirrored = [-back.points[0], -back.points[1]];
                let d = corrdyn_core::sphere::set_distance(&img.points, &mirrored);
                worst_sym = worst_sym.max(d);
            }
            checked += 1;
        }
    }
    let mut out = vec![
        prop("adjointness w∈f(z) ⟺ z∈f⁻¹(w)", worst_adjoint < 1e-8, worst_adjoint),
        prop("symmetry f(z) = −f⁻¹(−z)", worst_sym < 1e-8, worst_sym),
        prop("defining-equation residual", worst_residual < 1e-9, worst_residual),
    ];
    // fixed-point count matches the polynomial degree
    let mut count_ok = true;
    for (a, k) in &params {
        let corr = Correspondence::new(*a, *k).unwrap();
        let degree = corr.fixed_point_degree().unwrap_or(0);
        let n = corr.fixed_points().map(|f| f.len()).unwrap_or(0);
        count_ok &= degree == n;
    }
    out.push(prop("fixed points match degree of p(z,z)", count_ok, 0.0));
    // critical points produce coincident pairs
    let mut worst_crit = 0.0f64;
    for (a, k) in &params {
        let corr = Correspondence::new(*a, *k).unwrap();
        for z in corr.critical_points_forward() {
            if let Ok(img) = corr.forward(z) {
                worst_crit = worst_crit.max(img.points[0].chordal(&img.points[1]));
            }
        }
    }
    out.push(prop("critical images coincide", worst_crit < 1e-6, worst_crit));
    out
}

fn sturmian_suite() -> Vec<PropertyReport> {
    let mut unique = true;
    let mut reversal = true;
    let mut confined = true;
    let mut pairing = true;
    for q in 1..=10i64 {
        for p in 0..q {
            if q > 1 && gcd(p, q) != 1 {
                continue;
            }
            let r = RotationNumber::new(p, q).unwrap();
            // brute force: exactly one doubling orbit passes
            let target = sturmian_orbit_angles(r);
            let mut found = Vec::new();
            for mask in 0..(1u32 << q) {
                let bits: Vec<bool> = (0..q).map(|i| mask >> i & 1 == 1).collect();
                let w = BinaryWord::from_bits(&bits).unwrap();
                if is_sturmian(&w) && rotation_number(&w).unwrap() == r {
                    let angles = sturmian_orbit_angles_of(&w);
                    if !found.contains(&angles) {
                        found.push(angles);
                    }
                }
            }
            unique &= found.len() == 1 && found[0] == target;
            let (m, big_m) = min_max_words(r);
            reversal &= big_m.reversed() == m;
            confined &= max_gap_exceeds_half(&target);
            let w = mechanical_word(r);
            for rot in 0..q as usize {
                let u = w.rotate_left(rot);
                let lhs = corrdyn_core::sturmian::pair_landing(&u.rotate_left(1)).unwrap();
                let rhs = corrdyn_core::sturmian::pair_landing(&u).unwrap().rotate_right(1);
                pairing &= lhs == rhs;
            }
        }
    }
    vec![
        prop("unique Sturmian orbit per p/q (q ≤ 10)", unique, 0.0),
        prop("min word is reverse of max word", reversal, 0.0),
        prop("orbit confined to an arc < 1/2", confined, 0.0),
        prop("landing pairs commute with shifts", pairing, 0.0),
    ]
}

fn sturmian_orbit_angles_of(w: &BinaryWord) -> Vec<corrdyn_core::sturmian::CircleAngle> {
    let mut angles: Vec<_> = (0..w.len()).map(|i| w.rotate_left(i).angle()).collect();
    angles.sort();
    angles.dedup();
    angles
}

fn max_gap_exceeds_half(angles: &[corrdyn_core::sturmian::CircleAngle]) -> bool {
    let n = angles.len();
    if n == 1 {
        return true;
    }
    let vals: Vec<f64> = angles.iter().map(|a| a.to_f64()).collect();
    (0..n).any(|i| {
        let next = vals[(i + 1) % n] + if i + 1 == n { 1.0 } else { 0.0 };
        next - vals[i] > 0.5
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn kleinian_modular_suite() -> Vec<PropertyReport> {
    let rep = modular_representation();
    let relations = rep.check_relations().is_ok();
    let sr = rep.sigma * rep.rho;
    let d1 = sr.projective_distance(&MobiusMap::from_reals(1.0, 1.0, 0.0, 1.0));
    let sr_inv = rep.sigma * rep.rho.inverse();
    let d2 = sr_inv.projective_distance(&MobiusMap::from_reals(1.0, 0.0, 1.0, 1.0));
    let t_sr = (trace_word_sq(&rep, &GroupWord::parse("sr").unwrap()) - Complex64::new(4.0, 0.0))
        .norm();
    let t_r =
        (trace_word_sq(&rep, &GroupWord::parse("r").unwrap()) - Complex64::new(1.0, 0.0)).norm();
    let rho3 = evaluate_word(&rep, &GroupWord::parse("rrr").unwrap());
    vec![
        prop("group relations σ²=ρ³=χ²=1, χσ=σχ, χρχ=ρ⁻¹", relations, 0.0),
        prop("σρ = z+1 projectively", d1 < 1e-9, d1),
        prop("σρ⁻¹ = z/(z+1) projectively", d2 < 1e-9, d2),
        prop("trace²(σρ) = 4", t_sr < 1e-9, t_sr),
        prop("trace²(ρ) = 1", t_r < 1e-9, t_r),
        prop("ρ³ reduces to the empty word", rho3.is_identity(1e-12), 0.0),
    ]
}

fn involution_suite(seed: u64) -> Vec<PropertyReport> {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut all_passed = true;
    for (i, (a, k)) in sample_params(&mut rng, 10).into_iter().enumerate() {
        let corr = Correspondence::new(a, k).unwrap();
        match compatible_involution_check(&corr, 200, 1e-8, seed ^ i as u64) {
            Ok(report) => {
                worst = worst.max(report.worst_violation);
                all_passed &= report.passed;
            }
            Err(_) => all_passed = false,
        }
    }
    // covering-correspondence factorization as root multisets
    let mut worst_factor = 0.0f64;
    for _ in 0..200 {
        let z = rng.sphere_point();
        let Some(zc) = z.to_complex() else { continue };
        let full = covering_correspondence(z);
        for w in full {
            if let Some(wc) = w.to_complex() {
                let residual = (q_cubic(wc) - q_cubic(zc)).norm()
                    / (1.0 + q_cubic(zc).norm() + wc.norm_sqr() * wc.norm());
                worst_factor = worst_factor.max(residual);
            }
        }
        let (reduced, _) = covering_correspondence_reduced(z);
        let mut with_z = vec![z];
        with_z.extend(reduced);
        let ok = corrdyn_core::sphere::multiset_close(&with_z, &full, 1e-9);
        all_passed &= ok;
    }
    // identity branch multiplier is exactly 1
    let ident_mult = (covering_multiplier(Complex64::new(0.3, 0.7), Complex64::new(0.3, 0.7))
        - Complex64::ONE)
        .norm();
    vec![
        prop("(J∘f) ∪ id is an equivalence relation", all_passed, worst),
        prop(
            "Q(w)−Q(z) = (w−z)(w²+wz+z²−3) as root multisets",
            worst_factor < 1e-9,
            worst_factor,
        ),
        prop("identity branch multiplier = 1", ident_mult < 1e-15, ident_mult),
    ]
}

fn pinch_suite() -> Vec<PropertyReport> {
    let model = match default_model(1.0, 2.0) {
        Ok(m) => m,
        Err(_) => {
            return vec![prop("default model constructs", false, 0.0)];
        }
    };
    let mut sup: f64 = 0.0;
    let mut identity_ok = true;
    let mut bounded = true;
    for i in 0..100 {
        let t = 0.999 * i as f64 / 99.0;
        for j in 0..100 {
            let y = 2.0 * j as f64 / 99.0;
            let mu = beltrami_coefficient(&model, t, Complex64::new(0.0, y))
                .unwrap()
                .norm();
            bounded &= mu < 1.0;
            sup = sup.max(mu);
            if y <= 1.0 {
                identity_ok &= mu == 0.0;
                let z = Complex64::new(0.3, y);
                identity_ok &= strip_map(&model, t, z).unwrap() == z;
            }
        }
    }
    let corner = beltrami_coefficient(&model, 0.9999, Complex64::new(0.0, 2.0))
        .unwrap()
        .norm();
    vec![
        prop("identity on the sub-strip y ≤ L_y", identity_ok, 0.0),
        prop("Beltrami modulus < 1 on the grid", bounded, sup),
        prop("modulus > 0.99 into the corner", corner > 0.99, corner),
    ]
}

/// Print one line per property; returns overall pass.
pub fn print_report(report: &SuiteReport) -> bool {
    for p in &report.properties {
        let status = if p.passed { "ok  " } else { "FAIL" };
        println!("{status}  {}  (margin {:.3e})", p.name, p.margin);
    }
    println!(
        "suite {}: {}",
        report.suite,
        if report.passed { "passed" } else { "FAILED" }
    );
    report.passed
}
