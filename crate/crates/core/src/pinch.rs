//! The model strip deformation: P̃_t(x + iy) = x + i·v_t(y) on the strip
//! 0 ≤ y ≤ L_r, together with its Beltrami coefficient
//! (1 − ∂v/∂y)/(1 + ∂v/∂y).
//!
//! This is deliberately a model-space demonstration: the conformal collar
//! charts and the spreading of the deformation over a grand orbit are not
//! implemented — only the explicit strip formulas, with their limiting
//! behavior as testable properties.
//!
//! The default profile stretches a final shape v₁ behind a moving front:
//!
//!   v₁(y) = y                       for y ≤ L_y,
//!   v₁(y) = y + (L_r−L_y)·ψ(φ(y))   for y > L_y,  ψ(s) = s³/(1−s),
//!
//! and at time t the map is v₁ frozen below the front y_f(t) and linear with
//! slope v₁′(y_f) above it, where y_f solves
//!
//!   v₁(y_f) + v₁′(y_f)·(L_r − y_f) = τ(t) = L_r/(1−t).
//!
//! With this choice v_0 = id, v_t(L_r) = τ(t) exactly, the freezing property
//! holds with equality (frozen points never move again), and the Beltrami
//! modulus approaches 1 only at the corner (t, y) → (1, L_r).

use crate::error::{Error, Result};
use num_complex::Complex64;

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;
type StripFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A strip deformation model: heights 0 < L_y < L_r, a reparameterized top
/// height τ: [0,1) → [L_r, ∞), and the vertical map v_t(y).
pub struct StripModel {
    pub l_y: f64,
    pub l_r: f64,
    tau: Box<RealFn>,
    v: Box<StripFn>,
    dv_dy: Option<Box<StripFn>>,
    freeze: Option<Box<RealFn>>,
}

impl std::fmt::Debug for StripModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StripModel")
            .field("l_y", &self.l_y)
            .field("l_r", &self.l_r)
            .field("analytic_derivative", &self.dv_dy.is_some())
            .finish()
    }
}

impl StripModel {
    /// A user-supplied model; ∂v/∂y falls back to central differences.
    /// The constructor sweeps the admissibility invariants on a sample grid.
    pub fn new(
        l_y: f64,
        l_r: f64,
        tau: Box<RealFn>,
        v: Box<StripFn>,
        dv_dy: Option<Box<StripFn>>,
    ) -> Result<Self> {
        if !(l_y > 0.0 && l_r.is_finite() && l_y < l_r) {
            return Err(Error::BadParameters(format!(
                "need 0 < L_y < L_r, got L_y = {l_y}, L_r = {l_r}"
            )));
        }
        let model = StripModel {
            l_y,
            l_r,
            tau,
            v,
            dv_dy,
            freeze: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn tau(&self, t: f64) -> f64 {
        (self.tau)(t)
    }

    pub fn v(&self, t: f64, y: f64) -> f64 {
        (self.v)(t, y)
    }

    /// ∂v/∂y — analytic for the default model, central difference otherwise.
    pub fn dv_dy(&self, t: f64, y: f64) -> f64 {
        match &self.dv_dy {
            Some(d) => d(t, y),
            None => {
                let h = 1e-6 * self.l_r.max(1.0);
                let lo = (y - h).max(0.0);
                let hi = (y + h).min(self.l_r);
                ((self.v)(t, hi) - (self.v)(t, lo)) / (hi - lo)
            }
        }
    }

    /// The time after which v_s(y) is frozen for all y ≤ l_prime
    /// (closed form for the default model, None for user models).
    pub fn freeze_time(&self, l_prime: f64) -> Option<f64> {
        self.freeze.as_ref().map(|f| f(l_prime))
    }

    fn check_domain(&self, t: f64, y: f64) -> Result<()> {
        if !(0.0..1.0).contains(&t) || !(0.0..=self.l_r).contains(&y) {
            return Err(Error::OutOfStrip { t, y });
        }
        Ok(())
    }

    /// Invariant sweep on a sample grid: identity sub-strip, strict
    /// monotonicity in y (injectivity of (t,y) ↦ (t, v_t(y))), top boundary
    /// v_t(L_r) = τ(t), τ increasing from τ(0) = L_r, and the freezing
    /// property at L' = (L_y + L_r)/2.
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        let ts: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        // τ(0) = L_r, τ increasing
        if (self.tau(0.0) - self.l_r).abs() > 1e-9 * self.l_r {
            return fail(format!("tau(0) = {} but L_r = {}", self.tau(0.0), self.l_r));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &ts {
            let tau = self.tau(t);
            if tau < prev {
                return fail(format!("tau not increasing at t = {t}"));
            }
            prev = tau;
        }
        for &t in &ts {
            // identity on 0 ≤ y ≤ L_y
            for i in 0..=10 {
                let y = self.l_y * i as f64 / 10.0;
                let v = self.v(t, y);
                if (v - y).abs() > 1e-9 * self.l_r {
                    return fail(format!("v_t not the identity at t = {t}, y = {y}: {v}"));
                }
            }
            // strict monotonicity up to L_r and the top boundary value
            let mut last = -1.0;
            for i in 0..=200 {
                let y = self.l_r * i as f64 / 200.0;
                let v = self.v(t, y);
                if v <= last {
                    return fail(format!("v_t not strictly increasing at t = {t}, y = {y}"));
                }
                last = v;
            }
            let top = self.v(t, self.l_r);
            if (top - self.tau(t)).abs() > 1e-6 * self.tau(t) {
                return fail(format!(
                    "v_t(L_r) = {top} but tau(t) = {} at t = {t}",
                    self.tau(t)
                ));
            }
        }
        // freezing at the midpoint
        let l_prime = 0.5 * (self.l_y + self.l_r);
        if let Some(t_star) = self.freeze_time(l_prime) {
            if !(0.0..1.0).contains(&t_star) {
                return fail(format!("freeze time {t_star} outside [0, 1)"));
            }
            for i in 0..=10 {
                let s = t_star + (1.0 - 1e-6 - t_star) * i as f64 / 10.0;
                for j in 0..=10 {
                    let y = l_prime * j as f64 / 10.0;
                    let d = (self.v(s, y) - self.v(t_star, y)).abs();
                    if d > 1e-9 * self.l_r {
                        return fail(format!(
                            "freezing violated at s = {s}, y = {y}: moved by {d}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// P̃_t(x + iy) = x + i·v_t(y). Commutes with horizontal translation exactly
/// (the formula never touches x).
pub fn strip_map(model: &StripModel, t: f64, z: Complex64) -> Result<Complex64> {
    model.check_domain(t, z.im)?;
    Ok(Complex64::new(z.re, model.v(t, z.im)))
}

/// The Beltrami coefficient of P̃_t, (1 − ∂v/∂y)/(1 + ∂v/∂y).
/// Real-valued for these vertical stretches; 0 on the identity sub-strip.
pub fn beltrami_coefficient(model: &StripModel, t: f64, z: Complex64) -> Result<Complex64> {
    model.check_domain(t, z.im)?;
    let dv = model.dv_dy(t, z.im);
    Ok(Complex64::new((1.0 - dv) / (1.0 + dv), 0.0))
}

/// The default admissible model with τ(t) = L_r/(1−t).
pub fn default_model(l_y: f64, l_r: f64) -> Result<StripModel> {
    if !(l_y > 0.0 && l_r.is_finite() && l_y < l_r) {
        return Err(Error::BadParameters(format!(
            "need 0 < L_y < L_r, got L_y = {l_y}, L_r = {l_r}"
        )));
    }
    let profile = DefaultProfile { l_y, l_r };
    let tau = move |t: f64| l_r / (1.0 - t);
    let v = {
        let p = profile;
        move |t: f64, y: f64| {
            let yf = p.front(l_r / (1.0 - t));
            if y <= yf {
                p.v1(y)
            } else {
                p.v1(yf) + p.dv1(yf) * (y - yf)
            }
        }
    };
    let dv = {
        let p = profile;
        move |t: f64, y: f64| {
            let yf = p.front(l_r / (1.0 - t));
            if y <= yf {
                p.dv1(y)
            } else {
                p.dv1(yf)
            }
        }
    };
    let freeze = {
        let p = profile;
        // y_f(t) ≥ L' ⟺ τ(t) ≥ Ψ(L') ⟺ t ≥ 1 − L_r/Ψ(L')
        move |l_prime: f64| 1.0 - l_r / p.tangent_height(l_prime.min(l_r - 1e-12 * l_r))
    };
    let mut model = StripModel::new(l_y, l_r, Box::new(tau), Box::new(v), Some(Box::new(dv)))?;
    model.freeze = Some(Box::new(freeze));
    // rerun the sweep with the freezing check enabled
    model.validate()?;
    Ok(model)
}

/// The default final profile and its tangent-line front solve.
#[derive(Clone, Copy)]
struct DefaultProfile {
    l_y: f64,
    l_r: f64,
}

impl DefaultProfile {
    /// ψ(s) = s³/(1−s) and ψ′(s) = s²(3−2s)/(1−s)².
    fn psi(s: f64) -> f64 {
        s * s * s / (1.0 - s)
    }

    fn dpsi(s: f64) -> f64 {
        s * s * (3.0 - 2.0 * s) / ((1.0 - s) * (1.0 - s))
    }

    /// The final vertical profile v₁ on [0, L_r).
    fn v1(&self, y: f64) -> f64 {
        if y <= self.l_y {
            y
        } else {
            let w = self.l_r - self.l_y;
            y + w * Self::psi((y - self.l_y) / w)
        }
    }

    fn dv1(&self, y: f64) -> f64 {
        if y <= self.l_y {
            1.0
        } else {
            1.0 + Self::dpsi((y - self.l_y) / (self.l_r - self.l_y))
        }
    }

    /// Ψ(y) = v₁(y) + v₁′(y)(L_r − y): the top height reached when the
    /// front sits at y. Strictly increasing from Ψ(L_y) = L_r to ∞.
    fn tangent_height(&self, y: f64) -> f64 {
        self.v1(y) + self.dv1(y) * (self.l_r - y)
    }

    /// Ψ⁻¹(target): the front position with tangent height `target`.
    fn front(&self, target: f64) -> f64 {
        if target <= self.l_r {
            return self.l_y;
        }
        let mut lo = self.l_y;
        let mut hi = self.l_r - f64::EPSILON * self.l_r;
        if self.tangent_height(hi) < target {
            return hi;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.tangent_height(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> StripModel {
        default_model(1.0, 2.0).unwrap()
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(matches!(default_model(2.0, 1.0), Err(Error::BadParameters(_))));
        assert!(matches!(default_model(0.0, 1.0), Err(Error::BadParameters(_))));
    }

    #[test]
    fn identity_on_substrip() {
        let m = model();
        for t in [0.0, 0.3, 0.9, 0.999] {
            for y in [0.0, 0.4, 1.0] {
                let z = Complex64::new(2.7, y);
                assert_eq!(strip_map(&m, t, z).unwrap(), z);
            }
        }
    }

    #[test]
    fn commutes_with_horizontal_translation_exactly() {
        let m = model();
        for t in [0.1, 0.7] {
            for s in [-3.5f64, 0.25, 10.0] {
                let z = Complex64::new(0.4, 1.7);
                let lhs = strip_map(&m, t, z + Complex64::new(s, 0.0)).unwrap();
                let rhs = strip_map(&m, t, z).unwrap() + Complex64::new(s, 0.0);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn no_initial_stretching() {
        let m = model();
        assert!((m.tau(0.0) - m.l_r).abs() < 1e-15);
        let top = strip_map(&m, 0.0, Complex64::new(0.0, m.l_r)).unwrap();
        assert!((top.im - m.l_r).abs() < 1e-12);
        // in fact v_0 = id on the whole strip for the default profile
        for i in 0..=20 {
            let y = m.l_r * i as f64 / 20.0;
            assert!((m.v(0.0, y) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_strip_rejected() {
        let m = model();
        assert!(matches!(
            strip_map(&m, 1.0, Complex64::new(0.0, 0.5)),
            Err(Error::OutOfStrip { .. })
        ));
        assert!(matches!(
            strip_map(&m, 0.5, Complex64::new(0.0, 2.5)),
            Err(Error::OutOfStrip { .. })
        ));
        assert!(matches!(
            beltrami_coefficient(&m, 0.5, Complex64::new(0.0, -0.1)),
            Err(Error::OutOfStrip { .. })
        ));
    }

    #[test]
    fn beltrami_zero_on_substrip() {
        let m = model();
        for t in [0.0, 0.5, 0.99] {
            for y in [0.0, 0.5, 1.0] {
                let mu = beltrami_coefficient(&m, t, Complex64::new(0.0, y)).unwrap();
                assert_eq!(mu, Complex64::ZERO);
            }
        }
    }

    #[test]
    fn beltrami_moduli_bounded_on_grid() {
        let m = model();
        let mut sup: f64 = 0.0;
        for i in 0..100 {
            let t = 0.999 * i as f64 / 99.0;
            for j in 0..100 {
                let y = m.l_r * j as f64 / 99.0;
                let mu = beltrami_coefficient(&m, t, Complex64::new(0.0, y)).unwrap();
                assert!(mu.norm() < 1.0, "large modulus at t = {t}, y = {y}");
                sup = sup.max(mu.norm());
            }
        }
        assert!(sup > 0.5, "deformation too tame on the grid: sup = {sup}");
    }

    #[test]
    fn beltrami_sup_increases_with_time_horizon() {
        let m = model();
        let sup_at = |t_max: f64| {
            let mut sup: f64 = 0.0;
            for i in 0..=40 {
                let t = t_max * i as f64 / 40.0;
                for j in 0..=40 {
                    let y = m.l_r * j as f64 / 40.0;
                    let mu = beltrami_coefficient(&m, t, Complex64::new(0.0, y)).unwrap();
                    sup = sup.max(mu.norm());
                }
            }
            sup
        };
        let mut prev = -1.0;
        for t_max in [0.2, 0.5, 0.8, 0.95, 0.99] {
            let s = sup_at(t_max);
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn beltrami_tends_to_one_at_the_corner() {
        let m = model();
        // along the sampled path (t, L_r) → (1, L_r)
        let mut last = 0.0;
        for t in [0.9, 0.99, 0.999, 0.9999] {
            let mu = beltrami_coefficient(&m, t, Complex64::new(0.0, m.l_r)).unwrap();
            last = mu.norm();
        }
        assert!(last > 0.99, "corner modulus only reached {last}");
    }

    #[test]
    fn freezing_exact_beyond_freeze_time() {
        let m = model();
        let l_prime = 0.5 * (m.l_y + m.l_r);
        let t_star = m.freeze_time(l_prime).unwrap();
        assert!((0.0..1.0).contains(&t_star));
        for i in 1..=8 {
            let s = t_star + (0.9999 - t_star) * i as f64 / 8.0;
            for j in 0..=8 {
                let y = l_prime * j as f64 / 8.0;
                let d = (m.v(s, y) - m.v(t_star, y)).abs();
                assert!(d < 1e-11, "froze point moved by {d} at s = {s}, y = {y}");
            }
        }
    }

    #[test]
    fn user_model_with_fd_derivative() {
        // A plain admissible choice: linear stretch above L_y with
        // τ(t) = L_r + t/(1−t) (no freezing claim for user models).
        let (l_y, l_r) = (1.0, 2.0);
        let tau = move |t: f64| l_r + t / (1.0 - t);
        let v = move |t: f64, y: f64| {
            if y <= l_y {
                y
            } else {
                let extra = (tau)(t) - l_r;
                y + extra * (y - l_y) / (l_r - l_y)
            }
        };
        let m = StripModel::new(l_y, l_r, Box::new(tau), Box::new(v), None).unwrap();
        let mu = beltrami_coefficient(&m, 0.5, Complex64::new(0.0, 1.5)).unwrap();
        // slope above the substrip at t = 0.5: 1 + 1 = 2 ⇒ μ = −1/3
        assert!((mu.re + 1.0 / 3.0).abs() < 1e-5);
        assert!(m.freeze_time(1.5).is_none());
    }
}
