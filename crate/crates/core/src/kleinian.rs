//! Representations of C₂*C₃ in PSL₂(ℂ): construction from the cross-ratio
//! parameter, the canonical involution χ, the modular representation, group
//! words, parabolic-parameter solving for boundary (circle-packing)
//! representations, and limit-set sampling.
//!
//! Normalization: the fixed points of ρ are pinned at 0 and ∞ (ρ is the
//! anticlockwise rotation by 2π/3), and the fixed points of σ sit at
//! {param, 1}, so the cross-ratio (Q, Q'; P, P') equals param. χ(z) = param/z
//! is then the unique involution exchanging both fixed-point pairs.

use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::rng::SplitMix64;
use crate::sphere::ExtendedComplex;
use crate::sturmian::{mechanical_word, RotationNumber};
use num_complex::Complex64;

/// Relation tolerance for constructed representations.
const RELATION_TOL: f64 = 1e-9;

/// A representation of C₂*C₃ together with its canonical involution.
#[derive(Debug, Clone)]
pub struct Representation {
    pub sigma: MobiusMap,
    pub rho: MobiusMap,
    pub chi: MobiusMap,
    /// Cross-ratio between the fixed points of σ and those of ρ.
    pub param: Complex64,
}

impl Representation {
    /// σ² = ρ³ = χ² = 1, χσ = σχ, χρχ⁻¹ = ρ⁻¹ (projectively, tolerance 1e-9).
    pub fn check_relations(&self) -> Result<()> {
        let id = MobiusMap::identity();
        let checks: [(&str, MobiusMap); 5] = [
            ("sigma^2", self.sigma * self.sigma),
            ("rho^3", self.rho * self.rho * self.rho),
            ("chi^2", self.chi * self.chi),
            (
                "chi sigma chi^-1 sigma^-1",
                self.chi * self.sigma * self.chi.inverse() * self.sigma.inverse(),
            ),
            (
                "chi rho chi^-1 rho",
                self.chi * self.rho * self.chi.inverse() * self.rho,
            ),
        ];
        for (name, m) in checks {
            if !m.projectively_eq(&id, RELATION_TOL) {
                return Err(Error::InvariantViolation(format!(
                    "representation relation {name} fails: {m}"
                )));
            }
        }
        Ok(())
    }

    /// The whole representation conjugated by m.
    pub fn conjugate(&self, m: &MobiusMap) -> Representation {
        let minv = m.inverse();
        Representation {
            sigma: *m * self.sigma * minv,
            rho: *m * self.rho * minv,
            chi: *m * self.chi * minv,
            param: self.param,
        }
    }

    /// The two cross-ratio candidates recovered from the fixed points of σ
    /// and ρ. The labels Q and Q' are interchangeable, so only the pair
    /// {c, 1/c} is intrinsic; this crate's normal form pins Q' at 1, which
    /// singles out the stored `param`.
    pub fn cross_ratio_candidates(&self) -> Result<(Complex64, Complex64)> {
        let sfix = self.sigma.fixed_points()?;
        let rfix = self.rho.fixed_points()?;
        let cr = cross_ratio(sfix[0], sfix[1], rfix[0], rfix[1])?;
        Ok((cr, 1.0 / cr))
    }
}

/// Cross-ratio ((z1−z3)(z2−z4)) / ((z1−z4)(z2−z3)) on the sphere.
fn cross_ratio(
    z1: ExtendedComplex,
    z2: ExtendedComplex,
    z3: ExtendedComplex,
    z4: ExtendedComplex,
) -> Result<Complex64> {
    // Send z3 → 0 and z4 → ∞, then read off image(z1)/image(z2).
    let m = match (z3, z4) {
        (ExtendedComplex::Finite(p), ExtendedComplex::Finite(q)) => {
            MobiusMap::new(Complex64::ONE, -p, Complex64::ONE, -q)
        }
        (ExtendedComplex::Finite(p), ExtendedComplex::Infinity) => MobiusMap::translation(-p),
        (ExtendedComplex::Infinity, ExtendedComplex::Finite(q)) => {
            MobiusMap::new(Complex64::ZERO, Complex64::ONE, Complex64::ONE, -q)
        }
        (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => {
            return Err(Error::DegenerateCrossRatio(Complex64::ZERO))
        }
    };
    match (m.apply(z1), m.apply(z2)) {
        (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) if b.norm() > 0.0 => Ok(a / b),
        _ => Err(Error::DegenerateCrossRatio(Complex64::ZERO)),
    }
}

/// ω = e^{2πi/3}.
pub(crate) fn omega() -> Complex64 {
    Complex64::new(-0.5, 0.75f64.sqrt())
}

/// Builds the representation with cross-ratio parameter `param`.
///
/// ρ rotates anticlockwise by 2π/3 about P = 0 (P' = ∞), σ is the elliptic of
/// order 2 fixing {param, 1}, and χ(z) = param/z exchanges P ↔ P', Q ↔ Q'.
pub fn build_representation(param: Complex64) -> Result<Representation> {
    let degenerate = !param.is_finite()
        || param.norm() < 1e-12
        || (param - Complex64::ONE).norm() < 1e-12
        || param.norm() > 1e12;
    if degenerate {
        return Err(Error::DegenerateCrossRatio(param));
    }
    let rep = Representation {
        sigma: MobiusMap::involution_fixing(param, Complex64::ONE),
        rho: MobiusMap::scaling(omega()),
        chi: MobiusMap::new(Complex64::ZERO, param, Complex64::ONE, Complex64::ZERO),
        param,
    };
    rep.check_relations()?;
    Ok(rep)
}

/// The modular group PSL₂(ℤ) as a representation of C₂*C₃:
/// σ(z) = −1/z, ρ(z) = −1/(z+1), χ(z) = 1/z, so that σρ(z) = z+1 and
/// σρ⁻¹(z) = z/(z+1). Its cross-ratio parameter is 7 − 4√3.
pub fn modular_representation() -> Representation {
    Representation {
        sigma: MobiusMap::from_reals(0.0, -1.0, 1.0, 0.0),
        rho: MobiusMap::from_reals(0.0, -1.0, 1.0, 1.0),
        chi: MobiusMap::from_reals(0.0, 1.0, 1.0, 0.0),
        param: Complex64::new(7.0 - 4.0 * 3.0f64.sqrt(), 0.0),
    }
}

/// Letters of words in ⟨σ⟩*⟨ρ⟩ extended by χ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Sigma,
    Rho,
    RhoInv,
    Chi,
}

impl Letter {
    fn symbol(&self) -> char {
        match self {
            Letter::Sigma => 's',
            Letter::Rho => 'r',
            Letter::RhoInv => 'R',
            Letter::Chi => 'x',
        }
    }
}

/// A word in the generators, kept reduced: free-product normal form over
/// {σ, ρ, ρ⁻¹} (σσ and ρρ⁻¹ collapse, ρρ → ρ⁻¹) with χ pushed to the right
/// end through χσ = σχ and χρ = ρ⁻¹χ.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupWord {
    core: Vec<Letter>,
    chi: bool,
}

impl GroupWord {
    pub fn new() -> Self {
        GroupWord::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = GroupWord::new();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Parses "srsR" (s = σ, r = ρ, R = ρ⁻¹, x = χ).
    pub fn parse(s: &str) -> Result<Self> {
        let mut w = GroupWord::new();
        for ch in s.chars() {
            w.push(match ch {
                's' => Letter::Sigma,
                'r' => Letter::Rho,
                'R' => Letter::RhoInv,
                'x' => Letter::Chi,
                other => {
                    return Err(Error::BadParameters(format!("bad word letter {other:?}")))
                }
            });
        }
        Ok(w)
    }

    /// Appends a letter on the right and renormalizes.
    pub fn push(&mut self, letter: Letter) {
        let effective = match (letter, self.chi) {
            (Letter::Chi, _) => {
                self.chi = !self.chi;
                return;
            }
            (Letter::Rho, true) => Letter::RhoInv,
            (Letter::RhoInv, true) => Letter::Rho,
            (l, _) => l,
        };
        match (self.core.last().copied(), effective) {
            (Some(Letter::Sigma), Letter::Sigma) => {
                self.core.pop();
            }
            (Some(Letter::Rho), Letter::RhoInv) | (Some(Letter::RhoInv), Letter::Rho) => {
                self.core.pop();
            }
            (Some(Letter::Rho), Letter::Rho) => {
                self.core.pop();
                self.core.push(Letter::RhoInv);
            }
            (Some(Letter::RhoInv), Letter::RhoInv) => {
                self.core.pop();
                self.core.push(Letter::Rho);
            }
            (_, l) => self.core.push(l),
        }
    }

    /// The reduced letters, χ (if present) last.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = self.core.clone();
        if self.chi {
            out.push(Letter::Chi);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.core.len() + usize::from(self.chi)
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty() && !self.chi
    }
}

impl std::fmt::Display for GroupWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        for l in self.letters() {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

/// The product of the generator matrices in written order:
/// w = l₁l₂… acts as l₁ ∘ l₂ ∘ ….
pub fn evaluate_word(rep: &Representation, word: &GroupWord) -> MobiusMap {
    let mut m = MobiusMap::identity();
    for l in word.letters() {
        let g = match l {
            Letter::Sigma => rep.sigma,
            Letter::Rho => rep.rho,
            Letter::RhoInv => rep.rho.inverse(),
            Letter::Chi => rep.chi,
        };
        m = m * g;
    }
    m
}

/// trace² of the word's image with det scaled to 1, so parabolic or identity
/// ⟺ value 4. (The sign of the trace itself is not projectively defined.)
pub fn trace_word_sq(rep: &Representation, word: &GroupWord) -> Complex64 {
    evaluate_word(rep, word).trace_sq()
}

/// The group word of one period of the Sturmian p/q word under the branch
/// labeling 0 ↦ σρ, 1 ↦ σρ⁻¹ — the length-2q word whose parabolicity pins
/// the boundary representation candidate r_{p/2q}. (The labeling is inferred
/// from the branch action in the landing-point argument.)
pub fn sturmian_word_to_group_word(r: RotationNumber) -> GroupWord {
    let w = mechanical_word(r);
    let mut out = GroupWord::new();
    for i in 0..w.len() {
        out.push(Letter::Sigma);
        out.push(if w.bit(i) { Letter::RhoInv } else { Letter::Rho });
    }
    out
}

/// Options for the complex Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub residual_target: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 64,
            residual_target: 1e-10,
        }
    }
}

/// Complex Newton iteration on the cross-ratio parameter solving
/// trace²(word) = 4: a candidate boundary (circle-packing) representation.
///
/// The derivative is a central difference (h = 1e−6 relative) and steps are
/// damped by backtracking; no analytic derivative is taken through the
/// construction.
pub fn parabolic_parameter_solve(
    word: &GroupWord,
    initial: Complex64,
    opts: SolveOptions,
) -> Result<Complex64> {
    let residual = |p: Complex64| -> Complex64 {
        match build_representation(p) {
            Ok(rep) => trace_word_sq(&rep, word) - Complex64::new(4.0, 0.0),
            Err(_) => Complex64::new(f64::MAX, 0.0),
        }
    };
    let mut p = initial;
    let mut g = residual(p);
    for _ in 0..opts.max_iterations {
        if g.norm() < opts.residual_target {
            return Ok(p);
        }
        let h = 1e-6 * (1.0 + p.norm());
        let hc = Complex64::new(h, 0.0);
        let dg = (residual(p + hc) - residual(p - hc)) / (2.0 * hc);
        if !dg.is_finite() || dg.norm() == 0.0 {
            break;
        }
        let step = g / dg;
        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..8 {
            let cand = p - step * damping;
            let gc = residual(cand);
            if gc.norm() < g.norm() {
                p = cand;
                g = gc;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if g.norm() < opts.residual_target {
        Ok(p)
    } else {
        Err(Error::NoConvergence {
            iterations: opts.max_iterations,
            residual: g.norm(),
        })
    }
}

/// Deterministic limit-set sampler: a non-backtracking random walk in the
/// generators applied to a fixed point of σρ. Whenever σρ is not elliptic
/// that base point lies in Λ(G) exactly, so every emitted orbit point stays
/// in Λ(G) up to rounding.
///
/// Each stream of `max_word_length` steps is seeded by (seed, stream index);
/// asking for more points opens further streams. For n_points ≤
/// max_word_length the emitted points do not depend on max_word_length at
/// all, which is the prefix-stability contract.
pub fn limit_set_sample(
    rep: &Representation,
    n_points: usize,
    max_word_length: usize,
    seed: u64,
) -> Result<Vec<ExtendedComplex>> {
    if max_word_length == 0 {
        return Err(Error::BadParameters("max_word_length must be ≥ 1".into()));
    }
    let base = attracting_fixed_point(&(rep.sigma * rep.rho))?;
    let rho_inv = rep.rho.inverse();
    let mut out = Vec::with_capacity(n_points);
    let mut stream = 0u64;
    while out.len() < n_points {
        let mut rng = SplitMix64::fork(seed, stream);
        let mut x = base;
        let mut last: Option<Letter> = None;
        for _ in 0..max_word_length {
            let letter = match last {
                Some(Letter::Sigma) => {
                    if rng.next_bool() {
                        Letter::Rho
                    } else {
                        Letter::RhoInv
                    }
                }
                Some(_) => Letter::Sigma,
                None => match rng.next_below(3) {
                    0 => Letter::Sigma,
                    1 => Letter::Rho,
                    _ => Letter::RhoInv,
                },
            };
            let g = match letter {
                Letter::Sigma => &rep.sigma,
                Letter::Rho => &rep.rho,
                Letter::RhoInv => &rho_inv,
                Letter::Chi => unreachable!("the walk never picks χ"),
            };
            x = g.apply(x);
            last = Some(letter);
            if x.is_nan() {
                break;
            }
            out.push(x);
            if out.len() == n_points {
                break;
            }
        }
        stream += 1;
        if stream > 4 * (n_points / max_word_length + 2) as u64 {
            return Err(Error::SamplingDegenerate);
        }
    }
    Ok(out)
}

/// The fixed point of m with |multiplier| ≤ 1 (either one for elliptics).
pub fn attracting_fixed_point(m: &MobiusMap) -> Result<ExtendedComplex> {
    let fps = m.fixed_points()?;
    let mult = |z: &ExtendedComplex| -> f64 {
        match z.to_complex() {
            Some(z) => m.derivative(z).norm(),
            // in the chart ζ = 1/z the multiplier at ∞ is det/a²
            None => (m.det() / (m.a * m.a)).norm(),
        }
    };
    Ok(if mult(&fps[0]) <= mult(&fps[1]) {
        fps[0]
    } else {
        fps[1]
    })
}

/// Jørgensen-inequality check on the generating pair (σρ, ρ):
/// |tr²(σρ) − 4| + |tr[σρ, ρ] − 2| ≥ 1 is necessary for a discrete
/// non-elementary group. Heuristic only — a pass is NOT a discreteness
/// certificate.
#[derive(Debug, Clone, Copy)]
pub struct JorgensenReport {
    pub value: f64,
    pub passes: bool,
}

pub fn jorgensen_heuristic(rep: &Representation) -> JorgensenReport {
    let a = rep.sigma * rep.rho;
    let b = rep.rho;
    let comm = a * b * a.inverse() * b.inverse();
    // the commutator trace is scalar-invariant once normalized by det
    let tr_comm = (comm.a + comm.d) / comm.det().sqrt();
    let value = (a.trace_sq() - Complex64::new(4.0, 0.0)).norm()
        + (tr_comm - Complex64::new(2.0, 0.0)).norm();
    JorgensenReport {
        value,
        passes: value >= 1.0 - 1e-12,
    }
}

/// Least-squares circle on the Riemann sphere: the plane section n·x = d of
/// the unit sphere fitted to the embedded points, with the worst chordal
/// deviation of the sample from the fitted circle.
#[derive(Debug, Clone, Copy)]
pub struct CircleFit {
    pub normal: [f64; 3],
    pub offset: f64,
    pub max_deviation: f64,
    pub rms_deviation: f64,
}

pub fn fit_circle_on_sphere(points: &[ExtendedComplex]) -> Option<CircleFit> {
    if points.len() < 3 {
        return None;
    }
    let embedded: Vec<[f64; 3]> = points.iter().map(ExtendedComplex::embed).collect();
    let n = embedded.len() as f64;
    let mut mean = [0.0f64; 3];
    for p in &embedded {
        for i in 0..3 {
            mean[i] += p[i] / n;
        }
    }
    let mut cov = [[0.0f64; 3]; 3];
    for p in &embedded {
        let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    let normal = smallest_eigenvector(cov);
    let offset = normal[0] * mean[0] + normal[1] * mean[1] + normal[2] * mean[2];
    let mut max_dev = 0.0f64;
    let mut sum_sq = 0.0f64;
    for p in &embedded {
        let d = point_circle_deviation(*p, normal, offset);
        max_dev = max_dev.max(d);
        sum_sq += d * d;
    }
    Some(CircleFit {
        normal,
        offset,
        max_deviation: max_dev,
        rms_deviation: (sum_sq / n).sqrt(),
    })
}

/// Chordal distance from an embedded sphere point to the circle n·x = d
/// (|n| = 1, |d| ≤ 1).
pub fn point_circle_deviation(p: [f64; 3], n: [f64; 3], d: f64) -> f64 {
    let radius = (1.0 - d * d).max(0.0).sqrt();
    let center = [d * n[0], d * n[1], d * n[2]];
    let pc = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
    let along = pc[0] * n[0] + pc[1] * n[1] + pc[2] * n[2];
    let perp = [
        pc[0] - along * n[0],
        pc[1] - along * n[1],
        pc[2] - along * n[2],
    ];
    let perp_len = (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt();
    if perp_len < 1e-300 {
        // on the circle's axis: every circle point is equidistant
        return (radius * radius + along * along).sqrt();
    }
    let s = radius / perp_len;
    let closest = [
        center[0] + perp[0] * s,
        center[1] + perp[1] * s,
        center[2] + perp[2] * s,
    ];
    ((p[0] - closest[0]).powi(2) + (p[1] - closest[1]).powi(2) + (p[2] - closest[2]).powi(2))
        .sqrt()
}

/// Smallest-eigenvalue eigenvector of a symmetric 3×3 matrix (Jacobi).
fn smallest_eigenvector(mut m: [[f64; 3]; 3]) -> [f64; 3] {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..64 {
        let (mut p, mut q, mut big) = (0usize, 1usize, 0.0f64);
        for i in 0..3 {
            for j in (i + 1)..3 {
                if m[i][j].abs() > big {
                    big = m[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if big < 1e-14 {
            break;
        }
        let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for k in 0..3 {
            let (mkp, mkq) = (m[k][p], m[k][q]);
            m[k][p] = c * mkp - s * mkq;
            m[k][q] = s * mkp + c * mkq;
        }
        for k in 0..3 {
            let (mpk, mqk) = (m[p][k], m[q][k]);
            m[p][k] = c * mpk - s * mqk;
            m[q][k] = s * mpk + c * mqk;
        }
        for k in 0..3 {
            let (vkp, vkq) = (v[k][p], v[k][q]);
            v[k][p] = c * vkp - s * vkq;
            v[k][q] = s * vkp + c * vkq;
        }
    }
    let mut best = 0usize;
    for i in 1..3 {
        if m[i][i] < m[best][best] {
            best = i;
        }
    }
    let col = [v[0][best], v[1][best], v[2][best]];
    let len = (col[0] * col[0] + col[1] * col[1] + col[2] * col[2]).sqrt();
    [col[0] / len, col[1] / len, col[2] / len]
}
