//! Orbit sampling, point classification, and rendering for family-(2)
//! correspondences: the forward chaos game samples the limb Λ₊ (the side
//! where both branches act like the inverse quadratic), the backward game
//! samples Λ₋ = −Λ₊, and the classifier sorts sphere points into Λ₋ / Λ₊ /
//! Ω(escape step) / Undecided.
//!
//! Everything is seeded and deterministic: chains, pixels and scans derive
//! their streams from (seed, index), and parallel results merge in fixed
//! order, so rasters reproduce bit-exactly regardless of worker count.

use crate::corr::{Correspondence, FixedPoint};
use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use crate::raster::{
    Raster, Viewport, CODE_LAMBDA_MINUS, CODE_LAMBDA_PLUS, CODE_MASKED, CODE_OMEGA_BASE,
    CODE_UNDECIDED,
};
use crate::rng::SplitMix64;
use crate::sphere::ExtendedComplex;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

/// Iteration budgets, trap radius and seed for sampling, classification and
/// scanning. The trap radius is chordal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    /// Points per attractor cloud.
    pub budget: usize,
    /// Steps discarded at the start of every chain.
    pub transient: usize,
    /// Chordal trap radius for cloud membership.
    pub trap_radius: f64,
    pub seed: u64,
    /// Independent chaos-game chains per cloud (fixed, so the merge order
    /// does not depend on the worker count).
    pub chains: usize,
    /// Depth of the greedy membership paths in classify.
    pub classify_depth: usize,
    /// Trailing steps that must sit inside the target trap.
    pub persistence: usize,
    /// Depth and width caps of the escape-time branch tree.
    pub escape_depth: usize,
    pub escape_width: usize,
    /// Longest cycle period searched by the closure detector.
    pub cycle_period_max: usize,
    /// |multiplier − 1| window for the parabolic flag.
    pub parabolic_tol: f64,
    /// Points in each per-pixel mini cloud of a parameter scan.
    pub scan_cloud: usize,
    /// Orbit steps per critical point in a parameter scan.
    pub scan_budget: usize,
    pub policy: NumericPolicy,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            budget: 20_000,
            transient: 100,
            trap_radius: 1e-3,
            seed: 1,
            chains: 8,
            classify_depth: 24,
            persistence: 8,
            escape_depth: 48,
            escape_width: 8,
            cycle_period_max: 6,
            parabolic_tol: 1e-6,
            scan_cloud: 300,
            scan_budget: 200,
            policy: NumericPolicy::default(),
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget < self.transient {
            return Err(Error::BadParameters(format!(
                "budget {} below transient cutoff {}",
                self.budget, self.transient
            )));
        }
        if !(self.trap_radius > 0.0) {
            return Err(Error::BadParameters("trap radius must be positive".into()));
        }
        if self.chains == 0 || self.classify_depth == 0 || self.escape_width == 0 {
            return Err(Error::BadParameters("zero-sized budget field".into()));
        }
        Ok(())
    }
}

/// Forward or backward branch evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

fn step(c: &Correspondence, dir: Direction, z: ExtendedComplex) -> Result<[ExtendedComplex; 2]> {
    let img = match dir {
        Direction::Forward => c.forward(z)?,
        Direction::Backward => c.backward(z)?,
    };
    Ok(img.points)
}

/// A point cloud on the sphere with a uniform grid over the R³ embedding for
/// O(1) trap queries at the cell scale.
#[derive(Debug, Clone)]
pub struct SphereCloud {
    points: Vec<ExtendedComplex>,
    embedded: Vec<[f64; 3]>,
    grid: HashMap<(i32, i32, i32), Vec<u32>>,
    /// Decimated subsample for coarse far-field distance comparisons.
    coarse: Vec<[f64; 3]>,
    cell: f64,
}

impl SphereCloud {
    pub fn build(points: Vec<ExtendedComplex>, cell: f64) -> Self {
        let embedded: Vec<[f64; 3]> = points.iter().map(ExtendedComplex::embed).collect();
        let mut grid: HashMap<(i32, i32, i32), Vec<u32>> = HashMap::new();
        for (i, p) in embedded.iter().enumerate() {
            grid.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        let stride = (embedded.len() / 64).max(1);
        let coarse: Vec<[f64; 3]> = embedded.iter().step_by(stride).copied().collect();
        SphereCloud {
            points,
            embedded,
            grid,
            coarse,
            cell,
        }
    }

    fn key(p: &[f64; 3], cell: f64) -> (i32, i32, i32) {
        (
            (p[0] / cell).floor() as i32,
            (p[1] / cell).floor() as i32,
            (p[2] / cell).floor() as i32,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ExtendedComplex] {
        &self.points
    }

    /// Minimum chordal distance from z to the cloud, searched out to
    /// `rings` grid shells; None if nothing lives that close.
    pub fn nearest_within_rings(&self, z: &ExtendedComplex, rings: i32) -> Option<f64> {
        let p = z.embed();
        let (kx, ky, kz) = Self::key(&p, self.cell);
        let mut best: Option<f64> = None;
        for dx in -rings..=rings {
            for dy in -rings..=rings {
                for dz in -rings..=rings {
                    if let Some(ids) = self.grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &i in ids {
                            let q = self.embedded[i as usize];
                            let d = ((p[0] - q[0]).powi(2)
                                + (p[1] - q[1]).powi(2)
                                + (p[2] - q[2]).powi(2))
                            .sqrt();
                            if best.is_none_or(|b| d < b) {
                                best = Some(d);
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// Is z within chordal distance r of the cloud? Exact for r ≤ cell.
    pub fn is_within(&self, z: &ExtendedComplex, r: f64) -> bool {
        debug_assert!(r <= self.cell * (1.0 + 1e-9));
        matches!(self.nearest_within_rings(z, 1), Some(d) if d <= r)
    }

    /// Distance to the cloud: exact near it (within one grid ring), via the
    /// coarse subsample in the far field. Good enough for greedy
    /// branch-selection comparisons at any range.
    pub fn approx_distance(&self, z: &ExtendedComplex) -> f64 {
        if let Some(d) = self.nearest_within_rings(z, 1) {
            return d;
        }
        let p = z.embed();
        self.coarse
            .iter()
            .map(|q| {
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Do all points of `other` sit within r of this cloud?
    pub fn covers(&self, other: &[ExtendedComplex], r: f64) -> bool {
        other.iter().all(|p| self.is_within(p, r))
    }
}

/// An attractor sample: the cloud plus how many orbits had to be restarted.
#[derive(Debug, Clone)]
pub struct AttractorCloud {
    pub cloud: SphereCloud,
    pub resampled: usize,
}

fn chaos_points(
    c: &Correspondence,
    cfg: &RenderConfig,
    dir: Direction,
) -> Result<(Vec<ExtendedComplex>, usize)> {
    cfg.validate()?;
    let salt = match dir {
        Direction::Forward => 0x464f5257u64,
        Direction::Backward => 0x4241434bu64,
    };
    let per_chain = cfg.budget.div_ceil(cfg.chains);
    let chains: Vec<Result<(Vec<ExtendedComplex>, usize)>> = (0..cfg.chains)
        .into_par_iter()
        .map(|chain| {
            let mut rng = SplitMix64::fork(cfg.seed ^ salt, chain as u64);
            let mut out = Vec::with_capacity(per_chain);
            let mut resampled = 0usize;
            let mut x = rng.sphere_point();
            let mut kept = 0usize;
            let mut total = 0usize;
            while kept < per_chain {
                total += 1;
                if total > 50 * (per_chain + cfg.transient) {
                    return Err(Error::SamplingDegenerate);
                }
                let imgs = match step(c, dir, x) {
                    Ok(imgs) => imgs,
                    Err(_) => {
                        resampled += 1;
                        x = rng.sphere_point();
                        continue;
                    }
                };
                let next = imgs[usize::from(rng.next_bool())];
                if next.is_nan() {
                    resampled += 1;
                    x = rng.sphere_point();
                    continue;
                }
                x = next;
                if total > cfg.transient {
                    out.push(x);
                    kept += 1;
                }
            }
            Ok((out, resampled))
        })
        .collect();
    let mut points = Vec::with_capacity(per_chain * cfg.chains);
    let mut resampled = 0usize;
    for chain in chains {
        let (pts, r) = chain?;
        points.extend(pts);
        resampled += r;
    }
    points.truncate(cfg.budget.max(1));
    Ok((points, resampled))
}

/// Greedy orbit chasing a target set; emits every visited point and reports
/// whether it came within `tol` of a target.
fn greedy_orbit_to(
    c: &Correspondence,
    dir: Direction,
    start: ExtendedComplex,
    targets: &[ExtendedComplex],
    max_steps: usize,
    tol: f64,
    mut emit: impl FnMut(ExtendedComplex),
) -> bool {
    let dist = |p: &ExtendedComplex| {
        targets
            .iter()
            .map(|t| t.chordal(p))
            .fold(f64::INFINITY, f64::min)
    };
    let mut x = start;
    for _ in 0..max_steps {
        let Ok(imgs) = step(c, dir, x) else {
            return false;
        };
        let (d0, d1) = (dist(&imgs[0]), dist(&imgs[1]));
        x = if d0 <= d1 { imgs[0] } else { imgs[1] };
        if x.is_nan() {
            return false;
        }
        emit(x);
        if dist(&x) <= tol {
            return true;
        }
    }
    false
}

/// Forward-attracting cycles split into boundary type (they sit on ∂Λ₊,
/// where both branches of the correspondence act like the inverse quadratic)
/// and interior type (the α-type cycles inside Λ₋).
///
/// The discriminator follows the non-fixed forward image of a cycle point:
/// from ∂Λ₊ that sibling stays in Λ₊ and the greedy orbit returns to the
/// cycle; from inside Λ₋ the sibling jumps to Λ₊ and can never come back.
#[derive(Debug, Clone, Default)]
pub struct CyclePartition {
    pub boundary: Vec<Cycle>,
    pub interior: Vec<Cycle>,
}

pub fn attracting_cycle_partition(
    c: &Correspondence,
    cfg: &RenderConfig,
) -> Result<CyclePartition> {
    let mut partition = CyclePartition::default();
    for cycle in find_cycles(c, cfg)? {
        if cycle.multiplier.norm() >= 1.0 - 1e-9 {
            continue;
        }
        let b = cycle.points[0];
        let Ok(img) = c.forward(b) else { continue };
        let sibling = if img.points[0].chordal(&b) >= img.points[1].chordal(&b) {
            img.points[0]
        } else {
            img.points[1]
        };
        let returns = greedy_orbit_to(
            c,
            Direction::Forward,
            sibling,
            &cycle.points,
            80,
            cfg.trap_radius,
            |_| {},
        );
        if returns {
            partition.boundary.push(cycle);
        } else {
            partition.interior.push(cycle);
        }
    }
    Ok(partition)
}

/// Extends a chaos sample with deterministic fills of the thin cusps around
/// boundary-attracting cycles, where harmonic sampling is exponentially
/// sparse: the greedy orbits from the cycle's sibling image and from the
/// nearest sampled point trace the boundary arcs into the cycle.
fn fill_boundary_cusps(
    c: &Correspondence,
    dir: Direction,
    points: &mut Vec<ExtendedComplex>,
    boundary: &[Cycle],
) {
    let mirror = |p: ExtendedComplex| match dir {
        Direction::Forward => p,
        Direction::Backward => -p,
    };
    let original = points.clone();
    for cycle in boundary {
        let targets: Vec<ExtendedComplex> = cycle.points.iter().map(|p| mirror(*p)).collect();
        let dist = |p: &ExtendedComplex| {
            targets
                .iter()
                .map(|t| t.chordal(p))
                .fold(f64::INFINITY, f64::min)
        };
        let b = targets[0];
        // nearest already-sampled point: only the shells inside that gap
        // need filling, so farther excursions of the greedy path are skipped
        let near = original
            .iter()
            .copied()
            .min_by(|x, y| x.chordal(&b).total_cmp(&y.chordal(&b)));
        let gap = near.map_or(0.0, |p| p.chordal(&b));
        let mut starts: Vec<ExtendedComplex> = Vec::new();
        if let Some(p) = near {
            starts.push(p);
        }
        if let Ok(img) = step(c, dir, b) {
            let sibling = if img[0].chordal(&b) >= img[1].chordal(&b) {
                img[0]
            } else {
                img[1]
            };
            starts.push(sibling);
        }
        let mut fills: Vec<ExtendedComplex> = Vec::new();
        for start in starts {
            greedy_orbit_to(c, dir, start, &targets, 400, 1e-13, |p| {
                if dist(&p) <= gap {
                    fills.push(p);
                }
            });
        }
        fills.extend(targets);
        points.extend(fills);
    }
}

fn attractor_with(
    c: &Correspondence,
    cfg: &RenderConfig,
    dir: Direction,
    partition: &CyclePartition,
) -> Result<AttractorCloud> {
    let (mut points, resampled) = chaos_points(c, cfg, dir)?;
    fill_boundary_cusps(c, dir, &mut points, &partition.boundary);

    // Forward-closure repair: the attractor is invariant under both
    // branches, so any image that leaves the trap is itself a point of the
    // attractor that harmonic sampling missed — add those until the emitted
    // cloud is invariant at the trap scale.
    let margin = 0.9 * cfg.trap_radius;
    let mut cloud = SphereCloud::build(points.clone(), cfg.trap_radius);
    let mut frontier = points.clone();
    for _round in 0..12 {
        let mut missing: Vec<ExtendedComplex> = Vec::new();
        for p in &frontier {
            let Ok(imgs) = step(c, dir, *p) else { continue };
            for w in imgs {
                if !w.is_nan() && !cloud.is_within(&w, margin) {
                    missing.push(w);
                }
            }
        }
        if missing.is_empty() || points.len() > 8 * cfg.budget + 100_000 {
            break;
        }
        points.extend(missing.iter().copied());
        cloud = SphereCloud::build(points.clone(), cfg.trap_radius);
        frontier = missing;
    }
    Ok(AttractorCloud {
        cloud,
        resampled,
    })
}

/// Chaos-game sample of the forward attractor (approximates Λ₊, where both
/// branches act like the inverse quadratic): from a random start, each step
/// picks one of the two forward images uniformly; the transient is
/// discarded, the thin cusps at boundary-attracting cycles are filled
/// deterministically, and the cloud is closed under forward images at the
/// trap scale. Deterministic per seed.
pub fn attractor_forward(c: &Correspondence, cfg: &RenderConfig) -> Result<AttractorCloud> {
    let partition = attracting_cycle_partition(c, cfg)?;
    attractor_with(c, cfg, Direction::Forward, &partition)
}

/// The backward mirror (approximates Λ₋ = −Λ₊).
pub fn attractor_backward(c: &Correspondence, cfg: &RenderConfig) -> Result<AttractorCloud> {
    let partition = attracting_cycle_partition(c, cfg)?;
    attractor_with(c, cfg, Direction::Backward, &partition)
}

/// Both clouds, mirror-completed: Λ₋ = −Λ₊ is exact for the family (the
/// (z,w) ↦ (−w,−z) symmetry), so any point one side sampled and the other
/// missed is transplanted across. The pair then covers each other's negation
/// within the trap radius by construction.
pub fn attractor_pair(
    c: &Correspondence,
    cfg: &RenderConfig,
) -> Result<(AttractorCloud, AttractorCloud)> {
    let partition = attracting_cycle_partition(c, cfg)?;
    let plus = attractor_with(c, cfg, Direction::Forward, &partition)?;
    let minus = attractor_with(c, cfg, Direction::Backward, &partition)?;
    let margin = 0.9 * cfg.trap_radius;
    let mut minus_pts = minus.cloud.points().to_vec();
    for p in plus.cloud.points() {
        if !minus.cloud.is_within(&-*p, margin) {
            minus_pts.push(-*p);
        }
    }
    let minus_cloud = SphereCloud::build(minus_pts, cfg.trap_radius);
    let mut plus_pts = plus.cloud.points().to_vec();
    for q in minus_cloud.points() {
        if !plus.cloud.is_within(&-*q, margin) {
            plus_pts.push(-*q);
        }
    }
    Ok((
        AttractorCloud {
            cloud: SphereCloud::build(plus_pts, cfg.trap_radius),
            resampled: plus.resampled,
        },
        AttractorCloud {
            cloud: minus_cloud,
            resampled: minus.resampled,
        },
    ))
}

/// Robust directed-Hausdorff estimate between clouds: the q-quantile of
/// nearest-point distances in both directions (the extreme tail sits in
/// repair zones sampled below the trap scale).
pub fn hausdorff_estimate(a: &SphereCloud, b: &SphereCloud, quantile: f64) -> f64 {
    let directed = |from: &SphereCloud, to: &SphereCloud| {
        let mut ds: Vec<f64> = from
            .points()
            .iter()
            .map(|p| to.approx_distance(p))
            .collect();
        ds.sort_by(f64::total_cmp);
        let idx = ((ds.len() as f64 - 1.0) * quantile).floor() as usize;
        ds[idx]
    };
    directed(a, b).max(directed(b, a))
}

/// A periodic branch orbit with its composed multiplier.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub points: Vec<ExtendedComplex>,
    pub multiplier: Complex64,
}

/// Follows the branch tree of `dir` from z to depth `period` and returns the
/// leaf closest to z together with its anchor orbit.
fn nearest_return(
    c: &Correspondence,
    z: ExtendedComplex,
    period: usize,
) -> Option<(ExtendedComplex, Vec<ExtendedComplex>)> {
    #[derive(Clone)]
    struct Node {
        point: ExtendedComplex,
        path: Vec<ExtendedComplex>,
    }
    let mut level = vec![Node {
        point: z,
        path: Vec::new(),
    }];
    for _ in 0..period {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            let Ok(imgs) = c.forward(node.point) else {
                continue;
            };
            for w in imgs.points {
                if w.is_nan() {
                    continue;
                }
                let mut path = node.path.clone();
                path.push(w);
                next.push(Node { point: w, path });
            }
        }
        if next.is_empty() {
            return None;
        }
        // keep the tree narrow and deterministic
        next.sort_by(|a, b| {
            a.point
                .chordal(&z)
                .total_cmp(&b.point.chordal(&z))
                .then_with(|| cmp_embed(&a.point, &b.point))
        });
        next.truncate(64);
        level = next;
    }
    let best = level
        .into_iter()
        .min_by(|a, b| a.point.chordal(&z).total_cmp(&b.point.chordal(&z)))?;
    Some((best.point, best.path))
}

fn cmp_embed(a: &ExtendedComplex, b: &ExtendedComplex) -> std::cmp::Ordering {
    let (pa, pb) = (a.embed(), b.embed());
    pa[0]
        .total_cmp(&pb[0])
        .then(pa[1].total_cmp(&pb[1]))
        .then(pa[2].total_cmp(&pb[2]))
}

/// Re-evaluates the orbit from z tracking the branches nearest to the anchor
/// points; returns the endpoint.
fn follow_anchored(
    c: &Correspondence,
    z: ExtendedComplex,
    anchors: &[ExtendedComplex],
) -> Option<ExtendedComplex> {
    let mut x = z;
    for anchor in anchors {
        let imgs = c.forward(x).ok()?.points;
        let d0 = imgs[0].chordal(anchor);
        let d1 = imgs[1].chordal(anchor);
        x = if d0 <= d1 { imgs[0] } else { imgs[1] };
        if x.is_nan() {
            return None;
        }
    }
    Some(x)
}

/// Branch cycles of period ≤ cfg.cycle_period_max located by nearest-return
/// Newton iteration from the forward trees of the critical points (plus the
/// fixed points), deduplicated as point sets.
pub fn find_cycles(c: &Correspondence, cfg: &RenderConfig) -> Result<Vec<Cycle>> {
    let mut seeds: Vec<ExtendedComplex> = Vec::new();
    for z in c.critical_points_forward() {
        seeds.push(z);
        if let Ok(img) = c.forward(z) {
            seeds.extend(img.points);
        }
    }
    if let Ok(fps) = c.fixed_points() {
        seeds.extend(fps.iter().map(|fp| fp.z));
    }
    let mut cycles: Vec<Cycle> = Vec::new();
    for period in 1..=cfg.cycle_period_max {
        for &seed in &seeds {
            if let Some(cycle) = polish_cycle(c, seed, period) {
                let known = cycles.iter().any(|other| {
                    other.points.len() == cycle.points.len()
                        && cycle.points.iter().all(|p| {
                            other
                                .points
                                .iter()
                                .any(|q| p.chordal(q) < 10.0 * c.policy.chordal_eq)
                        })
                });
                if !known {
                    cycles.push(cycle);
                }
            }
        }
    }
    Ok(cycles)
}

fn polish_cycle(c: &Correspondence, seed: ExtendedComplex, period: usize) -> Option<Cycle> {
    let mut z = seed;
    let mut anchors: Vec<ExtendedComplex> = Vec::new();
    let mut converged = false;
    for _ in 0..40 {
        let (ret, path) = nearest_return(c, z, period)?;
        anchors = path;
        let (zc, rc) = (z.to_complex()?, ret.to_complex()?);
        let g = rc - zc;
        if ret.chordal(&z) < 1e-12 {
            converged = true;
            break;
        }
        // Newton on f_path(z) − z with a branch-tracked central difference.
        let h = 1e-6 * (1.0 + zc.norm());
        let hc = Complex64::new(h, 0.0);
        let plus = follow_anchored(c, ExtendedComplex::finite(zc + hc), &anchors)?;
        let minus = follow_anchored(c, ExtendedComplex::finite(zc - hc), &anchors)?;
        let df = (plus.to_complex()? - minus.to_complex()?) / (2.0 * hc);
        let denom = df - Complex64::ONE;
        if denom.norm() < 1e-12 {
            return None;
        }
        let next = zc - g / denom;
        if !next.is_finite() {
            return None;
        }
        z = ExtendedComplex::finite(next);
    }
    if !converged {
        return None;
    }
    // orbit points: z, then the anchors (last anchor returns to z)
    let mut points = vec![z];
    points.extend(anchors.iter().take(period - 1).copied());
    // minimal period check: reject cycles that revisit a point early
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].chordal(&points[j]) < 1e-9 {
                return None;
            }
        }
    }
    let mut multiplier = Complex64::ONE;
    for i in 0..points.len() {
        let zz = points[i];
        let ww = points[(i + 1) % points.len()];
        multiplier *= c.branch_derivative(zz, ww);
    }
    if !multiplier.is_finite() {
        return None;
    }
    Some(Cycle { points, multiplier })
}

/// The outcome of classifying one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    LambdaMinus,
    LambdaPlus,
    /// First step at which the forward branch tree entered the Λ₊ trap.
    Omega(u32),
    /// Budget exhausted without resolution; never silently binned.
    Undecided,
}

impl Classification {
    pub fn code(&self) -> u32 {
        match self {
            Classification::Undecided => CODE_UNDECIDED,
            Classification::LambdaMinus => CODE_LAMBDA_MINUS,
            Classification::LambdaPlus => CODE_LAMBDA_PLUS,
            Classification::Omega(n) => CODE_OMEGA_BASE.saturating_add(*n),
        }
    }
}

/// Classifier for one correspondence: both attractor clouds plus the
/// attracting cycles that anchor the interiors of Λ∓.
pub struct Classifier {
    pub corr: Correspondence,
    pub cfg: RenderConfig,
    pub plus: AttractorCloud,
    pub minus: AttractorCloud,
    /// Attracting cycle points inside Λ₋ (forward multiplier < 1).
    pub attract_minus: Vec<ExtendedComplex>,
    /// Their mirrors inside Λ₊.
    pub attract_plus: Vec<ExtendedComplex>,
}

impl Classifier {
    pub fn new(corr: Correspondence, cfg: RenderConfig) -> Result<Self> {
        cfg.validate()?;
        let partition = attracting_cycle_partition(&corr, &cfg)?;
        let (plus, minus) = attractor_pair(&corr, &cfg)?;
        // interior-type forward-attracting cycles live inside Λ₋ (where the
        // single persistent branch acts like q_c); boundary-type cycles are
        // already part of the extended clouds
        let attract_minus: Vec<ExtendedComplex> = partition
            .interior
            .iter()
            .flat_map(|cycle| cycle.points.iter().copied())
            .collect();
        let attract_plus: Vec<ExtendedComplex> = attract_minus.iter().map(|z| -*z).collect();
        Ok(Classifier {
            corr,
            cfg,
            plus,
            minus,
            attract_minus,
            attract_plus,
        })
    }

    fn near_targets(
        &self,
        z: &ExtendedComplex,
        cloud: &SphereCloud,
        cycles: &[ExtendedComplex],
    ) -> bool {
        let r = self.cfg.trap_radius;
        if cloud.is_within(z, r) {
            return true;
        }
        cycles.iter().any(|p| p.chordal(z) <= r)
    }

    fn target_distance(
        &self,
        z: &ExtendedComplex,
        cloud: &SphereCloud,
        cycles: &[ExtendedComplex],
    ) -> f64 {
        let mut d = cloud.approx_distance(z);
        for p in cycles {
            d = d.min(p.chordal(z));
        }
        d
    }

    /// Greedy branch path chasing the target set; true when the path ends
    /// with `persistence` consecutive steps inside the trap.
    fn persistent_path(
        &self,
        z: ExtendedComplex,
        dir: Direction,
        cloud: &SphereCloud,
        cycles: &[ExtendedComplex],
    ) -> bool {
        let mut x = z;
        let mut run = 0usize;
        for _ in 0..self.cfg.classify_depth {
            let Ok(imgs) = step(&self.corr, dir, x) else {
                return false;
            };
            let d0 = self.target_distance(&imgs[0], cloud, cycles);
            let d1 = self.target_distance(&imgs[1], cloud, cycles);
            x = if d0 <= d1 { imgs[0] } else { imgs[1] };
            if x.is_nan() {
                return false;
            }
            if self.near_targets(&x, cloud, cycles) {
                run += 1;
            } else {
                run = 0;
            }
        }
        run >= self.cfg.persistence
    }

    /// First depth at which the forward branch tree (width-capped,
    /// deterministic) enters the Λ₊ trap.
    fn escape_step(&self, z: ExtendedComplex) -> Option<u32> {
        let mut level = vec![z];
        for depth in 1..=self.cfg.escape_depth {
            let mut next: Vec<ExtendedComplex> = Vec::with_capacity(level.len() * 2);
            for &x in &level {
                let Ok(imgs) = step(&self.corr, Direction::Forward, x) else {
                    continue;
                };
                for w in imgs {
                    if !w.is_nan() {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return None;
            }
            if next
                .iter()
                .any(|w| self.near_targets(w, &self.plus.cloud, &self.attract_plus))
            {
                return Some(depth as u32);
            }
            let mut keyed: Vec<(f64, ExtendedComplex)> = next
                .into_iter()
                .map(|w| {
                    (
                        self.target_distance(&w, &self.plus.cloud, &self.attract_plus),
                        w,
                    )
                })
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| cmp_embed(&a.1, &b.1)));
            keyed.truncate(self.cfg.escape_width);
            level = keyed.into_iter().map(|(_, w)| w).collect();
        }
        None
    }

    /// Classification of one point: crust membership first, then the greedy
    /// interior paths (forward for Λ₋, where the correspondence acts like
    /// q_c; backward for Λ₊), then the escape step into the Λ₊ trap.
    pub fn classify(&self, z: ExtendedComplex) -> Classification {
        let r = self.cfg.trap_radius;
        if self.minus.cloud.is_within(&z, r) {
            return Classification::LambdaMinus;
        }
        if self.plus.cloud.is_within(&z, r) {
            return Classification::LambdaPlus;
        }
        if self.persistent_path(z, Direction::Forward, &self.minus.cloud, &self.attract_minus) {
            return Classification::LambdaMinus;
        }
        if self.persistent_path(z, Direction::Backward, &self.plus.cloud, &self.attract_plus) {
            return Classification::LambdaPlus;
        }
        match self.escape_step(z) {
            Some(n) => Classification::Omega(n),
            None => Classification::Undecided,
        }
    }
}

/// One-off classification. Builds a classifier behind the scenes; use
/// [`Classifier`] directly for batches.
pub fn classify_point(
    c: &Correspondence,
    z: ExtendedComplex,
    cfg: &RenderConfig,
) -> Result<Classification> {
    Ok(Classifier::new(*c, *cfg)?.classify(z))
}

/// A rendered limit-set picture: the per-pixel classification raster plus
/// accumulation counts of both attractor clouds, and the clouds themselves.
#[derive(Debug)]
pub struct RenderOutput {
    pub class: Raster<u32>,
    pub hits_minus: Raster<u32>,
    pub hits_plus: Raster<u32>,
    pub minus_points: Vec<ExtendedComplex>,
    pub plus_points: Vec<ExtendedComplex>,
    pub undecided: usize,
    pub resampled: usize,
}

/// Renders per-pixel classification with escape-step coloring for Ω and
/// accumulation rasters for the attractor clouds. Deterministic per seed;
/// Undecided pixels keep the reserved code.
pub fn render_limit_sets(
    c: &Correspondence,
    width: usize,
    height: usize,
    viewport: Viewport,
    cfg: &RenderConfig,
) -> Result<RenderOutput> {
    let classifier = Classifier::new(*c, *cfg)?;
    let mut class = Raster::<u32>::new(width, height, viewport)?;
    class
        .data
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, line)| {
            for (col, out) in line.iter_mut().enumerate() {
                let z = viewport.pixel_to_point(width, height, col, row);
                *out = classifier.classify(ExtendedComplex::finite(z)).code();
            }
        });
    let undecided = class.data.iter().filter(|&&v| v == CODE_UNDECIDED).count();

    let mut hits_minus = Raster::<u32>::new(width, height, viewport)?;
    let mut hits_plus = Raster::<u32>::new(width, height, viewport)?;
    let accumulate = |raster: &mut Raster<u32>, pts: &[ExtendedComplex]| {
        for p in pts {
            if let Some(z) = p.to_complex() {
                if let Some((col, row)) = viewport.point_to_pixel(width, height, z) {
                    let v = raster.get(col, row);
                    raster.set(col, row, v.saturating_add(1));
                }
            }
        }
    };
    accumulate(&mut hits_minus, classifier.minus.cloud.points());
    accumulate(&mut hits_plus, classifier.plus.cloud.points());

    Ok(RenderOutput {
        class,
        hits_minus,
        hits_plus,
        minus_points: classifier.minus.cloud.points().to_vec(),
        plus_points: classifier.plus.cloud.points().to_vec(),
        undecided,
        resampled: classifier.minus.resampled + classifier.plus.resampled,
    })
}

/// Is the Ω region of a classification raster 4-connected?
pub fn omega_connected(class: &Raster<u32>) -> bool {
    let is_omega = |v: u32| v >= CODE_OMEGA_BASE && v != CODE_MASKED;
    let total = class.data.iter().filter(|&&v| is_omega(v)).count();
    if total == 0 {
        return true;
    }
    let start = class.data.iter().position(|&v| is_omega(v)).unwrap();
    let (w, h) = (class.width, class.height);
    let mut seen = vec![false; class.data.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 0usize;
    while let Some(i) = stack.pop() {
        count += 1;
        let (col, row) = (i % w, i / w);
        let mut push = |c: usize, r: usize| {
            let j = r * w + c;
            if !seen[j] && is_omega(class.data[j]) {
                seen[j] = true;
                stack.push(j);
            }
        };
        if col > 0 {
            push(col - 1, row);
        }
        if col + 1 < w {
            push(col + 1, row);
        }
        if row > 0 {
            push(col, row - 1);
        }
        if row + 1 < h {
            push(col, row + 1);
        }
    }
    count == total
}

/// Empirical mating-locus scan over the a-plane at fixed k.
///
/// Per pixel: the short attracting cycles are located by nearest-return
/// Newton from the critical points; when an interior-type attracting cycle
/// exists and a critical orbit reaches it within budget, the pixel is
/// polynomial-side bounded and keeps the budget value. Otherwise the pixel
/// records the number of steps until the seeded random branch orbit of the
/// critical points enters the Λ₊ trap (a deterministic mini forward cloud),
/// the escape shading of the exterior. a = ±1 pixels carry the mask code.
pub fn scan_parameter_plane(
    region: Viewport,
    k: Complex64,
    width: usize,
    height: usize,
    cfg: &RenderConfig,
) -> Result<Raster<u32>> {
    cfg.validate()?;
    let mut raster = Raster::<u32>::new(width, height, region)?;
    raster
        .data
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, line)| {
            for (col, out) in line.iter_mut().enumerate() {
                let a = region.pixel_to_point(width, height, col, row);
                *out = scan_pixel(a, k, cfg, (row * width + col) as u64);
            }
        });
    Ok(raster)
}

fn scan_pixel(a: Complex64, k: Complex64, cfg: &RenderConfig, pixel: u64) -> u32 {
    let Ok(corr) = Correspondence::with_policy(a, k, cfg.policy) else {
        return CODE_MASKED;
    };
    let bounded = cfg.scan_budget as u32;
    let crit = corr.critical_points_forward();
    let zeros = corr.branch_derivative_zeros();
    // the derivative-zero points are the polynomial-side critical analogs;
    // the coincidence points and first images widen the Newton seeding
    let mut seeds: Vec<ExtendedComplex> = Vec::new();
    seeds.extend(zeros);
    seeds.extend(crit);
    for &z in &zeros {
        if let Ok(img) = corr.forward(z) {
            seeds.extend(img.points);
        }
    }

    // interior-type attracting cycles reached by a critical orbit mark the
    // polynomial-side bounded (hyperbolic) pixels
    let mut interior: Vec<ExtendedComplex> = Vec::new();
    for period in 1..=3usize.min(cfg.cycle_period_max) {
        for &seed in &seeds {
            let Some(cycle) = polish_cycle(&corr, seed, period) else {
                continue;
            };
            if cycle.multiplier.norm() >= 1.0 - 1e-9 {
                continue;
            }
            let b = cycle.points[0];
            let Ok(img) = corr.forward(b) else { continue };
            let sibling = if img.points[0].chordal(&b) >= img.points[1].chordal(&b) {
                img.points[0]
            } else {
                img.points[1]
            };
            let boundary_type = greedy_orbit_to(
                &corr,
                Direction::Forward,
                sibling,
                &cycle.points,
                80,
                cfg.trap_radius,
                |_| {},
            );
            if !boundary_type {
                interior.extend(cycle.points);
            }
        }
    }
    if !interior.is_empty() {
        for &z_crit in zeros.iter().chain(crit.iter()) {
            if greedy_orbit_to(
                &corr,
                Direction::Forward,
                z_crit,
                &interior,
                cfg.scan_budget,
                cfg.trap_radius,
                |_| {},
            ) {
                return bounded;
            }
        }
    }

    // exterior: escape shading from a deterministic mini forward cloud
    let mut rng = SplitMix64::fork(cfg.seed ^ 0x5343414eu64, pixel);
    let mut pts = Vec::with_capacity(cfg.scan_cloud);
    let mut x = rng.sphere_point();
    let transient = 40usize;
    let mut produced = 0usize;
    while pts.len() < cfg.scan_cloud {
        produced += 1;
        if produced > 30 * (cfg.scan_cloud + transient) {
            return CODE_MASKED;
        }
        match corr.forward(x) {
            Ok(img) => {
                let next = img.points[usize::from(rng.next_bool())];
                if next.is_nan() {
                    x = rng.sphere_point();
                    continue;
                }
                x = next;
                if produced > transient {
                    pts.push(x);
                }
            }
            Err(_) => x = rng.sphere_point(),
        }
    }
    let cloud = SphereCloud::build(pts, cfg.trap_radius);
    let mut fastest = bounded;
    for &z_crit in &crit {
        let mut z = z_crit;
        for step_idx in 1..=cfg.scan_budget {
            let Ok(img) = corr.forward(z) else { break };
            z = img.points[usize::from(rng.next_bool())];
            if z.is_nan() {
                break;
            }
            if cloud.is_within(&z, cfg.trap_radius) {
                fastest = fastest.min(step_idx as u32);
                break;
            }
        }
    }
    // never trapped within budget: indistinguishable from bounded (the
    // budget value doubles as the undecided code, as in any escape render)
    fastest
}

/// A fixed point with the distance of its multiplier from 1.
#[derive(Debug, Clone)]
pub struct FixedFlag {
    pub z: ExtendedComplex,
    pub multipliers: Vec<Complex64>,
    pub distance_to_one: f64,
    pub flagged: bool,
}

/// A cycle with the distance of its composed multiplier from 1.
#[derive(Debug, Clone)]
pub struct CycleFlag {
    pub points: Vec<ExtendedComplex>,
    pub multiplier: Complex64,
    pub distance_to_one: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct ParabolicReport {
    pub fixed: Vec<FixedFlag>,
    pub cycles: Vec<CycleFlag>,
    pub tol: f64,
}

impl ParabolicReport {
    pub fn any_flagged(&self) -> bool {
        self.fixed.iter().any(|f| f.flagged) || self.cycles.iter().any(|c| c.flagged)
    }
}

/// Flags fixed points and short cycles whose (composed) branch multiplier is
/// within cfg.parabolic_tol of 1.
pub fn parabolic_detect(c: &Correspondence, cfg: &RenderConfig) -> Result<ParabolicReport> {
    let tol = cfg.parabolic_tol;
    let fixed: Vec<FixedFlag> = c
        .fixed_points()?
        .into_iter()
        .map(|FixedPoint { z, multipliers }| {
            let distance_to_one = multipliers
                .iter()
                .map(|m| (m - Complex64::ONE).norm())
                .fold(f64::INFINITY, f64::min);
            FixedFlag {
                z,
                multipliers,
                distance_to_one,
                flagged: distance_to_one < tol,
            }
        })
        .collect();
    let cycles: Vec<CycleFlag> = find_cycles(c, cfg)?
        .into_iter()
        .filter(|cycle| cycle.points.len() > 1)
        .map(|Cycle { points, multiplier }| {
            let distance_to_one = (multiplier - Complex64::ONE).norm();
            CycleFlag {
                points,
                multiplier,
                distance_to_one,
                flagged: distance_to_one < tol,
            }
        })
        .collect();
    Ok(ParabolicReport { fixed, cycles, tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// An interior (pre-pinch) mating parameter used across the dynamics
    /// tests; located empirically (artifact-derived, not a paper value).
    /// At k = 1, a = 5 the α fixed point is superattracting (the mating with
    /// z ↦ z²); backing k off to 0.95 unglues the β-pair into a loxodromic
    /// pair (multipliers 0.864 and 1.157) with the Λ∓ clouds well separated.
    pub(crate) fn interior_corr() -> Correspondence {
        Correspondence::new(c64(5.0, 0.0), c64(0.95, 0.0)).unwrap()
    }

    fn small_cfg() -> RenderConfig {
        RenderConfig {
            budget: 6000,
            transient: 100,
            seed: 7,
            ..RenderConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = RenderConfig::default();
        cfg.budget = 10;
        cfg.transient = 20;
        assert!(cfg.validate().is_err());
        assert!(RenderConfig::default().validate().is_ok());
    }

    #[test]
    fn attractor_deterministic_per_seed() {
        let corr = interior_corr();
        let cfg = small_cfg();
        let a = attractor_forward(&corr, &cfg).unwrap();
        let b = attractor_forward(&corr, &cfg).unwrap();
        assert_eq!(a.cloud.points().len(), b.cloud.points().len());
        for (p, q) in a.cloud.points().iter().zip(b.cloud.points()) {
            assert_eq!(p.chordal(q), 0.0);
        }
    }

    #[test]
    fn attractor_cloud_is_forward_invariant() {
        let corr = interior_corr();
        let cfg = small_cfg();
        let cloud = attractor_forward(&corr, &cfg).unwrap().cloud;
        let mut checked = 0;
        for p in cloud.points().iter().step_by(6) {
            let img = corr.forward(*p).unwrap();
            for w in img.points {
                assert!(
                    cloud.is_within(&w, cfg.trap_radius),
                    "forward image {w} of cloud point {p} leaves the trap"
                );
            }
            checked += 1;
            if checked >= 1000 {
                break;
            }
        }
    }

    #[test]
    fn backward_cloud_mirrors_forward_cloud() {
        let corr = interior_corr();
        let cfg = small_cfg();
        let (plus, minus) = attractor_pair(&corr, &cfg).unwrap();
        let negated: Vec<ExtendedComplex> =
            plus.cloud.points().iter().map(|p| -*p).collect();
        assert!(minus.cloud.covers(&negated, cfg.trap_radius));
        let negated_minus: Vec<ExtendedComplex> =
            minus.cloud.points().iter().map(|p| -*p).collect();
        assert!(plus.cloud.covers(&negated_minus, cfg.trap_radius));
    }

    #[test]
    fn attractor_budget_doubling_converged() {
        let corr = interior_corr();
        let cfg = small_cfg();
        let mut cfg2 = cfg;
        cfg2.budget = cfg.budget * 2;
        let a = attractor_forward(&corr, &cfg).unwrap().cloud;
        let b = attractor_forward(&corr, &cfg2).unwrap().cloud;
        // the robust Hausdorff estimate moves by less than the trap radius
        let d = hausdorff_estimate(&a, &b, 0.995);
        assert!(d < cfg.trap_radius, "estimate {d}");
    }

    #[test]
    fn quasicircle_trace_has_no_self_intersection() {
        // Λ₋ for the interior z²-like mating is a quasicircle: the polygon
        // through the cloud ordered by angle around its centroid must be
        // simple at sampling resolution.
        let corr = interior_corr();
        let mut cfg = small_cfg();
        cfg.budget = 2000;
        let minus = attractor_backward(&corr, &cfg).unwrap().cloud;
        let pts: Vec<Complex64> = minus
            .points()
            .iter()
            .filter_map(ExtendedComplex::to_complex)
            .collect();
        let centroid = pts.iter().sum::<Complex64>() / pts.len() as f64;
        let mut ordered: Vec<Complex64> = pts.clone();
        ordered.sort_by(|a, b| {
            (a - centroid)
                .arg()
                .total_cmp(&(b - centroid).arg())
                .then(a.norm().total_cmp(&b.norm()))
        });
        // decimate to segment resolution
        let poly: Vec<Complex64> = ordered.iter().step_by(8).copied().collect();
        let n = poly.len();
        let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
        let crosses = |a: (Complex64, Complex64), b: (Complex64, Complex64)| {
            let d = |p: Complex64, q: Complex64, r: Complex64| {
                (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
            };
            let (p1, p2) = a;
            let (q1, q2) = b;
            d(p1, p2, q1) * d(p1, p2, q2) < 0.0 && d(q1, q2, p1) * d(q1, q2, p2) < 0.0
        };
        let mut violations = 0;
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // adjacent around the wrap
                }
                if crosses(seg(i), seg(j)) {
                    violations += 1;
                }
            }
        }
        assert_eq!(violations, 0, "boundary trace self-intersects");
    }

    #[test]
    fn classifier_crust_and_interior() {
        let corr = interior_corr();
        let cfg = small_cfg();
        let cl = Classifier::new(corr, cfg).unwrap();
        // cloud points classify as their own crust
        for p in cl.minus.cloud.points().iter().step_by(500) {
            assert_eq!(cl.classify(*p), Classification::LambdaMinus);
        }
        for p in cl.plus.cloud.points().iter().step_by(500) {
            assert_eq!(cl.classify(*p), Classification::LambdaPlus);
        }
        // the attracting cycle sits inside Λ₋
        assert!(
            !cl.attract_minus.is_empty(),
            "interior parameter should have an attracting cycle"
        );
        for p in cl.attract_minus.clone() {
            assert_eq!(cl.classify(p), Classification::LambdaMinus);
        }
        for p in cl.attract_plus.clone() {
            assert_eq!(cl.classify(p), Classification::LambdaPlus);
        }
        // a far-away point is group-like: finite escape step
        match cl.classify(ExtendedComplex::finite(c64(0.0, 8.0))) {
            Classification::Omega(_) => {}
            other => panic!("expected Omega, got {other:?}"),
        }
        // infinity classifies per its orbit like any other point: it sits in
        // the group-like region for this parameter
        match cl.classify(ExtendedComplex::Infinity) {
            Classification::Omega(_) => {}
            other => panic!("expected Omega at infinity, got {other:?}"),
        }
    }

    #[test]
    fn lambda_minus_images_never_classify_omega() {
        // Λ = Λ₋ ∪ Λ₊ is completely invariant: forward images of Λ₋ points
        // land in Λ₋ (the polynomial branch) or Λ₊ (the jump branch), never
        // in the ordinary set.
        let corr = interior_corr();
        let cfg = small_cfg();
        let cl = Classifier::new(corr, cfg).unwrap();
        let mut samples: Vec<ExtendedComplex> = cl.attract_minus.clone();
        samples.extend(cl.minus.cloud.points().iter().step_by(400).copied());
        for z in samples {
            assert_eq!(cl.classify(z), Classification::LambdaMinus, "sample {z}");
            let img = corr.forward(z).unwrap();
            for w in img.points {
                match cl.classify(w) {
                    Classification::LambdaMinus | Classification::LambdaPlus => {}
                    other => panic!("image {w} of Λ₋ point {z} classified {other:?}"),
                }
            }
        }
    }

    #[test]
    fn membership_predicates_never_overlap() {
        // the two limb-membership tests are mutually exclusive on 10⁴
        // random points (the limbs are disjoint at an interior parameter)
        let corr = interior_corr();
        let cfg = small_cfg();
        let cl = Classifier::new(corr, cfg).unwrap();
        let mut rng = SplitMix64::new(2);
        let mut both = 0usize;
        for _ in 0..10_000 {
            let z = rng.sphere_point();
            let in_minus = cl.minus.cloud.is_within(&z, cfg.trap_radius)
                || cl.persistent_path(z, Direction::Forward, &cl.minus.cloud, &cl.attract_minus);
            let in_plus = cl.plus.cloud.is_within(&z, cfg.trap_radius)
                || cl.persistent_path(z, Direction::Backward, &cl.plus.cloud, &cl.attract_plus);
            if in_minus && in_plus {
                both += 1;
            }
        }
        assert_eq!(both, 0, "points classified in both limbs");
    }

    #[test]
    fn omega_step_decreases_along_forward_images() {
        // Ω is completely invariant: forward images of an Omega(n) point stay
        // in Ω ∪ Λ₊, and the escape path runs through a branch whose image
        // escapes at least as fast.
        let corr = interior_corr();
        let cfg = small_cfg();
        let cl = Classifier::new(corr, cfg).unwrap();
        let mut rng = SplitMix64::new(5);
        let mut tested = 0;
        while tested < 40 {
            let z = rng.sphere_point();
            let Classification::Omega(n) = cl.classify(z) else {
                continue;
            };
            if n < 2 {
                continue;
            }
            let img = corr.forward(z).unwrap();
            let mut fastest: Option<u32> = None;
            for w in img.points {
                match cl.classify(w) {
                    Classification::Omega(m) => {
                        fastest = Some(fastest.map_or(m, |f| f.min(m)));
                    }
                    Classification::LambdaPlus => fastest = Some(0),
                    other => panic!("forward image of Ω point classified {other:?}"),
                }
            }
            assert!(
                fastest.is_some_and(|m| m <= n),
                "no forward branch escapes at least as fast: n = {n}, children {fastest:?}"
            );
            tested += 1;
        }
    }

    #[test]
    fn partition_is_consistent_and_undecided_falls() {
        let corr = interior_corr();
        let mut cfg = small_cfg();
        cfg.escape_depth = 6;
        let shallow = Classifier::new(corr, cfg).unwrap();
        let mut cfg2 = cfg;
        cfg2.escape_depth = 48;
        let deep = Classifier::new(corr, cfg2).unwrap();
        let mut rng = SplitMix64::new(99);
        let mut undecided_shallow = 0;
        let mut undecided_deep = 0;
        for _ in 0..400 {
            let z = rng.sphere_point();
            if shallow.classify(z) == Classification::Undecided {
                undecided_shallow += 1;
            }
            if deep.classify(z) == Classification::Undecided {
                undecided_deep += 1;
            }
        }
        assert!(undecided_deep <= undecided_shallow);
        assert!(undecided_deep < 300, "virtually everything undecided");
    }

    #[test]
    fn render_is_seed_reproducible_and_omega_connected() {
        let corr = interior_corr();
        let mut cfg = small_cfg();
        cfg.budget = 4000;
        let vp = Viewport::from_corners(-1.6, -1.2, 1.6, 1.2).unwrap();
        let out1 = render_limit_sets(&corr, 96, 72, vp, &cfg).unwrap();
        let out2 = render_limit_sets(&corr, 96, 72, vp, &cfg).unwrap();
        assert_eq!(out1.class.data, out2.class.data);
        assert_eq!(out1.hits_minus.data, out2.hits_minus.data);
        assert!(omega_connected(&out1.class), "Ω region disconnected");
    }

    #[test]
    fn render_mirror_symmetry_away_from_boundaries() {
        let corr = interior_corr();
        let mut cfg = small_cfg();
        cfg.budget = 4000;
        let vp = Viewport::from_corners(-1.5, -1.1, 1.5, 1.1).unwrap();
        let (w, h) = (81, 61); // odd so pixel centers mirror onto centers
        let out = render_limit_sets(&corr, w, h, vp, &cfg).unwrap();
        let tag = |v: u32| match v {
            CODE_LAMBDA_MINUS => 1u8,
            CODE_LAMBDA_PLUS => 2,
            CODE_UNDECIDED => 0,
            _ => 3,
        };
        let swap = |v: u8| match v {
            1 => 2u8,
            2 => 1,
            other => other,
        };
        // pixels whose 3×3 block carries a single tag
        let uniform = |col: usize, row: usize| -> Option<u8> {
            if col == 0 || row == 0 || col + 1 >= w || row + 1 >= h {
                return None;
            }
            let t = tag(out.class.get(col, row));
            for dc in -1i64..=1 {
                for dr in -1i64..=1 {
                    let v = tag(out.class.get(
                        (col as i64 + dc) as usize,
                        (row as i64 + dr) as usize,
                    ));
                    if v != t {
                        return None;
                    }
                }
            }
            Some(t)
        };
        let mut violations = 0;
        let mut compared = 0;
        for row in 0..h {
            for col in 0..w {
                let (mcol, mrow) = (w - 1 - col, h - 1 - row);
                if let (Some(t), Some(m)) = (uniform(col, row), uniform(mcol, mrow)) {
                    compared += 1;
                    if swap(t) != m {
                        violations += 1;
                    }
                }
            }
        }
        assert!(compared > 1000, "too few interior pixels compared");
        assert_eq!(violations, 0, "mirror symmetry broken at {violations} of {compared}");
    }

    #[test]
    fn scan_masks_degenerate_pixels_and_reproduces() {
        let k = c64(1.0, 0.0);
        let cfg = RenderConfig {
            scan_cloud: 120,
            scan_budget: 60,
            seed: 11,
            ..RenderConfig::default()
        };
        // 3×3 grid centered so the middle pixel is exactly a = 1
        let vp = Viewport::from_corners(0.4, -0.6, 1.6, 0.6).unwrap();
        let scan1 = scan_parameter_plane(vp, k, 3, 3, &cfg).unwrap();
        let scan2 = scan_parameter_plane(vp, k, 3, 3, &cfg).unwrap();
        assert_eq!(scan1.data, scan2.data);
        assert_eq!(scan1.get(1, 1), CODE_MASKED);
        assert!(scan1.data.iter().filter(|&&v| v == CODE_MASKED).count() == 1);
    }

    #[test]
    fn scan_indicator_stable_deep_inside_and_outside() {
        let k = c64(1.0, 0.0);
        let cfg = RenderConfig {
            scan_cloud: 150,
            scan_budget: 80,
            seed: 3,
            ..RenderConfig::default()
        };
        // deep inside the locus island (the cardioid-analog band on the real
        // axis) every pixel reaches the interior cycle: the bounded code,
        // stable under resolution doubling
        let vp = Viewport::from_corners(4.9, -0.05, 5.1, 0.05).unwrap();
        let inside = scan_parameter_plane(vp, k, 4, 4, &cfg).unwrap();
        assert!(inside.data.iter().all(|&v| v == cfg.scan_budget as u32));
        let inside2 = scan_parameter_plane(vp, k, 8, 8, &cfg).unwrap();
        assert!(inside2.data.iter().all(|&v| v == cfg.scan_budget as u32));

        // just outside the island the critical orbit is absorbed fast
        let vp = Viewport::from_corners(3.7, 0.0, 3.9, 0.2).unwrap();
        let outside = scan_parameter_plane(vp, k, 4, 4, &cfg).unwrap();
        let max = outside.data.iter().max().unwrap();
        assert!(*max < 30, "outside region should escape fast, got {max}");
    }

    #[test]
    fn parabolic_detect_flags_k1_and_clears_elsewhere() {
        // k = 1: the fixed point 0 has branch multiplier exactly 1.
        let cfg = RenderConfig::default();
        let c1 = Correspondence::new(c64(4.0, 0.0), c64(1.0, 0.0)).unwrap();
        let report = parabolic_detect(&c1, &cfg).unwrap();
        assert!(report.any_flagged());
        let zero_flag = report
            .fixed
            .iter()
            .find(|f| f.z.approx_eq(&ExtendedComplex::ZERO, 1e-9))
            .unwrap();
        assert!(zero_flag.flagged);

        // interior parameter: all multipliers bounded away from 1
        let report = parabolic_detect(&interior_corr(), &cfg).unwrap();
        for f in &report.fixed {
            assert!(
                f.distance_to_one > 10.0 * cfg.parabolic_tol,
                "fixed point {} too close to parabolic: {}",
                f.z,
                f.distance_to_one
            );
        }
        assert!(!report.any_flagged());
    }

    #[test]
    fn parabolic_crossing_found_by_line_search() {
        // Along k ∈ [0.9, 1.1] at fixed a, the unglued β-pair multiplier
        // passes through 1 exactly at k = 1. A 1-D search minimizing
        // min |λ − 1| over the fixed points locates the crossing, and the
        // flag activates inside the tolerance window there (and nowhere
        // along the rest of the path).
        let a = c64(5.0, 0.0);
        let gap = |k: f64| -> f64 {
            let c = Correspondence::new(a, c64(k, 0.0)).unwrap();
            c.fixed_points()
                .unwrap()
                .iter()
                .flat_map(|fp| fp.multipliers.iter())
                .map(|m| (m - Complex64::ONE).norm())
                .fold(f64::INFINITY, f64::min)
        };
        let (mut lo, mut hi) = (0.9f64, 1.1f64);
        for _ in 0..80 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if gap(m1) <= gap(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let k_star = 0.5 * (lo + hi);
        assert!((k_star - 1.0).abs() < 1e-6, "crossing found at {k_star}");
        let cfg = RenderConfig {
            parabolic_tol: 1e-4,
            ..RenderConfig::default()
        };
        let c = Correspondence::new(a, c64(k_star, 0.0)).unwrap();
        assert!(parabolic_detect(&c, &cfg).unwrap().any_flagged());
        // away from the crossing the window stays quiet
        let c = Correspondence::new(a, c64(0.9, 0.0)).unwrap();
        assert!(!parabolic_detect(&c, &cfg)
            .unwrap()
            .fixed
            .iter()
            .any(|f| f.flagged));
    }

    #[test]
    fn cycle_multiplier_invariant_under_rotation() {
        let corr = interior_corr();
        let cfg = RenderConfig::default();
        let cycles = find_cycles(&corr, &cfg).unwrap();
        for cycle in cycles {
            let n = cycle.points.len();
            if n < 2 {
                continue;
            }
            // recompute the product starting from each point of the cycle
            for start in 0..n {
                let mut m = Complex64::ONE;
                for i in 0..n {
                    let z = cycle.points[(start + i) % n];
                    let w = cycle.points[(start + i + 1) % n];
                    m *= corr.branch_derivative(z, w);
                }
                assert!(
                    (m - cycle.multiplier).norm() < 1e-6 * (1.0 + cycle.multiplier.norm()),
                    "rotation changed the multiplier: {m} vs {}",
                    cycle.multiplier
                );
            }
        }
    }
}
