//! Combinatorics of rational rotation numbers: Sturmian p/q words, landing
//! pairs, parity and symmetry classification, and the circle quotient that
//! folds the antipodes of a Sturmian orbit together in pairs.
//!
//! Angles are exact rationals (arbitrary-precision integers); floating point
//! appears only when a caller asks for it at render time.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A reduced fraction p/q. Construction reduces gcd and normalizes q ≥ 1.
///
/// Three reduction modes matter downstream and are exposed explicitly:
/// the full value (winding numbers), the value mod 1 (Sturmian orbits), and
/// the value mod 2 (boundary representations r_{p/2q}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RotationNumber {
    p: i64,
    q: i64,
}

impl RotationNumber {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::BadParameters("rotation number with q = 0".into()));
        }
        if p == i64::MIN || q == i64::MIN {
            return Err(Error::BadParameters("rotation number overflows".into()));
        }
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        if g > 1 {
            p /= g;
            q /= g;
        }
        Ok(RotationNumber { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// The representative with 0 ≤ p < q.
    pub fn mod1(&self) -> RotationNumber {
        RotationNumber {
            p: self.p.rem_euclid(self.q),
            q: self.q,
        }
    }

    /// The representative with 0 ≤ p < 2q.
    pub fn mod2(&self) -> RotationNumber {
        RotationNumber {
            p: self.p.rem_euclid(2 * self.q),
            q: self.q,
        }
    }
}

impl std::fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl std::str::FromStr for RotationNumber {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| Error::BadParameters(format!("expected p/q, got {s:?}")))?;
        let p = p
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::BadParameters(format!("bad numerator: {e}")))?;
        let q = q
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::BadParameters(format!("bad denominator: {e}")))?;
        RotationNumber::new(p, q)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// An exact angle on the circle R/Z, kept in [0, 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleAngle(BigRational);

impl CircleAngle {
    pub fn new(num: i64, den: i64) -> Self {
        CircleAngle::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(x: BigRational) -> Self {
        let one = BigRational::one();
        let mut x = x.fract();
        if x.is_negative() {
            x += one;
        }
        CircleAngle(x)
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64(self.0.numer()) / big_to_f64(self.0.denom())
    }

    /// Image under the doubling map, 2t mod 1.
    pub fn double(&self) -> CircleAngle {
        CircleAngle::from_rational(&self.0 + &self.0)
    }

    /// The opposite point, t + 1/2 mod 1.
    pub fn antipode(&self) -> CircleAngle {
        CircleAngle::from_rational(&self.0 + BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// The two preimages under doubling: t/2 and t/2 + 1/2.
    pub fn halves(&self) -> (CircleAngle, CircleAngle) {
        let half = BigRational::new(self.0.numer().clone(), self.0.denom() * BigInt::from(2));
        let a = CircleAngle::from_rational(half.clone());
        let b = CircleAngle::from_rational(half + BigRational::new(BigInt::one(), BigInt::from(2)));
        (a, b)
    }

    /// Is `self` in the open counterclockwise arc from `a` to `b`?
    pub fn in_open_arc(&self, a: &CircleAngle, b: &CircleAngle) -> bool {
        if a.0 < b.0 {
            self.0 > a.0 && self.0 < b.0
        } else {
            self.0 > a.0 || self.0 < b.0
        }
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    // Angles in this crate have denominators 2^g (2^q − 1); f64 is plenty for
    // rendering, and exactness lives in the rationals.
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// A finite binary word, read as its infinite periodic repetition.
///
/// Stored in cyclic normal form: the lexicographically minimal rotation plus
/// the phase offset that recovers the word as constructed, so word equality
/// and cyclic-class equality are both unambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    canon: Vec<bool>,
    phase: usize,
}

impl BinaryWord {
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::BadParameters("empty binary word".into()));
        }
        let q = bits.len();
        let min_rot = (0..q)
            .min_by(|&i, &j| {
                (0..q)
                    .map(|k| bits[(i + k) % q])
                    .cmp((0..q).map(|k| bits[(j + k) % q]))
            })
            .unwrap();
        let canon: Vec<bool> = (0..q).map(|k| bits[(min_rot + k) % q]).collect();
        // bits[i] = canon[(i - min_rot) mod q] = canon[(phase + i) mod q]
        let phase = (q - min_rot) % q;
        Ok(BinaryWord { canon, phase })
    }

    /// Parses "00101".
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Result<Vec<bool>> = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::BadParameters(format!("bad word digit {other:?}"))),
            })
            .collect();
        BinaryWord::from_bits(&bits?)
    }

    pub fn len(&self) -> usize {
        self.canon.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty words
    }

    pub fn bit(&self, i: usize) -> bool {
        self.canon[(self.phase + i) % self.len()]
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.canon.iter().filter(|&&b| b).count()
    }

    /// Cyclic rotation: bit i of the result is bit i+n of self.
    pub fn rotate_left(&self, n: usize) -> BinaryWord {
        let q = self.len();
        BinaryWord {
            canon: self.canon.clone(),
            phase: (self.phase + n) % q,
        }
    }

    pub fn rotate_right(&self, n: usize) -> BinaryWord {
        let q = self.len();
        self.rotate_left(q - (n % q))
    }

    pub fn reversed(&self) -> BinaryWord {
        let mut bits = self.bits();
        bits.reverse();
        BinaryWord::from_bits(&bits).expect("nonempty")
    }

    /// Same cyclic class (equal canonical rotations).
    pub fn cyclic_eq(&self, other: &BinaryWord) -> bool {
        self.canon == other.canon
    }

    /// The lexicographically minimal rotation as a word.
    pub fn min_rotation(&self) -> BinaryWord {
        BinaryWord {
            canon: self.canon.clone(),
            phase: 0,
        }
    }

    /// The lexicographically maximal rotation as a word.
    pub fn max_rotation(&self) -> BinaryWord {
        let q = self.len();
        let max_rot = (0..q)
            .max_by(|&i, &j| {
                (0..q)
                    .map(|k| self.canon[(i + k) % q])
                    .cmp((0..q).map(|k| self.canon[(j + k) % q]))
            })
            .unwrap();
        BinaryWord {
            canon: self.canon.clone(),
            phase: max_rot,
        }
    }

    /// The circle point whose binary expansion is this word repeated:
    /// (Σ uᵢ 2^{q−1−i}) / (2^q − 1), exactly.
    pub fn angle(&self) -> CircleAngle {
        let q = self.len();
        let mut num = BigInt::zero();
        for i in 0..q {
            num <<= 1;
            if self.bit(i) {
                num += 1;
            }
        }
        let den = (BigInt::one() << q) - 1;
        CircleAngle::from_rational(BigRational::new(num, den))
    }
}

impl std::fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// The lower mechanical word of slope p/q: bitᵢ = ⌊(i+1)p/q⌋ − ⌊ip/q⌋.
/// This is the Sturmian p/q word (staircase construction).
pub fn mechanical_word(r: RotationNumber) -> BinaryWord {
    let r = r.mod1();
    let (p, q) = (r.p() as i128, r.q() as i128);
    let bits: Vec<bool> = (0..q)
        .map(|i| ((i + 1) * p).div_euclid(q) - (i * p).div_euclid(q) == 1)
        .collect();
    BinaryWord::from_bits(&bits).expect("q >= 1")
}

/// The distinct doubling orbit of the word's angle.
fn doubling_orbit(w: &BinaryWord) -> Vec<CircleAngle> {
    let start = w.angle();
    let mut orbit = vec![start.clone()];
    let mut t = start.double();
    while t != start {
        orbit.push(t.clone());
        t = t.double();
        debug_assert!(orbit.len() <= w.len());
    }
    orbit
}

/// Does the doubling map act on the orbit of the word's angle in the same
/// cyclic order as a rigid rotation?
pub fn is_sturmian(w: &BinaryWord) -> bool {
    sturmian_rotation(w).is_some()
}

/// The rotation amount of the doubling map on the sorted orbit, if the cyclic
/// order is preserved.
fn sturmian_rotation(w: &BinaryWord) -> Option<(usize, usize)> {
    let mut orbit = doubling_orbit(w);
    orbit.sort();
    let n = orbit.len();
    if n == 1 {
        return Some((0, 1));
    }
    let index_of = |t: &CircleAngle| orbit.binary_search(t).ok();
    let shift = index_of(&orbit[0].double())?;
    for (i, t) in orbit.iter().enumerate() {
        if index_of(&t.double())? != (i + shift) % n {
            return None;
        }
    }
    Some((shift, n))
}

/// Rotation number of a Sturmian word: ones over length, reduced mod 1.
pub fn rotation_number(w: &BinaryWord) -> Result<RotationNumber> {
    if !is_sturmian(w) {
        return Err(Error::NotSturmian);
    }
    Ok(RotationNumber::new(w.count_ones() as i64, w.len() as i64)?.mod1())
}

/// The lexicographically minimal and maximal rotations of the Sturmian p/q
/// word. The minimum is the reverse of the maximum.
pub fn min_max_words(r: RotationNumber) -> (BinaryWord, BinaryWord) {
    let w = mechanical_word(r);
    (w.min_rotation(), w.max_rotation())
}

/// The q points of the unique periodic Sturmian orbit of rotation number
/// p/q, sorted ascending. Exact rationals with denominator dividing 2^q − 1.
pub fn sturmian_orbit_angles(r: RotationNumber) -> Vec<CircleAngle> {
    let w = mechanical_word(r);
    let q = w.len();
    let mut angles: Vec<CircleAngle> = (0..q).map(|i| w.rotate_left(i).angle()).collect();
    angles.sort();
    angles.dedup();
    angles
}

/// The landing-pair algorithm: the arc through the point of ∂Λ₋ labelled
/// u₁…u₂…u_q lands on ∂Λ₊ at the point labelled u_{q−1}u_{q−2}…u₁u_q.
pub fn pair_landing(w: &BinaryWord) -> Result<BinaryWord> {
    if !is_sturmian(w) {
        return Err(Error::NotSturmian);
    }
    let bits = w.bits();
    let q = bits.len();
    let mut out = Vec::with_capacity(q);
    for i in (0..q.saturating_sub(1)).rev() {
        out.push(bits[i]);
    }
    out.push(bits[q - 1]);
    BinaryWord::from_bits(&out)
}

/// Flip the first digit. On the bi-infinite sequence this flip moves the
/// circle point by exactly 1/2; on the periodic block the angle moves by
/// 2^{q−1}/(2^q − 1), the periodic point nearest the antipode.
pub fn phi(w: &BinaryWord) -> BinaryWord {
    let mut bits = w.bits();
    bits[0] = !bits[0];
    BinaryWord::from_bits(&bits).expect("nonempty")
}

/// Cone points of the quotient orbifold, labels of the end points of the
/// pinching arc δ_{p/q}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConePoint {
    Q,
    R,
    S,
}

impl std::fmt::Display for ConePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConePoint::Q => write!(f, "Q"),
            ConePoint::R => write!(f, "R"),
            ConePoint::S => write!(f, "S"),
        }
    }
}

/// Which two cone points the arc joins, from the parities of p/q in lowest
/// terms: {Q,S} if q is even, {Q,R} if p and q are both odd, {R,S} if p is
/// even. Adding 2 to p/q preserves the pair; adding 1 swaps Q and S.
pub fn endpoint_cone_points(r: RotationNumber) -> (ConePoint, ConePoint) {
    let (p_even, q_even) = (r.p().rem_euclid(2) == 0, r.q().rem_euclid(2) == 0);
    if q_even {
        (ConePoint::Q, ConePoint::S)
    } else if p_even {
        (ConePoint::R, ConePoint::S)
    } else {
        (ConePoint::Q, ConePoint::R)
    }
}

/// The four possible reflection types of the bi-infinite periodic word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymmetryType {
    AtZero,
    AtOne,
    BetweenZeros,
    BetweenOnes,
}

impl std::fmt::Display for SymmetryType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetryType::AtZero => write!(f, "at-0"),
            SymmetryType::AtOne => write!(f, "at-1"),
            SymmetryType::BetweenZeros => write!(f, "between-0s"),
            SymmetryType::BetweenOnes => write!(f, "between-1s"),
        }
    }
}

/// The two reflection types of the bi-infinite Sturmian word of rotation
/// number p/q, by exhaustive search over the 2q candidate axes (through each
/// letter and through each gap).
pub fn word_symmetry(r: RotationNumber) -> Result<(SymmetryType, SymmetryType)> {
    let w = mechanical_word(r);
    let bits = w.bits();
    let q = bits.len() as i64;
    let at = |i: i64| bits[i.rem_euclid(q) as usize];
    let mut found = std::collections::BTreeSet::new();
    for axis in 0..(2 * q) {
        if axis % 2 == 0 {
            // through the letter at position axis/2
            let c = axis / 2;
            if (0..q).all(|k| at(c + k) == at(c - k)) {
                found.insert(if at(c) {
                    SymmetryType::AtOne
                } else {
                    SymmetryType::AtZero
                });
            }
        } else {
            // through the gap between positions (axis-1)/2 and (axis+1)/2
            let i = (axis - 1) / 2;
            if (0..q).all(|k| at(i + 1 + k) == at(i - k)) {
                found.insert(if at(i) {
                    SymmetryType::BetweenOnes
                } else {
                    SymmetryType::BetweenZeros
                });
            }
        }
    }
    let mut it = found.into_iter();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        other => Err(Error::InvariantViolation(format!(
            "expected exactly two reflection types for {r}, found {other:?}"
        ))),
    }
}

/// Image-arc structure of one application of the Λ₋→Λ₊ branch to the q arcs:
/// q even → q/2 concentric arcs; q odd → (q−1)/2 concentric arcs plus an
/// innermost spike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcStructure {
    pub concentric: usize,
    pub spike: usize,
}

pub fn image_arc_structure(r: RotationNumber) -> ArcStructure {
    let q = r.q() as usize;
    if q % 2 == 0 {
        ArcStructure {
            concentric: q / 2,
            spike: 0,
        }
    } else {
        ArcStructure {
            concentric: (q - 1) / 2,
            spike: 1,
        }
    }
}

/// One identification of the circle quotient ∼_{p/q}. A self-pair (a = b)
/// is a spike endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPair {
    pub a: CircleAngle,
    pub b: CircleAngle,
    pub generation: usize,
}

impl QuotientPair {
    fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Do the chords (a,b) and (c,d) cross on the circle?
    fn crosses(&self, other: &QuotientPair) -> bool {
        if self.is_degenerate() || other.is_degenerate() {
            return false;
        }
        let inside = |t: &CircleAngle| t.in_open_arc(&self.a, &self.b);
        inside(&other.a) != inside(&other.b)
    }
}

/// The quotient relation ∼_{p/q} to the requested preimage depth.
///
/// Generation 0 folds the antipodes of the Sturmian orbit together in pairs,
/// outermost first along the short arc that contains them (it exists because
/// the orbit itself occupies an arc of length < 1/2); for q odd the middle
/// point is self-paired (the spike endpoint, identified with nothing). Each
/// later generation pulls every pair back under the doubling map, choosing
/// the pairing of the four preimage points that crosses no chord accepted so
/// far, so the relation is backward-invariant and planar; a spike pulls back
/// to two spikes.
pub fn quotient_pairs(r: RotationNumber, depth: usize) -> Vec<QuotientPair> {
    let orbit = sturmian_orbit_angles(r);
    let opposite: Vec<CircleAngle> = orbit.iter().map(CircleAngle::antipode).collect();
    let mut sorted = opposite.clone();
    sorted.sort();
    let n = sorted.len();

    // Arc containing the points: complement of the largest gap.
    let start = if n == 1 {
        0
    } else {
        let mut largest = 0usize;
        let mut largest_gap = BigRational::zero();
        let one = BigRational::one();
        for i in 0..n {
            let next = (i + 1) % n;
            let mut gap = sorted[next].rational() - sorted[i].rational();
            if gap.is_negative() {
                gap += one.clone();
            }
            if gap > largest_gap {
                largest_gap = gap;
                largest = next;
            }
        }
        largest
    };
    let along_arc: Vec<CircleAngle> = (0..n).map(|i| sorted[(start + i) % n].clone()).collect();

    let mut pairs: Vec<QuotientPair> = Vec::new();
    let mut lo = 0usize;
    let mut hi = n - 1;
    while lo < hi {
        pairs.push(QuotientPair {
            a: along_arc[lo].clone(),
            b: along_arc[hi].clone(),
            generation: 0,
        });
        lo += 1;
        hi = hi.saturating_sub(1);
    }
    if lo == hi {
        pairs.push(QuotientPair {
            a: along_arc[lo].clone(),
            b: along_arc[lo].clone(),
            generation: 0,
        });
    }

    let mut frontier: Vec<QuotientPair> = pairs.clone();
    for generation in 1..=depth {
        let mut next = Vec::new();
        for pair in &frontier {
            if pair.is_degenerate() {
                // Away from the fold points the inverse branches are
                // bijective, so a spike pulls back to two spikes.
                let (h0, h1) = pair.a.halves();
                next.push(QuotientPair { a: h0.clone(), b: h0, generation });
                next.push(QuotientPair { a: h1.clone(), b: h1, generation });
                continue;
            }
            let (a0, a1) = pair.a.halves();
            let (b0, b1) = pair.b.halves();
            let parallel = [
                QuotientPair { a: a0.clone(), b: b0.clone(), generation },
                QuotientPair { a: a1.clone(), b: b1.clone(), generation },
            ];
            let nested = [
                QuotientPair { a: a0.clone(), b: b1.clone(), generation },
                QuotientPair { a: a1.clone(), b: b0.clone(), generation },
            ];
            let clean = |cand: &[QuotientPair; 2]| {
                pairs.iter().chain(next.iter()).all(|existing| {
                    !cand[0].crosses(existing) && !cand[1].crosses(existing)
                }) && !cand[0].crosses(&cand[1])
            };
            let chosen = if clean(&nested) { nested } else { parallel };
            next.extend(chosen);
        }
        pairs.extend(next.iter().cloned());
        frontier = next;
    }
    pairs
}
