//! Eventually periodic boundary points `g · c^∞`, the `F_d`-action on them,
//! orbit comparison on `∂F_d / R_F`, and the orbit-count invariant that
//! separates the systems `φ_F` up to continuous orbit equivalence.

use std::fmt;

use crate::error::{Error, Result};
use crate::quotient::RelationSpec;
use crate::words::{enumerate_words, GroupSpec, Letter, ReducedWord};

/// The boundary point `prefix · period^∞` in canonical form.
///
/// Invariants: `period` is nonempty, primitive and cyclically reduced;
/// `prefix · period` has no cancellation; `prefix` does not end with the
/// last letter of `period`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    prefix: ReducedWord,
    period: ReducedWord,
}

impl BoundaryPoint {
    /// Canonical representative of `g · c^∞`.
    pub fn normalize(g: &ReducedWord, c: &ReducedWord) -> Result<BoundaryPoint> {
        if c.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if g.rank() != c.rank() {
            return Err(Error::RankMismatch { left: g.rank(), right: c.rank() });
        }
        // g (h c' h⁻¹)^∞ = (g h) c'^∞
        let (outer, core) = c.cyclic_reduction();
        let mut prefix = g.mul_unchecked(&outer);
        let mut period = core.primitive_root();

        while let (Some(tail), Some(head)) = (prefix.last(), period.first()) {
            if tail != head.inverse() {
                break;
            }
            prefix = drop_last(&prefix);
            period = period.rotate_left(1);
        }
        let n = period.len();
        while prefix.last().is_some() && prefix.last() == period.last() {
            prefix = drop_last(&prefix);
            period = period.rotate_left(n - 1);
        }
        Ok(BoundaryPoint { prefix, period })
    }

    /// The pure periodic point `c^{+∞}`.
    pub fn periodic(c: &ReducedWord) -> Result<BoundaryPoint> {
        BoundaryPoint::normalize(&ReducedWord::identity(c.rank()), c)
    }

    /// Parses `"g|c"`, e.g. `"ab|a"` for `ab · a^∞` and `"e|a"` for `a^∞`.
    pub fn parse(spec: &GroupSpec, text: &str) -> Result<BoundaryPoint> {
        let (g, c) = text.split_once('|').ok_or_else(|| Error::Parse {
            position: 0,
            message: format!("boundary point {text:?} must have the form prefix|period"),
        })?;
        let prefix = ReducedWord::parse(spec, g).map_err(|e| shift_position(e, 0))?;
        let period = ReducedWord::parse(spec, c).map_err(|e| shift_position(e, g.len() + 1))?;
        BoundaryPoint::normalize(&prefix, &period)
    }

    pub fn rank(&self) -> usize {
        self.prefix.rank()
    }

    pub fn prefix(&self) -> &ReducedWord {
        &self.prefix
    }

    pub fn period(&self) -> &ReducedWord {
        &self.period
    }

    /// The first `k` letters of the infinite reduced word.
    pub fn prefix_letters(&self, k: usize) -> Vec<Letter> {
        self.prefix
            .letters()
            .iter()
            .chain(self.period.letters().iter().cycle())
            .take(k)
            .copied()
            .collect()
    }

    /// `w · x`.
    pub fn act(&self, w: &ReducedWord) -> Result<BoundaryPoint> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch { left: w.rank(), right: self.rank() });
        }
        BoundaryPoint::normalize(&w.mul_unchecked(&self.prefix), &self.period)
    }

    /// A nontrivial element fixing this point: `g c g⁻¹` for `x = g c^∞`.
    pub fn stabilizer(&self) -> ReducedWord {
        self.prefix.mul_unchecked(&self.period).mul_unchecked(&self.prefix.inverse())
    }

    /// When the period is a single letter, that letter.
    pub fn period_letter(&self) -> Option<Letter> {
        match self.period.letters() {
            [l] => Some(*l),
            _ => None,
        }
    }
}

fn drop_last(w: &ReducedWord) -> ReducedWord {
    ReducedWord::from_parts(w.rank(), w.letters()[..w.len() - 1].to_vec())
}

fn shift_position(e: Error, offset: usize) -> Error {
    match e {
        Error::Parse { position, message } => Error::Parse { position: position + offset, message },
        Error::NotReduced { position } => Error::Parse {
            position: position + offset,
            message: "word is not freely reduced".into(),
        },
        other => other,
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.prefix, self.period)
    }
}

/// `act_point(w, x) = w · x`.
pub fn act_point(w: &ReducedWord, x: &BoundaryPoint) -> Result<BoundaryPoint> {
    x.act(w)
}

/// Returns `w` with `w · x = y` when `x` and `y` lie in one `F_d`-orbit.
///
/// Two eventually periodic points share an orbit exactly when their
/// primitive periods are cyclic rotations of each other.
pub fn same_orbit(x: &BoundaryPoint, y: &BoundaryPoint) -> Option<ReducedWord> {
    if x.rank() != y.rank() {
        return None;
    }
    let shift = x.period.rotation_to(&y.period)?;
    // x = g (uv)^∞ = g u (vu)^∞ with |u| = shift, and y = h (vu)^∞.
    let u = ReducedWord::from_parts(x.rank(), x.period.letters()[..shift].to_vec());
    let witness = y.prefix.mul_unchecked(&x.prefix.mul_unchecked(&u).inverse());
    debug_assert_eq!(x.act(&witness).ok().as_ref(), Some(y));
    Some(witness)
}

/// Whether `x` lies in `Y = { [g s^{±∞}] : g ∈ F_d, s ∈ F }`.
pub fn in_y(rel: &RelationSpec, x: &BoundaryPoint) -> bool {
    x.period_letter().is_some_and(|l| rel.contains(l.generator_index()))
}

/// The `R_F`-class of an eventually periodic point: `{g s^{+∞}, g s^{-∞}}`
/// for single-letter periods `s^{±1}` with `s ∈ F`, otherwise `{x}`.
pub fn class_of(rel: &RelationSpec, x: &BoundaryPoint) -> Vec<BoundaryPoint> {
    match x.period_letter() {
        Some(l) if rel.contains(l.generator_index()) => {
            let mut partner = x.clone();
            partner.period = ReducedWord::letter_power(x.rank(), l.inverse(), 1);
            let mut class = vec![x.clone(), partner];
            class.sort();
            class
        }
        _ => vec![x.clone()],
    }
}

/// Whether the classes `[x]` and `[y]` lie in one orbit of `∂F_d / R_F`.
pub fn same_class_orbit(rel: &RelationSpec, x: &BoundaryPoint, y: &BoundaryPoint) -> bool {
    let ys = class_of(rel, y);
    class_of(rel, x).iter().any(|a| ys.iter().any(|b| same_orbit(a, b).is_some()))
}

/// Result of counting orbits of `Y` among sampled points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCount {
    /// Number of orbit classes found among the sampled points.
    pub orbits: usize,
    /// Number of sampled points of `Y`.
    pub sampled_points: usize,
    /// `♯F`, the value the orbit count must reproduce.
    pub expected: usize,
}

impl OrbitCount {
    /// Set when the count disagrees with `♯F`.
    pub fn falsification_alarm(&self) -> bool {
        self.orbits != self.expected
    }
}

/// Enumerates `g · t^∞` with `|g| <= sample_bound` and `t ∈ F ∪ F⁻¹`, then
/// partitions the points by [`same_class_orbit`].
pub fn orbit_count_invariant(rel: &RelationSpec, sample_bound: usize) -> Result<OrbitCount> {
    if sample_bound == 0 {
        return Err(Error::Precondition("sample bound must be at least 1".into()));
    }
    let spec = rel.group();
    let mut points = Vec::new();
    for n in 0..=sample_bound {
        for g in enumerate_words(spec, n) {
            for &s in rel.generators() {
                for inverse in [false, true] {
                    let t = ReducedWord::letter_power(spec.rank(), Letter::new(s, inverse), 1);
                    let x = BoundaryPoint::normalize(&g, &t)?;
                    // Only canonical representatives with this exact prefix.
                    if x.prefix == g {
                        points.push(x);
                    }
                }
            }
        }
    }
    let mut representatives: Vec<BoundaryPoint> = Vec::new();
    for x in &points {
        debug_assert!(in_y(rel, x));
        if !representatives.iter().any(|r| same_class_orbit(rel, r, x)) {
            representatives.push(x.clone());
        }
    }
    Ok(OrbitCount {
        orbits: representatives.len(),
        sampled_points: points.len(),
        expected: rel.generators().len(),
    })
}

/// Outcome of comparing `φ_F` with `φ_F'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeVerdict {
    /// `♯F = ♯F'`; `permutation[i]` is the image of generator `i` under a
    /// generator permutation carrying `F` onto `F'`. The witness is supplied
    /// by this crate, not derived from the orbit invariant.
    Equivalent { permutation: Vec<usize> },
    /// Orbit-count invariants differ.
    Distinguished { left: usize, right: usize },
}

/// Sample bound used by [`coe_compare`] for the orbit-count invariant.
pub const COE_SAMPLE_BOUND: usize = 2;

pub fn coe_compare(left: &RelationSpec, right: &RelationSpec) -> Result<CoeVerdict> {
    left.group().check_rank(right.group().rank())?;
    let a = orbit_count_invariant(left, COE_SAMPLE_BOUND)?;
    let b = orbit_count_invariant(right, COE_SAMPLE_BOUND)?;
    if a.falsification_alarm() || b.falsification_alarm() {
        return Err(Error::Internal(format!(
            "orbit count disagrees with the cardinality of F ({} vs {}, {} vs {})",
            a.orbits, a.expected, b.orbits, b.expected
        )));
    }
    if a.orbits != b.orbits {
        return Ok(CoeVerdict::Distinguished { left: a.orbits, right: b.orbits });
    }
    let permutation = generator_permutation(left, right)
        .ok_or_else(|| Error::Internal("no generator permutation for equal cardinalities".into()))?;
    Ok(CoeVerdict::Equivalent { permutation })
}

/// A permutation of `0..d` mapping `F` onto `F'` (sorted order to sorted
/// order, and likewise on complements).
pub fn generator_permutation(left: &RelationSpec, right: &RelationSpec) -> Option<Vec<usize>> {
    let d = left.group().rank();
    if left.generators().len() != right.generators().len() || d != right.group().rank() {
        return None;
    }
    let complement = |r: &RelationSpec| (0..d).filter(|i| !r.contains(*i)).collect::<Vec<_>>();
    let mut permutation = vec![0; d];
    for (&a, &b) in left.generators().iter().zip(right.generators()) {
        permutation[a] = b;
    }
    for (a, b) in complement(left).into_iter().zip(complement(right)) {
        permutation[a] = b;
    }
    Some(permutation)
}
