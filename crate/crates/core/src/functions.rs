//! Locally constant `ℤ`-valued functions on `∂F_d`, stored by their values
//! on the depth-`n` cylinders `Cyl(w)`, `w ∈ W_n`.
//!
//! The action is `(g·f)(x) = f(g⁻¹·x)`, so `g · p[w]` is the indicator of
//! `g · Cyl(w)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::BoundaryPoint;
use crate::words::{
    enumerate_words, index_of_letters, letters_at_index, GroupSpec, Letter, ReducedWord,
};

#[derive(Clone, Debug)]
pub struct DepthFunction {
    spec: GroupSpec,
    depth: usize,
    coeffs: Vec<BigInt>,
}

impl DepthFunction {
    pub fn zero(spec: &GroupSpec, depth: usize) -> DepthFunction {
        DepthFunction { spec: *spec, depth, coeffs: vec![BigInt::zero(); spec.word_count(depth)] }
    }

    pub fn constant(spec: &GroupSpec, value: BigInt) -> DepthFunction {
        DepthFunction { spec: *spec, depth: 0, coeffs: vec![value] }
    }

    pub fn one(spec: &GroupSpec) -> DepthFunction {
        DepthFunction::constant(spec, BigInt::one())
    }

    pub fn from_coeffs(spec: &GroupSpec, depth: usize, coeffs: Vec<BigInt>) -> Result<DepthFunction> {
        let expected = spec.word_count(depth);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(DepthFunction { spec: *spec, depth, coeffs })
    }

    /// `p[w]`: the indicator of `Cyl(w)`; `p[e]` is the constant `1`.
    pub fn indicator_p(spec: &GroupSpec, w: &ReducedWord) -> Result<DepthFunction> {
        spec.check_rank(w.rank())?;
        spec.check_depth(w.len())?;
        let mut f = DepthFunction::zero(spec, w.len());
        f.coeffs[w.index()] = BigInt::one();
        Ok(f)
    }

    /// `q[w] = p[w] + p[w⁻¹]`.
    pub fn indicator_q(spec: &GroupSpec, w: &ReducedWord) -> Result<DepthFunction> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        DepthFunction::indicator_p(spec, w)?.add(&DepthFunction::indicator_p(spec, &w.inverse())?)
    }

    pub(crate) fn indicator_of_indices(
        spec: &GroupSpec,
        depth: usize,
        indices: &[usize],
    ) -> Result<DepthFunction> {
        let mut f = DepthFunction::zero(spec, depth);
        for &i in indices {
            *f.coeffs.get_mut(i).ok_or(Error::IndexOutOfRange { index: i, depth })? = BigInt::one();
        }
        Ok(f)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Value on the cylinder of a word of length `self.depth()`.
    pub fn value_at(&self, w: &ReducedWord) -> Result<&BigInt> {
        if w.len() != self.depth {
            return Err(Error::DimensionMismatch { expected: self.depth, found: w.len() });
        }
        Ok(&self.coeffs[w.index()])
    }

    /// The same function written at depth `m >= self.depth()`.
    pub fn refine(&self, m: usize) -> Result<DepthFunction> {
        if m < self.depth {
            return Err(Error::DepthBelow { current: self.depth, requested: m });
        }
        self.spec.check_depth(m)?;
        Ok(self.refine_unchecked(m))
    }

    pub(crate) fn refine_unchecked(&self, m: usize) -> DepthFunction {
        let mut coeffs = self.coeffs.clone();
        let mut depth = self.depth;
        while depth < m {
            let fan = if depth == 0 { self.spec.alphabet_size() } else { self.spec.alphabet_size() - 1 };
            coeffs = coeffs
                .iter()
                .flat_map(|c| std::iter::repeat_n(c.clone(), fan))
                .collect();
            depth += 1;
        }
        DepthFunction { spec: self.spec, depth, coeffs }
    }

    /// The representation at the least depth carrying the same function.
    pub fn coarsen(&self) -> DepthFunction {
        let mut f = self.clone();
        while f.depth > 0 {
            let fan = if f.depth == 1 { f.spec.alphabet_size() } else { f.spec.alphabet_size() - 1 };
            if !f.coeffs.chunks(fan).all(|block| block.iter().all(|c| *c == block[0])) {
                break;
            }
            f.coeffs = f.coeffs.chunks(fan).map(|block| block[0].clone()).collect();
            f.depth -= 1;
        }
        f
    }

    fn common_depth(&self, other: &DepthFunction) -> Result<(DepthFunction, DepthFunction)> {
        self.spec.check_rank(other.spec.rank())?;
        let depth = self.depth.max(other.depth);
        Ok((self.refine(depth)?, other.refine(depth)?))
    }

    pub fn add(&self, other: &DepthFunction) -> Result<DepthFunction> {
        let (mut a, b) = self.common_depth(other)?;
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        Ok(a)
    }

    pub fn sub(&self, other: &DepthFunction) -> Result<DepthFunction> {
        let (mut a, b) = self.common_depth(other)?;
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        Ok(a)
    }

    pub fn scale(&self, k: &BigInt) -> DepthFunction {
        DepthFunction {
            spec: self.spec,
            depth: self.depth,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn neg(&self) -> DepthFunction {
        self.scale(&BigInt::from(-1))
    }

    pub fn add_constant(&self, k: &BigInt) -> DepthFunction {
        let mut f = self.clone();
        for c in &mut f.coeffs {
            *c += k;
        }
        f
    }

    /// Equality as functions on `∂F_d`.
    pub fn equals(&self, other: &DepthFunction) -> bool {
        if self.spec.rank() != other.spec.rank() {
            return false;
        }
        let depth = self.depth.max(other.depth);
        let a = self.refine_unchecked(depth);
        let b = other.refine_unchecked(depth);
        a.coeffs == b.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| *c == self.coeffs[0])
    }

    /// Whether every value lies in `{0, 1}`, i.e. `f` is a clopen indicator.
    pub fn is_zero_one(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero() || c.is_one())
    }

    pub fn coefficient_sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// `(g·f)(x) = f(g⁻¹·x)`, written at depth `self.depth() + |g|`.
    pub fn act(&self, g: &ReducedWord) -> Result<DepthFunction> {
        self.spec.check_rank(g.rank())?;
        if self.depth == 0 || g.is_empty() {
            return Ok(self.clone());
        }
        let m = self.depth + g.len();
        self.spec.check_depth(m)?;
        let rank = self.spec.rank();
        let g_inv = g.inverse();
        let mut coeffs = Vec::with_capacity(self.spec.word_count(m));
        let mut u = Vec::with_capacity(m);
        for i in 0..self.spec.word_count(m) {
            letters_at_index(rank, m, i, &mut u);
            let k = g_inv
                .letters()
                .iter()
                .rev()
                .zip(u.iter())
                .take_while(|(x, y)| **x == y.inverse())
                .count();
            // first `depth` letters of reduce(g⁻¹ u); |g⁻¹ u| >= depth
            let head = &g_inv.letters()[..g_inv.len() - k];
            let prefix: Vec<Letter> =
                head.iter().chain(u[k..].iter()).take(self.depth).copied().collect();
            coeffs.push(self.coeffs[index_of_letters(rank, &prefix)].clone());
        }
        Ok(DepthFunction { spec: self.spec, depth: m, coeffs })
    }

    /// Value at a boundary point: the coefficient of its depth-`n` prefix.
    pub fn evaluate(&self, x: &BoundaryPoint) -> Result<BigInt> {
        self.spec.check_rank(x.rank())?;
        let prefix = x.prefix_letters(self.depth);
        Ok(self.coeffs[index_of_letters(self.spec.rank(), &prefix)].clone())
    }

    /// Coefficient sum modulo `d - 1`, taken at depth at least 1.
    ///
    /// Refinement from depth `n >= 1` multiplies the sum by `2d - 1 ≡ 1`, so
    /// the residue is a function invariant; it vanishes on `f - s·f`.
    pub fn index_mod(&self) -> IndexResidue {
        let modulus = self.spec.rank() as u64 - 1;
        let sum = if self.depth == 0 {
            &self.coeffs[0] * BigInt::from(self.spec.alphabet_size())
        } else {
            self.coefficient_sum()
        };
        let residue = sum.mod_floor(&BigInt::from(modulus));
        IndexResidue {
            residue: residue.try_into().expect("residue below modulus"),
            modulus,
        }
    }

    /// `Σ_w c_w ε(w)` with `ε(w) = ±1` when `w` ends in `s^{±1}`
    /// (`s` = `generator`) and `0` otherwise.
    ///
    /// The value is unchanged by refinement and by the action, and is zero
    /// on every `f − g·f`, so a nonzero value excludes `im(η)`.
    pub fn last_letter_functional(&self, generator: usize) -> BigInt {
        let mut total = BigInt::zero();
        for (w, c) in self.nonzero_terms() {
            match w.last() {
                Some(l) if l.generator_index() == generator && l.is_inverse() => total -= c,
                Some(l) if l.generator_index() == generator => total += c,
                _ => {}
            }
        }
        total
    }

    /// Nonzero coefficients keyed by cylinder word, in index order.
    pub fn nonzero_terms(&self) -> Vec<(ReducedWord, BigInt)> {
        let words = enumerate_words(&self.spec, self.depth);
        self.coeffs
            .iter()
            .zip(words)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, w)| (w, c.clone()))
            .collect()
    }

    pub fn to_record(&self) -> FunctionRecord {
        FunctionRecord {
            d: self.spec.rank(),
            depth: self.depth,
            nonzero: self
                .nonzero_terms()
                .into_iter()
                .map(|(w, c)| (w.to_string(), c.to_string()))
                .collect(),
        }
    }

    pub fn from_record(spec: &GroupSpec, record: &FunctionRecord) -> Result<DepthFunction> {
        spec.check_rank(record.d)?;
        spec.check_depth(record.depth)?;
        let mut f = DepthFunction::zero(spec, record.depth);
        for (word, value) in &record.nonzero {
            let w = ReducedWord::parse(spec, word)?;
            if w.len() != record.depth {
                return Err(Error::DimensionMismatch { expected: record.depth, found: w.len() });
            }
            let v: BigInt = value.parse().map_err(|_| Error::Parse {
                position: 0,
                message: format!("invalid integer {value:?}"),
            })?;
            f.coeffs[w.index()] = v;
        }
        Ok(f)
    }

    /// Depth-cap check for values built outside the checked constructors.
    pub fn check_cap(&self) -> Result<()> {
        self.spec.check_depth(self.depth)
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl PartialEq for DepthFunction {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for DepthFunction {}

impl fmt::Display for DepthFunction {
    /// Finite sum of cylinder indicators at the least depth, e.g. `p[a] - 2p[B]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coarse = self.coarsen();
        if coarse.depth == 0 {
            return write!(f, "{}", coarse.coeffs[0]);
        }
        let mut first = true;
        for (w, c) in coarse.nonzero_terms() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "p[{w}]")?;
            } else {
                write!(f, "{mag}p[{w}]")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `Σ coeffs mod (d-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexResidue {
    pub residue: u64,
    pub modulus: u64,
}

impl IndexResidue {
    /// For `d = 2` the residue group is trivial and carries no information.
    pub fn is_trivial_modulus(&self) -> bool {
        self.modulus == 1
    }

    pub fn is_obstruction(&self) -> bool {
        self.residue != 0
    }
}

/// Report form `{ d, depth, nonzero: [(word, coefficient)] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub d: usize,
    pub depth: usize,
    pub nonzero: Vec<(String, String)>,
}

/// `g · Cyl(w)` as a signed sum of cylinders (`Cyl(e)` is all of `∂F_d`).
///
/// With `k` letters cancelling in `g·w`: for `k < |w|` the image is
/// `Cyl(gw)`; otherwise `g = g'·w⁻¹` and the image is the complement of
/// `Cyl(g'·ℓ⁻¹)`, `ℓ` the last letter of `w`.
pub fn translate_cylinder(g: &ReducedWord, w: &ReducedWord) -> Vec<(ReducedWord, i32)> {
    let rank = g.rank();
    if w.is_empty() {
        return vec![(ReducedWord::identity(rank), 1)];
    }
    let k = g.cancellation_length(w);
    if k < w.len() {
        return vec![(g.mul_unchecked(w), 1)];
    }
    let base = ReducedWord::from_parts(rank, g.letters()[..g.len() - w.len()].to_vec());
    let last_inv = ReducedWord::letter_power(rank, w.last().expect("nonempty").inverse(), 1);
    let removed = base.mul_unchecked(&last_inv);
    vec![(ReducedWord::identity(rank), 1), (removed, -1)]
}

/// Adds `weight` times the indicator of `Cyl(v)` into a depth-`m` vector.
#[cfg(test)]
pub(crate) fn add_cylinder(spec: &GroupSpec, m: usize, v: &ReducedWord, weight: &BigInt, out: &mut [BigInt]) {
    for i in cylinder_range(spec, m, v) {
        out[i] += weight;
    }
}

/// Indices at depth `m >= |v|` of the words extending `v`; contiguous.
pub(crate) fn cylinder_range(spec: &GroupSpec, m: usize, v: &ReducedWord) -> std::ops::Range<usize> {
    if v.is_empty() {
        return 0..spec.word_count(m);
    }
    let block = (spec.alphabet_size() - 1).pow((m - v.len()) as u32);
    let start = v.index() * block;
    start..start + block
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize) -> GroupSpec {
        GroupSpec::new(d).unwrap()
    }

    fn w(spec: &GroupSpec, s: &str) -> ReducedWord {
        ReducedWord::parse(spec, s).unwrap()
    }

    fn p(spec: &GroupSpec, s: &str) -> DepthFunction {
        DepthFunction::indicator_p(spec, &w(spec, s)).unwrap()
    }

    fn q(spec: &GroupSpec, s: &str) -> DepthFunction {
        DepthFunction::indicator_q(spec, &w(spec, s)).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pt(spec: &GroupSpec, s: &str) -> BoundaryPoint {
        BoundaryPoint::parse(spec, s).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let s = spec(2);
        assert_eq!(p(&s, "a").coeffs(), &ints(&[1, 0, 0, 0])[..]);
        let pab = p(&s, "ab");
        assert_eq!(pab.depth(), 2);
        assert_eq!(pab.coeffs().len(), 12);
        assert_eq!(pab.coefficient_sum(), BigInt::one());
        let mut sum = DepthFunction::zero(&s, 2);
        for word in enumerate_words(&s, 2) {
            sum = sum.add(&DepthFunction::indicator_p(&s, &word).unwrap()).unwrap();
        }
        assert_eq!(sum, DepthFunction::one(&s));
    }

    #[test]
    fn q_examples() {
        let s = spec(2);
        assert_eq!(q(&s, "a").coeffs(), &ints(&[1, 1, 0, 0])[..]);
        assert_eq!(q(&s, "a").add(&q(&s, "b")).unwrap(), DepthFunction::one(&s));
        let qaa = q(&s, "aa");
        let words = enumerate_words(&s, 2);
        let support: Vec<String> = qaa
            .coeffs()
            .iter()
            .zip(&words)
            .filter(|(c, _)| c.is_one())
            .map(|(_, w)| w.to_string())
            .collect();
        assert_eq!(support, ["aa", "AA"]);
        assert_eq!(DepthFunction::indicator_q(&s, &s.identity()), Err(Error::EmptyWord));
    }

    #[test]
    fn refine_examples() {
        let s = spec(2);
        let r = p(&s, "a").refine(2).unwrap();
        let support: Vec<String> =
            r.nonzero_terms().into_iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(support, ["aa", "ab", "aB"]);
        assert!(DepthFunction::one(&s).refine(3).unwrap().coeffs().iter().all(One::is_one));
        let f = DepthFunction::from_coeffs(&s, 1, ints(&[2, -1, 5, 0])).unwrap();
        let sum = f.coefficient_sum();
        assert_eq!(f.refine(3).unwrap().coefficient_sum(), sum * 9);
        assert_eq!(
            p(&s, "ab").refine(1),
            Err(Error::DepthBelow { current: 2, requested: 1 })
        );
    }

    #[test]
    fn depth_cap_is_enforced() {
        let s = spec(2).with_max_depth(3);
        assert_eq!(
            DepthFunction::one(&s).refine(4),
            Err(Error::DepthCap { requested: 4, cap: 3 })
        );
        assert!(p(&s, "aba").act(&w(&s, "b")).is_err());
    }

    #[test]
    fn action_examples() {
        let s = spec(2);
        assert_eq!(p(&s, "a").act(&w(&s, "a")).unwrap(), p(&s, "aa"));
        let expected = DepthFunction::one(&s).sub(&p(&s, "a")).unwrap();
        assert_eq!(p(&s, "A").act(&w(&s, "a")).unwrap(), expected);
        assert_eq!(q(&s, "b").act(&s.identity()).unwrap(), q(&s, "b"));
    }

    #[test]
    fn translate_cylinder_matches_act() {
        let s = spec(2);
        for lg in 0..=3 {
            for g in enumerate_words(&s, lg) {
                for lw in 1..=3 {
                    for word in enumerate_words(&s, lw) {
                        let m = lg + lw;
                        let mut v = vec![BigInt::zero(); s.word_count(m)];
                        for (c, sign) in translate_cylinder(&g, &word) {
                            add_cylinder(&s, m, &c, &BigInt::from(sign), &mut v);
                        }
                        let direct = DepthFunction::indicator_p(&s, &word).unwrap().act(&g).unwrap();
                        assert_eq!(DepthFunction::from_coeffs(&s, m, v).unwrap(), direct, "{g} . p[{word}]");
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let s = spec(2);
        assert_eq!(q(&s, "a").evaluate(&pt(&s, "e|a")).unwrap(), BigInt::one());
        assert_eq!(q(&s, "a").evaluate(&pt(&s, "e|b")).unwrap(), BigInt::zero());
        assert_eq!(p(&s, "ab").evaluate(&pt(&s, "a|b")).unwrap(), BigInt::one());
    }

    #[test]
    fn arithmetic_examples() {
        let s = spec(2);
        assert!(q(&s, "a").sub(&q(&s, "a")).unwrap().is_zero());
        assert!(p(&s, "a").refine(3).unwrap().equals(&p(&s, "a")));
        let f = q(&s, "a").scale(&BigInt::from(2)).add(&q(&s, "b")).unwrap();
        assert_eq!(f.depth(), 1);
        assert_eq!(f.coefficient_sum(), BigInt::from(6));
        assert!(p(&s, "a").add(&DepthFunction::one(&spec(3))).is_err());
    }

    #[test]
    fn index_mod_examples() {
        let s = spec(3);
        assert_eq!(q(&s, "a").index_mod(), IndexResidue { residue: 0, modulus: 2 });
        assert_eq!(DepthFunction::one(&s).refine(1).unwrap().index_mod().residue, 0);
        assert_eq!(DepthFunction::one(&s).index_mod().residue, 0);
        assert_eq!(p(&s, "a").index_mod().residue, 1);
        assert!(q(&spec(2), "a").index_mod().is_trivial_modulus());
        assert_eq!(q(&spec(2), "a").index_mod().residue, 0);
    }

    #[test]
    fn coarsen_and_display() {
        let s = spec(2);
        let f = q(&s, "a").add(&q(&s, "b")).unwrap().refine(3).unwrap();
        assert_eq!(f.coarsen().depth(), 0);
        assert_eq!(f.to_string(), "1");
        assert_eq!(p(&s, "a").sub(&p(&s, "B").scale(&BigInt::from(2))).unwrap().to_string(), "p[a] - 2p[B]");
        assert_eq!(DepthFunction::zero(&s, 2).to_string(), "0");
    }

    #[test]
    fn record_round_trip() {
        let s = spec(3);
        let f = q(&s, "ab").sub(&p(&s, "c").scale(&BigInt::from(7))).unwrap();
        let rec = f.to_record();
        assert_eq!(rec.d, 3);
        assert_eq!(rec.depth, 2);
        assert_eq!(DepthFunction::from_record(&s, &rec).unwrap(), f);
    }
}
