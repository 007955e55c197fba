//! Freely reduced words in the free group `F_d`.
//!
//! Letters are ordered `a < A < b < B < ...` (a generator precedes its
//! inverse, generators in index order). Every matrix index and every report
//! in the crate is laid out in this order, so it must never change.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest rank with a one-character text encoding per generator.
pub const MAX_RANK: usize = 26;

/// Default cap on cylinder depth for function arithmetic.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// A generator or inverse generator of `F_d`.
///
/// The packed code is `2 * generator + inverse`, which makes the derived
/// ordering the canonical letter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator < MAX_RANK, "generator index {generator} too large");
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn generator(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    pub fn from_code(code: usize) -> Letter {
        Letter::new(code / 2, code % 2 == 1)
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn generator_index(self) -> usize {
        (self.0 / 2) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    /// `+1` for a generator, `-1` for an inverse generator.
    pub fn sign(self) -> i8 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator_index() as u8) as char
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// The rank `d` of the free group together with the depth cap used by
/// function arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    rank: usize,
    max_depth: usize,
}

impl GroupSpec {
    pub fn new(rank: usize) -> Result<GroupSpec> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::InvalidRank(rank));
        }
        Ok(GroupSpec { rank, max_depth: DEFAULT_MAX_DEPTH })
    }

    pub fn with_max_depth(self, max_depth: usize) -> GroupSpec {
        GroupSpec { max_depth, ..self }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Number of letters, `2d`.
    #[inline]
    pub fn alphabet_size(&self) -> usize {
        2 * self.rank
    }

    /// Letters in canonical order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.alphabet_size()).map(Letter::from_code)
    }

    /// `|W_n| = 2d (2d-1)^(n-1)` for `n >= 1`, and `1` for `n = 0`.
    pub fn word_count(&self, depth: usize) -> usize {
        if depth == 0 {
            1
        } else {
            self.alphabet_size() * (self.alphabet_size() - 1).pow(depth as u32 - 1)
        }
    }

    pub fn identity(&self) -> ReducedWord {
        ReducedWord::identity(self.rank)
    }

    pub fn generator(&self, index: usize) -> Result<ReducedWord> {
        self.check_generator(index)?;
        Ok(ReducedWord { rank: self.rank, letters: vec![Letter::generator(index)] })
    }

    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.max_depth {
            Err(Error::DepthCap { requested: depth, cap: self.max_depth })
        } else {
            Ok(())
        }
    }

    pub fn check_generator(&self, index: usize) -> Result<()> {
        if index >= self.rank {
            Err(Error::InvalidLetter { index, rank: self.rank })
        } else {
            Ok(())
        }
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        if rank != self.rank {
            Err(Error::RankMismatch { left: self.rank, right: rank })
        } else {
            Ok(())
        }
    }
}

/// A freely reduced word over `S ⊔ S⁻¹`; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex order: by length, then lexicographically in letter order.
impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

/// Freely reduces `raw` with a letter stack.
pub fn reduce(spec: &GroupSpec, raw: &[Letter]) -> Result<ReducedWord> {
    let mut letters: Vec<Letter> = Vec::with_capacity(raw.len());
    for &letter in raw {
        spec.check_generator(letter.generator_index())?;
        if letters.last() == Some(&letter.inverse()) {
            letters.pop();
        } else {
            letters.push(letter);
        }
    }
    Ok(ReducedWord { rank: spec.rank(), letters })
}

fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

impl ReducedWord {
    pub fn identity(rank: usize) -> ReducedWord {
        ReducedWord { rank, letters: Vec::new() }
    }

    /// Builds a word from letters that are already reduced.
    pub fn from_reduced(spec: &GroupSpec, letters: Vec<Letter>) -> Result<ReducedWord> {
        for &l in &letters {
            spec.check_generator(l.generator_index())?;
        }
        if let Some(position) = letters.windows(2).position(|w| w[0] == w[1].inverse()) {
            return Err(Error::NotReduced { position });
        }
        Ok(ReducedWord { rank: spec.rank(), letters })
    }

    /// Internal constructor for letter runs produced by word arithmetic.
    pub(crate) fn from_parts(rank: usize, letters: Vec<Letter>) -> ReducedWord {
        debug_assert!(is_reduced(&letters));
        ReducedWord { rank, letters }
    }

    /// Parses the text form: lowercase letters for generators, uppercase for
    /// inverses, and `e` (ranks up to 4) or the empty string for the identity.
    /// Non-reduced input is rejected.
    pub fn parse(spec: &GroupSpec, text: &str) -> Result<ReducedWord> {
        let text = text.trim();
        if text.is_empty() || (text == "e" && spec.rank() < 5) {
            return Ok(spec.identity());
        }
        let mut letters = Vec::with_capacity(text.len());
        for (position, c) in text.chars().enumerate() {
            let letter = Letter::from_char(c).ok_or_else(|| Error::Parse {
                position,
                message: format!("unexpected character {c:?} in word"),
            })?;
            if letter.generator_index() >= spec.rank() {
                return Err(Error::Parse {
                    position,
                    message: format!("letter {c:?} is out of range for rank {}", spec.rank()),
                });
            }
            letters.push(letter);
        }
        if let Some(position) = letters.windows(2).position(|w| w[0] == w[1].inverse()) {
            return Err(Error::NotReduced { position });
        }
        Ok(ReducedWord { rank: spec.rank(), letters })
    }

    /// `s^k` for a letter `s`; negative exponents use the inverse letter.
    pub fn letter_power(rank: usize, letter: Letter, exponent: i64) -> ReducedWord {
        let l = if exponent < 0 { letter.inverse() } else { letter };
        ReducedWord { rank, letters: vec![l; exponent.unsigned_abs() as usize] }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    fn check_same_rank(&self, other: &ReducedWord) -> Result<()> {
        if self.rank != other.rank {
            Err(Error::RankMismatch { left: self.rank, right: other.rank })
        } else {
            Ok(())
        }
    }

    /// Number of letters cancelled when forming `self · other`.
    pub fn cancellation_length(&self, other: &ReducedWord) -> usize {
        self.letters
            .iter()
            .rev()
            .zip(other.letters.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count()
    }

    pub fn multiply(&self, other: &ReducedWord) -> Result<ReducedWord> {
        self.check_same_rank(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &ReducedWord) -> ReducedWord {
        let k = self.cancellation_length(other);
        let mut letters = Vec::with_capacity(self.len() + other.len() - 2 * k);
        letters.extend_from_slice(&self.letters[..self.len() - k]);
        letters.extend_from_slice(&other.letters[k..]);
        ReducedWord { rank: self.rank, letters }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> ReducedWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = ReducedWord::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul_unchecked(&base);
        }
        out
    }

    /// Maximal runs of a repeated letter, as `(letter, run length)`.
    pub fn syllables(&self) -> Vec<(Letter, usize)> {
        let mut out: Vec<(Letter, usize)> = Vec::new();
        for &l in &self.letters {
            match out.last_mut() {
                Some((last, n)) if *last == l => *n += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }

    /// Flips the sign of the last syllable: `s₁^n₁ ⋯ s_k^n_k ↦ s₁^n₁ ⋯ s_k^(-n_k)`.
    pub fn hat(&self) -> Result<ReducedWord> {
        let (last, run) = *self.syllables().last().ok_or(Error::EmptyWord)?;
        let keep = self.len() - run;
        let mut letters = self.letters[..keep].to_vec();
        letters.extend(std::iter::repeat_n(last.inverse(), run));
        // Adjacent syllables use distinct letters, so nothing cancels.
        Ok(ReducedWord { rank: self.rank, letters })
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self = h · c · h⁻¹` with `c` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (ReducedWord, ReducedWord) {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            ReducedWord { rank: self.rank, letters: self.letters[..k].to_vec() },
            ReducedWord { rank: self.rank, letters: self.letters[k..n - k].to_vec() },
        )
    }

    /// Cyclic left rotation by `k` letters (`uv ↦ vu` with `|u| = k`).
    pub fn rotate_left(&self, k: usize) -> ReducedWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let n = letters.len();
            letters.rotate_left(k % n);
        }
        ReducedWord { rank: self.rank, letters }
    }

    /// Returns `(conjugator, core)` with `self = conjugator · core · conjugator⁻¹`,
    /// `core` cyclically reduced and the least rotation in its class.
    pub fn cyclic_normal_form(&self) -> Result<(ReducedWord, ReducedWord)> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let (outer, cyclic) = self.cyclic_reduction();
        let n = cyclic.len();
        let shift = (0..n)
            .min_by(|&i, &j| {
                let a = cyclic.letters[i..].iter().chain(&cyclic.letters[..i]);
                let b = cyclic.letters[j..].iter().chain(&cyclic.letters[..j]);
                a.cmp(b).then(i.cmp(&j))
            })
            .unwrap_or(0);
        let head = ReducedWord { rank: self.rank, letters: cyclic.letters[..shift].to_vec() };
        Ok((outer.mul_unchecked(&head), cyclic.rotate_left(shift)))
    }

    /// The shortest `r` with `self = r^k` for some `k >= 1`.
    pub fn primitive_root(&self) -> ReducedWord {
        let n = self.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return ReducedWord { rank: self.rank, letters: self.letters[..p].to_vec() };
            }
        }
        self.clone()
    }

    /// Whether `self` and `other` are cyclic rotations of one another; returns
    /// the left shift `k` with `self.rotate_left(k) == other`.
    pub fn rotation_to(&self, other: &ReducedWord) -> Option<usize> {
        if self.len() != other.len() || self.rank != other.rank {
            return None;
        }
        if self.is_empty() {
            return Some(0);
        }
        (0..self.len()).find(|&k| {
            let n = self.len();
            (0..n).all(|i| self.letters[(i + k) % n] == other.letters[i])
        })
    }

    pub fn is_prefix_of(&self, letters: &[Letter]) -> bool {
        letters.len() >= self.len() && letters[..self.len()] == self.letters[..]
    }

    /// Position of this word within [`enumerate_words`] at depth `self.len()`.
    pub fn index(&self) -> usize {
        index_of_letters(self.rank, &self.letters)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            if self.rank < 5 {
                return write!(f, "e");
            }
            return Ok(());
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Rank of `next` among the `2d - 1` letters allowed after `prev`.
#[inline]
pub(crate) fn successor_rank(prev: Letter, next: Letter) -> usize {
    let forbidden = prev.inverse().code();
    let c = next.code();
    debug_assert_ne!(c, forbidden);
    if c > forbidden {
        c - 1
    } else {
        c
    }
}

#[inline]
pub(crate) fn successor_letter(prev: Letter, rank_among: usize) -> Letter {
    let forbidden = prev.inverse().code();
    Letter::from_code(if rank_among >= forbidden { rank_among + 1 } else { rank_among })
}

/// Index of a reduced letter sequence among reduced words of its length.
pub fn index_of_letters(rank: usize, letters: &[Letter]) -> usize {
    let branching = 2 * rank - 1;
    let mut iter = letters.iter();
    let Some(&first) = iter.next() else {
        return 0;
    };
    let mut index = first.code();
    let mut prev = first;
    for &l in iter {
        index = index * branching + successor_rank(prev, l);
        prev = l;
    }
    index
}

/// Inverse of [`index_of_letters`]; writes the letters of word `index` at
/// `depth` into `out`.
pub(crate) fn letters_at_index(rank: usize, depth: usize, mut index: usize, out: &mut Vec<Letter>) {
    out.clear();
    if depth == 0 {
        return;
    }
    let branching = 2 * rank - 1;
    let mut digits = vec![0usize; depth];
    for slot in digits[1..].iter_mut().rev() {
        *slot = index % branching;
        index /= branching;
    }
    digits[0] = index;
    let mut prev = Letter::from_code(digits[0]);
    out.push(prev);
    for &d in &digits[1..] {
        prev = successor_letter(prev, d);
        out.push(prev);
    }
}

/// The word at position `index` among reduced words of length `depth`.
pub fn word_of(spec: &GroupSpec, depth: usize, index: usize) -> Result<ReducedWord> {
    if index >= spec.word_count(depth) {
        return Err(Error::IndexOutOfRange { index, depth });
    }
    let mut letters = Vec::with_capacity(depth);
    letters_at_index(spec.rank(), depth, index, &mut letters);
    Ok(ReducedWord { rank: spec.rank(), letters })
}

/// Index of `word` among reduced words of its length.
pub fn index_of(spec: &GroupSpec, word: &ReducedWord) -> Result<usize> {
    spec.check_rank(word.rank())?;
    Ok(word.index())
}

/// All reduced words of length `depth`, in lexicographic letter order.
pub fn enumerate_words(spec: &GroupSpec, depth: usize) -> Vec<ReducedWord> {
    let mut out = Vec::with_capacity(spec.word_count(depth));
    let mut current: Vec<Letter> = Vec::with_capacity(depth);
    extend_words(spec, depth, &mut current, &mut out);
    out
}

fn extend_words(spec: &GroupSpec, depth: usize, current: &mut Vec<Letter>, out: &mut Vec<ReducedWord>) {
    if current.len() == depth {
        out.push(ReducedWord { rank: spec.rank(), letters: current.clone() });
        return;
    }
    for l in spec.letters() {
        if current.last().is_some_and(|p| *p == l.inverse()) {
            continue;
        }
        current.push(l);
        extend_words(spec, depth, current, out);
        current.pop();
    }
}

/// All reduced words of length below `depth`, shortest first.
pub fn words_shorter_than(spec: &GroupSpec, depth: usize) -> Vec<ReducedWord> {
    (0..depth).flat_map(|n| enumerate_words(spec, n)).collect()
}
