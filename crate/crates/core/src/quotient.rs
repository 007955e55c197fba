//! The relations `R_F` (`∅ ≠ F ⊆ S`) identifying `g·s^{+∞}` with `g·s^{-∞}`
//! for `s ∈ F`, seen through depth-`n` cylinders.
//!
//! A depth-`n` function factors through `∂F_d / R_F` exactly when it agrees
//! on the two depth-`n` prefixes of every identified pair. Only `|g| < n`
//! matters: for longer `g` both points share the prefix of `g`.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::functions::DepthFunction;
use crate::words::{enumerate_words, words_shorter_than, GroupSpec, Letter, ReducedWord};

/// The pair `(d, F)` defining `R_F` and the system `φ_F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationSpec {
    spec: GroupSpec,
    generators: Vec<usize>,
}

impl RelationSpec {
    pub fn new(spec: GroupSpec, generators: impl IntoIterator<Item = usize>) -> Result<RelationSpec> {
        let set: BTreeSet<usize> = generators.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidRelation("the generator subset F must be nonempty".into()));
        }
        for &s in &set {
            spec.check_generator(s)?;
        }
        Ok(RelationSpec { spec, generators: set.into_iter().collect() })
    }

    /// `R_S`, the relation over all canonical generators.
    pub fn full(spec: GroupSpec) -> RelationSpec {
        RelationSpec { spec, generators: (0..spec.rank()).collect() }
    }

    /// Parses a comma-separated list of generator letters, e.g. `"a,b"`.
    pub fn parse(spec: &GroupSpec, text: &str) -> Result<RelationSpec> {
        let mut generators = Vec::new();
        let mut offset = 0;
        for item in text.split(',') {
            let trimmed = item.trim();
            let mut chars = trimmed.chars();
            match (chars.next(), chars.next()) {
                (Some(c @ 'a'..='z'), None) => {
                    let index = c as usize - 'a' as usize;
                    if index >= spec.rank() {
                        return Err(Error::Parse {
                            position: offset,
                            message: format!("generator {c:?} is out of range for rank {}", spec.rank()),
                        });
                    }
                    generators.push(index);
                }
                _ => {
                    return Err(Error::Parse {
                        position: offset,
                        message: format!("expected a lowercase generator letter, found {trimmed:?}"),
                    })
                }
            }
            offset += item.len() + 1;
        }
        RelationSpec::new(*spec, generators)
    }

    /// Every nonempty `F ⊆ S`, by increasing size, then lexicographically.
    pub fn all_nonempty(spec: GroupSpec) -> Vec<RelationSpec> {
        let d = spec.rank();
        let mut subsets: Vec<Vec<usize>> = (1u32..(1 << d))
            .map(|mask| (0..d).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        subsets
            .into_iter()
            .map(|generators| RelationSpec { spec, generators })
            .collect()
    }

    pub fn group(&self) -> &GroupSpec {
        &self.spec
    }

    /// Generator indices in `F`, ascending.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains(&self, generator: usize) -> bool {
        self.generators.binary_search(&generator).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.generators.len() == self.spec.rank()
    }
}

impl fmt::Display for RelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> =
            self.generators.iter().map(|&s| Letter::generator(s).to_string()).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Pairs of depth-`n` cylinder indices on which invariant functions agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub depth: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// `(g s^{n-|g|}, g s^{-(n-|g|)})` for `s ∈ F` and reduced `g`, `|g| < n`,
/// not ending in `s^{±1}`; ordered by `s`, then `|g|`, then `g`.
pub fn constraint_pairs(rel: &RelationSpec, depth: usize) -> ConstraintSystem {
    let spec = rel.group();
    let shorter = words_shorter_than(spec, depth);
    let mut pairs = Vec::new();
    for &s in rel.generators() {
        let letter = Letter::generator(s);
        for g in &shorter {
            if g.last().is_some_and(|l| l.generator_index() == s) {
                continue;
            }
            let k = (depth - g.len()) as i64;
            let plus = g.mul_unchecked(&ReducedWord::letter_power(spec.rank(), letter, k));
            let minus = g.mul_unchecked(&ReducedWord::letter_power(spec.rank(), letter, -k));
            pairs.push((plus.index(), minus.index()));
        }
    }
    ConstraintSystem { depth, pairs }
}

/// Connected components of the constraint graph on `W_n`, numbered by
/// least member index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedClasses {
    pub depth: usize,
    /// Class id of every depth-`n` cylinder.
    pub class_of_index: Vec<usize>,
    /// Members of each class in ascending index order.
    pub members: Vec<Vec<usize>>,
}

impl MergedClasses {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn merged_classes(rel: &RelationSpec, depth: usize) -> MergedClasses {
    let size = rel.group().word_count(depth);
    let mut uf = UnionFind::<usize>::new(size);
    for (i, j) in constraint_pairs(rel, depth).pairs {
        uf.union(i, j);
    }
    let mut root_class = vec![usize::MAX; size];
    let mut class_of_index = vec![0; size];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, class) in class_of_index.iter_mut().enumerate() {
        let root = uf.find(i);
        if root_class[root] == usize::MAX {
            root_class[root] = members.len();
            members.push(Vec::new());
        }
        *class = root_class[root];
        members[*class].push(i);
    }
    MergedClasses { depth, class_of_index, members }
}

/// Whether `f` is constant on `R_F`-classes.
pub fn is_invariant(rel: &RelationSpec, f: &DepthFunction) -> Result<bool> {
    Ok(first_violation(rel, f)?.is_none())
}

/// The first constraint pair on which `f` takes different values.
pub fn first_violation(rel: &RelationSpec, f: &DepthFunction) -> Result<Option<(usize, usize)>> {
    rel.group().check_rank(f.spec().rank())?;
    let coeffs = f.coeffs();
    Ok(constraint_pairs(rel, f.depth())
        .pairs
        .into_iter()
        .find(|&(i, j)| coeffs[i] != coeffs[j]))
}

/// Indicators of the merged classes at depth `n`: a ℤ-basis of the
/// depth-`n` functions on `∂F_d / R_F`.
pub fn invariant_basis(rel: &RelationSpec, depth: usize) -> Result<Vec<DepthFunction>> {
    let classes = merged_classes(rel, depth);
    classes
        .members
        .iter()
        .map(|m| DepthFunction::indicator_of_indices(rel.group(), depth, m))
        .collect()
}

pub use crate::orbits::class_of;

/// Whether the translates `w · q[s]` (`|w| < n`, `s ∈ S`) take distinct
/// value tuples on distinct merged classes of `R_S` at depth `n`.
pub fn separates(rel: &RelationSpec, depth: usize) -> Result<bool> {
    if !rel.is_full() {
        return Err(Error::Precondition("point separation is checked for F = S only".into()));
    }
    if depth == 0 {
        return Err(Error::Precondition("separation needs depth at least 1".into()));
    }
    let spec = rel.group();
    let classes = merged_classes(rel, depth);
    let mut probes = Vec::new();
    for w in words_shorter_than(spec, depth) {
        for s in 0..spec.rank() {
            let q = DepthFunction::indicator_q(spec, &spec.generator(s)?)?;
            probes.push(q.act(&w)?.refine(depth)?);
        }
    }
    let mut signatures: Vec<Vec<&num_bigint::BigInt>> = Vec::with_capacity(classes.len());
    for members in &classes.members {
        let rep = members[0];
        for f in &probes {
            if members.iter().any(|&i| f.coeffs()[i] != f.coeffs()[rep]) {
                return Err(Error::Internal("translate of q[s] is not R_S-invariant".into()));
            }
        }
        signatures.push(probes.iter().map(|f| &f.coeffs()[rep]).collect());
    }
    let distinct: BTreeSet<&Vec<&num_bigint::BigInt>> = signatures.iter().collect();
    Ok(distinct.len() == signatures.len())
}

/// For each merged class at depth `n`, the number of depth-`n+1` classes
/// covering its refinement. Fails if a depth-`n+1` class straddles two
/// depth-`n` classes.
pub fn split_counts(rel: &RelationSpec, depth: usize) -> Result<Vec<usize>> {
    let spec = rel.group();
    let coarse = merged_classes(rel, depth);
    let fine = merged_classes(rel, depth + 1);
    let parent_of = |child: usize| -> usize {
        if depth == 0 {
            0
        } else {
            child / (spec.alphabet_size() - 1)
        }
    };
    let mut owner = vec![usize::MAX; fine.len()];
    let mut counts = vec![0usize; coarse.len()];
    for (c, members) in fine.members.iter().enumerate() {
        for &child in members {
            let p = coarse.class_of_index[parent_of(child)];
            if owner[c] == usize::MAX {
                owner[c] = p;
                counts[p] += 1;
            } else if owner[c] != p {
                return Err(Error::Internal(format!(
                    "class {c} at depth {} meets two classes at depth {depth}",
                    depth + 1
                )));
            }
        }
    }
    Ok(counts)
}

/// Words of a merged class, for display.
pub fn class_words(rel: &RelationSpec, classes: &MergedClasses, class: usize) -> Vec<ReducedWord> {
    let words = enumerate_words(rel.group(), classes.depth);
    classes.members[class].iter().map(|&i| words[i].clone()).collect()
}
