//! The difference maps `η : (f_s)_{s∈S} ↦ Σ_s (f_s − s·f_s)` and its
//! restriction `τ` to `R_F`-invariant tuples, at finite cylinder depth.
//!
//! `η_n` sends depth-`n` tuples to depth-`n+1` functions. Columns of the
//! matrix are grouped by generator `s`, then by the order of `W_n`.

mod identities;
mod membership;
mod report;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functions::{cylinder_range, translate_cylinder, DepthFunction, FunctionRecord};
use crate::quotient::{constraint_pairs, merged_classes, MergedClasses, RelationSpec};
use crate::words::{enumerate_words, GroupSpec, ReducedWord};
use crate::zlinalg::{ColumnLattice, IntMatrix, SparseMatrix};

pub use identities::{
    explicit_preimage, verify_explicit_preimage, verify_projection_identities, IdentityCheck,
    IdentityReport,
};
pub use membership::{
    cache_input_text, im_tau_membership, CertificateKey, CertificateRecord, CertificateStore, MembershipCertificate,
    MembershipEngine, Verdict, Violation, ViolationRecord, Witness, WitnessRecord,
};
pub use report::{
    combination_label, k_report, k_report_with, CertificateSummary, K0Section, K1Section, KReport,
    KReportOptions, KernelRank, Timings, UnitDecomposition,
};

/// One depth-`n` function per generator `s ∈ S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTuple {
    components: Vec<DepthFunction>,
}

impl FunctionTuple {
    /// Components are promoted to their common depth.
    pub fn new(components: Vec<DepthFunction>) -> Result<FunctionTuple> {
        let first = components.first().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        let spec = *first.spec();
        if components.len() != spec.rank() {
            return Err(Error::DimensionMismatch { expected: spec.rank(), found: components.len() });
        }
        let depth = components.iter().map(DepthFunction::depth).max().unwrap_or(0);
        let components = components
            .iter()
            .map(|f| {
                spec.check_rank(f.spec().rank())?;
                f.refine(depth)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionTuple { components })
    }

    pub fn zero(spec: &GroupSpec, depth: usize) -> FunctionTuple {
        FunctionTuple { components: vec![DepthFunction::zero(spec, depth); spec.rank()] }
    }

    pub fn constants(spec: &GroupSpec, values: &[BigInt]) -> Result<FunctionTuple> {
        FunctionTuple::new(values.iter().map(|v| DepthFunction::constant(spec, v.clone())).collect())
    }

    /// Inverse of [`FunctionTuple::to_vector`].
    pub fn from_vector(spec: &GroupSpec, depth: usize, v: &[BigInt]) -> Result<FunctionTuple> {
        let block = spec.word_count(depth);
        if v.len() != block * spec.rank() {
            return Err(Error::DimensionMismatch { expected: block * spec.rank(), found: v.len() });
        }
        let components = v
            .chunks(block)
            .map(|c| DepthFunction::from_coeffs(spec, depth, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionTuple { components })
    }

    /// Coordinates in the column order of [`eta_matrix`].
    pub fn to_vector(&self) -> Vec<BigInt> {
        self.components.iter().flat_map(|f| f.coeffs().iter().cloned()).collect()
    }

    pub fn spec(&self) -> &GroupSpec {
        self.components[0].spec()
    }

    pub fn depth(&self) -> usize {
        self.components[0].depth()
    }

    pub fn components(&self) -> &[DepthFunction] {
        &self.components
    }

    pub fn component(&self, generator: usize) -> &DepthFunction {
        &self.components[generator]
    }

    pub fn refine(&self, depth: usize) -> Result<FunctionTuple> {
        Ok(FunctionTuple {
            components: self.components.iter().map(|f| f.refine(depth)).collect::<Result<_>>()?,
        })
    }

    /// The first component and constraint pair on which invariance fails.
    pub fn first_violation(&self, rel: &RelationSpec) -> Result<Option<Violation>> {
        rel.group().check_rank(self.spec().rank())?;
        let pairs = constraint_pairs(rel, self.depth()).pairs;
        let words = enumerate_words(self.spec(), self.depth());
        for (s, f) in self.components.iter().enumerate() {
            if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| f.coeffs()[i] != f.coeffs()[j]) {
                return Ok(Some(Violation {
                    generator: s,
                    left: words[i].clone(),
                    right: words[j].clone(),
                }));
            }
        }
        Ok(None)
    }

    pub fn is_invariant(&self, rel: &RelationSpec) -> Result<bool> {
        Ok(self.first_violation(rel)?.is_none())
    }

    pub fn to_records(&self) -> Vec<FunctionRecord> {
        self.components.iter().map(DepthFunction::to_record).collect()
    }

    pub fn from_records(spec: &GroupSpec, records: &[FunctionRecord]) -> Result<FunctionTuple> {
        FunctionTuple::new(
            records.iter().map(|r| DepthFunction::from_record(spec, r)).collect::<Result<_>>()?,
        )
    }
}

/// `η((f_s)) = Σ_s (f_s − s·f_s)`, written at depth `n + 1`.
pub fn eta(tuple: &FunctionTuple) -> Result<DepthFunction> {
    let spec = *tuple.spec();
    let depth = tuple.depth() + 1;
    let mut total = DepthFunction::zero(&spec, depth);
    for (s, f) in tuple.components().iter().enumerate() {
        let moved = f.act(&spec.generator(s)?)?;
        total = total.add(&f.refine(depth)?.sub(&moved.refine(depth)?)?)?;
    }
    Ok(total)
}

/// Column of `η_n` for the tuple with `p[w]` in slot `s` and zeros elsewhere.
fn eta_column(spec: &GroupSpec, s: &ReducedWord, w: &ReducedWord, depth: usize) -> Vec<(usize, BigInt)> {
    let m = depth + 1;
    let mut entries: Vec<(usize, BigInt)> =
        cylinder_range(spec, m, w).map(|i| (i, BigInt::one())).collect();
    for (v, sign) in translate_cylinder(s, w) {
        let weight = BigInt::from(-sign);
        entries.extend(cylinder_range(spec, m, &v).map(|i| (i, weight.clone())));
    }
    entries
}

/// Matrix of `η_n : (ℤ^{W_n})^{⊕S} → ℤ^{W_{n+1}}`.
pub fn eta_matrix(spec: &GroupSpec, depth: usize) -> Result<SparseMatrix> {
    spec.check_depth(depth + 1)?;
    let words = enumerate_words(spec, depth);
    let mut m = SparseMatrix::new(spec.word_count(depth + 1));
    for s in 0..spec.rank() {
        let generator = spec.generator(s)?;
        for w in &words {
            m.push_column(eta_column(spec, &generator, w, depth))?;
        }
    }
    Ok(m)
}

/// `τ_n` in the bases of merged-class indicators.
#[derive(Clone, Debug)]
pub struct TauMatrix {
    pub matrix: SparseMatrix,
    pub domain: MergedClasses,
    pub codomain: MergedClasses,
}

pub fn tau_matrix(rel: &RelationSpec, depth: usize) -> Result<TauMatrix> {
    let spec = *rel.group();
    spec.check_depth(depth + 1)?;
    let domain = merged_classes(rel, depth);
    let codomain = merged_classes(rel, depth + 1);
    let words = enumerate_words(&spec, depth);
    let size = spec.word_count(depth + 1);
    let mut matrix = SparseMatrix::new(codomain.len());
    for s in 0..spec.rank() {
        let generator = spec.generator(s)?;
        for members in &domain.members {
            let mut image = vec![BigInt::zero(); size];
            for &i in members {
                for (row, v) in eta_column(&spec, &generator, &words[i], depth) {
                    image[row] += v;
                }
            }
            let mut column = Vec::new();
            for (c, class) in codomain.members.iter().enumerate() {
                let value = &image[class[0]];
                if class.iter().any(|&i| image[i] != *value) {
                    return Err(Error::Internal(format!(
                        "eta of an invariant tuple is not invariant (generator {s}, depth {depth})"
                    )));
                }
                if !value.is_zero() {
                    column.push((c, value.clone()));
                }
            }
            matrix.push_column(column)?;
        }
    }
    Ok(TauMatrix { matrix, domain, codomain })
}

/// Kernel of `η_n` or `τ_n` and whether it is exactly the lattice of
/// constant tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub depth: usize,
    pub rank: usize,
    pub constants_spanned: bool,
    pub basis: Vec<Vec<BigInt>>,
}

/// `block_of[i]` and `weights` describe a coordinate system in which a
/// constant tuple `(c_s)` has coordinate `c_s` at every position of block
/// `s`. The kernel equals the constants iff it has rank `d`, every basis
/// vector is blockwise constant, and the `d × d` matrix of block values is
/// unimodular.
fn kernel_report(depth: usize, rank_d: usize, block: usize, basis: Vec<Vec<BigInt>>) -> KernelReport {
    let rank = basis.len();
    let mut spanned = rank == rank_d;
    let mut values = IntMatrix::zeros(rank, rank_d);
    for (k, v) in basis.iter().enumerate() {
        for s in 0..rank_d {
            let chunk = &v[s * block..(s + 1) * block];
            if chunk.iter().any(|x| *x != chunk[0]) {
                spanned = false;
            }
            values[(k, s)] = chunk[0].clone();
        }
    }
    if spanned {
        spanned = values.is_unimodular();
    }
    KernelReport { depth, rank, constants_spanned: spanned, basis }
}

pub(crate) fn kernel_from_lattice(spec: &GroupSpec, depth: usize, lattice: &ColumnLattice) -> KernelReport {
    kernel_report(depth, spec.rank(), spec.word_count(depth), lattice.kernel_basis())
}

/// `ker(η_n)`; the expected answer is the rank-`d` lattice of constant tuples.
pub fn kernel_eta(spec: &GroupSpec, depth: usize) -> Result<KernelReport> {
    let lattice = ColumnLattice::new(&eta_matrix(spec, depth)?);
    Ok(kernel_from_lattice(spec, depth, &lattice))
}

/// `ker(τ_n)` in class-indicator coordinates.
pub fn kernel_tau(rel: &RelationSpec, depth: usize) -> Result<KernelReport> {
    let tau = tau_matrix(rel, depth)?;
    let basis = ColumnLattice::new(&tau.matrix).kernel_basis();
    Ok(kernel_report(depth, rel.group().rank(), tau.domain.len(), basis))
}
