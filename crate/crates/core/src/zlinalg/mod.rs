//! Exact integer linear algebra: Hermite and Smith normal forms with
//! unimodular transforms, kernels, particular solutions and cokernels.
//!
//! Small dense problems go through [`IntMatrix`]; the large, very sparse
//! difference maps use [`SparseMatrix`] and [`ColumnLattice`], which
//! eliminates column by column and never densifies.

mod dense;
mod sparse;

pub use dense::{coker_invariants, hnf, snf, Cokernel, IntMatrix, SmithDecomposition};
pub use sparse::{kernel_basis, solve, ColumnLattice, ColumnMatrix, SparseMatrix, SparseVec};
