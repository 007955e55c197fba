//! Exact combinatorics of the boundary `∂F_d` of a free group and of its
//! quotients `∂F_d / R_F`: words, cylinder functions, quotient relations,
//! integer normal forms, the difference maps `η` and `τ` with checkable
//! membership certificates, and orbit invariants of eventually periodic
//! points.

pub mod error;
pub mod functions;
pub mod ktheory;
pub mod orbits;
pub mod quotient;
pub mod selftest;
pub mod words;
pub mod zlinalg;

pub use error::{Error, Result};
pub use functions::{DepthFunction, FunctionRecord, IndexResidue};
pub use ktheory::{
    FunctionTuple, KReport, KernelReport, MembershipCertificate, MembershipEngine, Verdict,
};
pub use orbits::{BoundaryPoint, CoeVerdict, OrbitCount};
pub use quotient::{ConstraintSystem, MergedClasses, RelationSpec};
pub use words::{GroupSpec, Letter, ReducedWord};
pub use zlinalg::{IntMatrix, SmithDecomposition, SparseMatrix};
