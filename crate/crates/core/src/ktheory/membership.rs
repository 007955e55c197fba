//! Certified membership in `im(τ)` at finite depth.
//!
//! For an invariant target `h` the engine solves `η_N x = h` for
//! `N = depth(h) − 1, …, max_depth`, after checking that `ker(η_N)` is the
//! lattice of constant tuples. Every solution is then `x + c` with `c`
//! constant, and constants are invariant, so the coset holds an invariant
//! tuple iff `x` itself is invariant.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{eta, eta_matrix, kernel_from_lattice, FunctionTuple, KernelReport};
use crate::error::{Error, Result};
use crate::functions::{DepthFunction, FunctionRecord, IndexResidue};
use crate::quotient::{constraint_pairs, is_invariant, RelationSpec};
use crate::words::{index_of, GroupSpec, Letter, ReducedWord};
use crate::zlinalg::ColumnLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InImage,
    NotInImage,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InImage => "in_image",
            Verdict::NotInImage => "not_in_image",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Component `generator` of a tuple differs on the constraint pair `(left, right)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub generator: usize,
    pub left: ReducedWord,
    pub right: ReducedWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// An invariant tuple with `η(x) = h`.
    Preimage { depth: usize, tuple: FunctionTuple },
    /// The unique-up-to-constants solution at `depth` is not invariant.
    NonInvariantCoset { depth: usize, particular: FunctionTuple, violation: Violation, kernel_rank: usize },
    /// `Σ coeffs ≢ 0 mod (d − 1)`, while the residue vanishes on `im(η)`.
    IndexObstruction(IndexResidue),
    /// The last-letter functional for `generator` is nonzero on the target.
    FunctionalObstruction { generator: usize, value: BigInt },
    /// No integer solution of `η_N x = h` for any `N ≤ max_depth`.
    Exhausted { max_depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub relation: RelationSpec,
    pub target: DepthFunction,
    pub label: Option<String>,
    pub verdict: Verdict,
    pub witness: Witness,
    pub reason: String,
}

impl MembershipCertificate {
    pub fn preimage(&self) -> Option<&FunctionTuple> {
        match &self.witness {
            Witness::Preimage { tuple, .. } => Some(tuple),
            _ => None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> MembershipCertificate {
        self.label = Some(label.into());
        self
    }

    pub fn to_record(&self) -> CertificateRecord {
        let witness = match &self.witness {
            Witness::Preimage { depth, tuple } => {
                WitnessRecord::Preimage { depth: *depth, preimage: tuple.to_records() }
            }
            Witness::NonInvariantCoset { depth, particular, violation, kernel_rank } => {
                WitnessRecord::NonInvariantCoset {
                    depth: *depth,
                    kernel_rank: *kernel_rank,
                    particular: particular.to_records(),
                    violation: ViolationRecord {
                        component: Letter::generator(violation.generator).to_char().to_string(),
                        left: violation.left.to_string(),
                        right: violation.right.to_string(),
                    },
                }
            }
            Witness::IndexObstruction(r) => {
                WitnessRecord::IndexObstruction { residue: r.residue, modulus: r.modulus }
            }
            Witness::FunctionalObstruction { generator, value } => WitnessRecord::FunctionalObstruction {
                component: Letter::generator(*generator).to_char().to_string(),
                value: value.to_string(),
            },
            Witness::Exhausted { max_depth } => WitnessRecord::Exhausted { max_depth: *max_depth },
        };
        CertificateRecord {
            label: self.label.clone(),
            relation: self.relation.to_string(),
            target: self.target.coarsen().to_record(),
            verdict: self.verdict,
            reason: self.reason.clone(),
            witness,
        }
    }

    pub fn from_record(spec: &GroupSpec, record: &CertificateRecord) -> Result<MembershipCertificate> {
        let relation = RelationSpec::parse(spec, &record.relation)?;
        let target = DepthFunction::from_record(spec, &record.target)?;
        let witness = match &record.witness {
            WitnessRecord::Preimage { depth, preimage } => {
                Witness::Preimage { depth: *depth, tuple: FunctionTuple::from_records(spec, preimage)? }
            }
            WitnessRecord::NonInvariantCoset { depth, kernel_rank, particular, violation } => {
                Witness::NonInvariantCoset {
                    depth: *depth,
                    kernel_rank: *kernel_rank,
                    particular: FunctionTuple::from_records(spec, particular)?,
                    violation: Violation {
                        generator: parse_component(spec, &violation.component)?,
                        left: ReducedWord::parse(spec, &violation.left)?,
                        right: ReducedWord::parse(spec, &violation.right)?,
                    },
                }
            }
            WitnessRecord::IndexObstruction { residue, modulus } => {
                Witness::IndexObstruction(IndexResidue { residue: *residue, modulus: *modulus })
            }
            WitnessRecord::FunctionalObstruction { component, value } => Witness::FunctionalObstruction {
                generator: parse_component(spec, component)?,
                value: value.parse().map_err(|_| Error::Parse {
                    position: 0,
                    message: format!("invalid integer {value:?}"),
                })?,
            },
            WitnessRecord::Exhausted { max_depth } => Witness::Exhausted { max_depth: *max_depth },
        };
        Ok(MembershipCertificate {
            relation,
            target,
            label: record.label.clone(),
            verdict: record.verdict,
            witness,
            reason: record.reason.clone(),
        })
    }
}

fn parse_component(spec: &GroupSpec, text: &str) -> Result<usize> {
    let mut chars = text.chars();
    match (chars.next().and_then(Letter::from_char), chars.next()) {
        (Some(l), None) if !l.is_inverse() && l.generator_index() < spec.rank() => Ok(l.generator_index()),
        _ => Err(Error::Parse { position: 0, message: format!("invalid component {text:?}") }),
    }
}

/// Serialized certificate; integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub label: Option<String>,
    pub relation: String,
    pub target: FunctionRecord,
    pub verdict: Verdict,
    pub reason: String,
    pub witness: WitnessRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRecord {
    Preimage { depth: usize, preimage: Vec<FunctionRecord> },
    NonInvariantCoset { depth: usize, kernel_rank: usize, particular: Vec<FunctionRecord>, violation: ViolationRecord },
    IndexObstruction { residue: u64, modulus: u64 },
    FunctionalObstruction { component: String, value: String },
    Exhausted { max_depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub component: String,
    pub left: String,
    pub right: String,
}

/// Identifies a cached certificate. `input` is a canonical text form of
/// the target (see [`cache_input_text`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertificateKey {
    pub d: usize,
    pub relation: String,
    pub max_depth: usize,
    pub operation: &'static str,
    pub input: String,
}

/// Persistent certificate storage. Loaded certificates are re-verified
/// before use, so a store may return stale or corrupted records.
pub trait CertificateStore {
    fn load(&self, key: &CertificateKey) -> Option<CertificateRecord>;
    fn store(&self, key: &CertificateKey, record: &CertificateRecord);
}

/// `depth:word=coeff,…` of the coarsened function.
pub fn cache_input_text(f: &DepthFunction) -> String {
    let c = f.coarsen();
    let terms: Vec<String> = if c.depth() == 0 {
        vec![format!("e={}", c.coeffs()[0])]
    } else {
        c.nonzero_terms().into_iter().map(|(w, v)| format!("{w}={v}")).collect()
    };
    format!("{}:{}", c.depth(), terms.join(","))
}

struct EtaStage {
    lattice: ColumnLattice,
    kernel: KernelReport,
}

/// Caches the factorized `η_N` per depth across membership queries.
pub struct MembershipEngine {
    spec: GroupSpec,
    stages: BTreeMap<usize, EtaStage>,
    store: Option<Box<dyn CertificateStore>>,
}

impl MembershipEngine {
    pub fn new(spec: GroupSpec) -> MembershipEngine {
        MembershipEngine { spec, stages: BTreeMap::new(), store: None }
    }

    pub fn with_store(mut self, store: Box<dyn CertificateStore>) -> MembershipEngine {
        self.store = Some(store);
        self
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn stage(&mut self, depth: usize) -> Result<&EtaStage> {
        self.spec.check_depth(depth + 1)?;
        if !self.stages.contains_key(&depth) {
            let lattice = ColumnLattice::new(&eta_matrix(&self.spec, depth)?);
            let kernel = kernel_from_lattice(&self.spec, depth, &lattice);
            self.stages.insert(depth, EtaStage { lattice, kernel });
        }
        let stage = &self.stages[&depth];
        if !stage.kernel.constants_spanned {
            return Err(Error::UnverifiedKernel {
                depth,
                rank: stage.kernel.rank,
                constants: stage.kernel.constants_spanned,
            });
        }
        Ok(stage)
    }

    /// `ker(η_N)`, computed once per depth.
    pub fn kernel(&mut self, depth: usize) -> Result<KernelReport> {
        match self.stage(depth) {
            Ok(stage) => Ok(stage.kernel.clone()),
            Err(Error::UnverifiedKernel { .. }) => Ok(self.stages[&depth].kernel.clone()),
            Err(e) => Err(e),
        }
    }

    /// Some depth-`depth` tuple `x` with `η(x) = target`.
    pub fn solve(&mut self, depth: usize, target: &DepthFunction) -> Result<Option<FunctionTuple>> {
        self.spec.check_rank(target.spec().rank())?;
        let b = target.refine(depth + 1)?;
        let spec = self.spec;
        match self.stage(depth)?.lattice.solve(b.coeffs())? {
            Some(x) => Ok(Some(FunctionTuple::from_vector(&spec, depth, &x)?)),
            None => Ok(None),
        }
    }

    /// Decides whether the invariant function `target` lies in `im(τ)`.
    pub fn im_tau_membership(
        &mut self,
        rel: &RelationSpec,
        target: &DepthFunction,
        max_depth: usize,
    ) -> Result<MembershipCertificate> {
        self.spec.check_rank(rel.group().rank())?;
        self.spec.check_rank(target.spec().rank())?;
        self.spec.check_depth(max_depth + 1)?;
        if !is_invariant(rel, target)? {
            return Err(Error::Precondition(format!("target {target} is not {rel}-invariant")));
        }
        let key = CertificateKey {
            d: self.spec.rank(),
            relation: rel.to_string(),
            max_depth,
            operation: "membership",
            input: cache_input_text(target),
        };
        if let Some(record) = self.store.as_ref().and_then(|s| s.load(&key)) {
            if let Ok(cert) = MembershipCertificate::from_record(&self.spec, &record) {
                if cert.relation == *rel && cert.target == *target && self.verify(&cert).unwrap_or(false) {
                    return Ok(cert);
                }
            }
        }
        let cert = self.decide(rel, target, max_depth)?;
        if let Some(store) = &self.store {
            store.store(&key, &cert.to_record());
        }
        Ok(cert)
    }

    fn decide(&mut self, rel: &RelationSpec, target: &DepthFunction, max_depth: usize) -> Result<MembershipCertificate> {
        let make = |verdict, witness, reason: String| MembershipCertificate {
            relation: rel.clone(),
            target: target.clone(),
            label: None,
            verdict,
            witness,
            reason,
        };
        let residue = target.index_mod();
        if residue.is_obstruction() {
            let reason = format!(
                "coefficient sum is {} mod {}, but every element of im(eta) has sum 0 mod {}",
                residue.residue, residue.modulus, residue.modulus
            );
            return Ok(make(Verdict::NotInImage, Witness::IndexObstruction(residue), reason));
        }
        for generator in 0..self.spec.rank() {
            let value = target.last_letter_functional(generator);
            if !value.is_zero() {
                let reason = format!(
                    "the last-letter functional for {} takes the value {value} on h and vanishes on im(eta)",
                    Letter::generator(generator).to_char()
                );
                return Ok(make(Verdict::NotInImage, Witness::FunctionalObstruction { generator, value }, reason));
            }
        }
        for depth in target.depth().saturating_sub(1)..=max_depth {
            let Some(x) = self.solve(depth, target)? else { continue };
            let kernel_rank = self.stages[&depth].kernel.rank;
            return Ok(match x.first_violation(rel)? {
                None => make(
                    Verdict::InImage,
                    Witness::Preimage { depth, tuple: x },
                    format!("invariant preimage at depth {depth}"),
                ),
                Some(violation) => {
                    let reason = format!(
                        "at depth {depth} the solutions of eta(x) = h are x0 + constants and \
                         component {} of x0 differs on {} and {}",
                        Letter::generator(violation.generator).to_char(),
                        violation.left,
                        violation.right
                    );
                    make(
                        Verdict::NotInImage,
                        Witness::NonInvariantCoset { depth, particular: x, violation, kernel_rank },
                        reason,
                    )
                }
            });
        }
        Ok(make(
            Verdict::Unknown,
            Witness::Exhausted { max_depth },
            format!("no integer solution of eta(x) = h at depths up to {max_depth}"),
        ))
    }

    /// Re-checks a certificate from its witness data alone.
    pub fn verify(&mut self, cert: &MembershipCertificate) -> Result<bool> {
        if !is_invariant(&cert.relation, &cert.target)? {
            return Ok(false);
        }
        match (&cert.verdict, &cert.witness) {
            (Verdict::InImage, Witness::Preimage { tuple, .. }) => {
                Ok(tuple.is_invariant(&cert.relation)? && eta(tuple)? == cert.target)
            }
            (Verdict::NotInImage, Witness::NonInvariantCoset { depth, particular, violation, .. }) => {
                if particular.depth() != *depth || eta(particular)? != cert.target {
                    return Ok(false);
                }
                let (i, j) = (index_of(&self.spec, &violation.left)?, index_of(&self.spec, &violation.right)?);
                if violation.left.len() != *depth || violation.right.len() != *depth {
                    return Ok(false);
                }
                let is_pair = constraint_pairs(&cert.relation, *depth)
                    .pairs
                    .iter()
                    .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i));
                let f = particular.component(violation.generator);
                if !is_pair || f.coeffs()[i] == f.coeffs()[j] {
                    return Ok(false);
                }
                Ok(self.kernel(*depth)?.constants_spanned)
            }
            (Verdict::NotInImage, Witness::IndexObstruction(r)) => Ok(cert.target.index_mod() == *r && r.is_obstruction()),
            (Verdict::NotInImage, Witness::FunctionalObstruction { generator, value }) => Ok(*generator
                < self.spec.rank()
                && !value.is_zero()
                && cert.target.last_letter_functional(*generator) == *value),
            (Verdict::Unknown, Witness::Exhausted { .. }) => Ok(true),
            _ => Ok(false),
        }
    }
}

/// One-shot membership query; see [`MembershipEngine::im_tau_membership`].
pub fn im_tau_membership(rel: &RelationSpec, target: &DepthFunction, max_depth: usize) -> Result<MembershipCertificate> {
    MembershipEngine::new(*rel.group()).im_tau_membership(rel, target, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::rc::Rc;

    fn q(spec: &GroupSpec, s: &str) -> DepthFunction {
        DepthFunction::indicator_q(spec, &ReducedWord::parse(spec, s).unwrap()).unwrap()
    }

    fn combo(spec: &GroupSpec, n: &[i64]) -> DepthFunction {
        let mut f = DepthFunction::zero(spec, 1);
        for (s, &c) in n.iter().enumerate() {
            let g = spec.generator(s).unwrap();
            f = f.add(&DepthFunction::indicator_q(spec, &g).unwrap().scale(&BigInt::from(c))).unwrap();
        }
        f
    }

    #[test]
    fn q_difference_not_in_image_full() {
        let spec = GroupSpec::new(2).unwrap();
        let rel = RelationSpec::full(spec);
        let h = q(&spec, "a").sub(&q(&spec, "b")).unwrap();
        let mut engine = MembershipEngine::new(spec);
        let cert = engine.im_tau_membership(&rel, &h, 3).unwrap();
        assert_eq!(cert.verdict, Verdict::NotInImage);
        assert!(engine.verify(&cert).unwrap());
        assert!(matches!(cert.witness, Witness::NonInvariantCoset { depth: 1, kernel_rank: 2, .. }));
    }

    #[test]
    fn index_obstruction_short_circuits() {
        let spec = GroupSpec::new(4).unwrap();
        let rel = RelationSpec::full(spec);
        let cert = im_tau_membership(&rel, &combo(&spec, &[1, 0, 0, 0]), 3).unwrap();
        assert_eq!(cert.verdict, Verdict::NotInImage);
        assert_eq!(cert.witness, Witness::IndexObstruction(IndexResidue { residue: 2, modulus: 3 }));
    }

    #[test]
    fn functional_obstruction_for_p() {
        let spec = GroupSpec::new(3).unwrap();
        let rel = RelationSpec::new(spec, [0]).unwrap();
        let p = DepthFunction::indicator_p(&spec, &ReducedWord::parse(&spec, "b").unwrap()).unwrap();
        let mut engine = MembershipEngine::new(spec);
        let cert = engine.im_tau_membership(&rel, &p.scale(&BigInt::from(2)), 3).unwrap();
        assert_eq!(cert.witness, Witness::FunctionalObstruction { generator: 1, value: BigInt::from(2) });
        assert!(engine.verify(&cert).unwrap());
    }

    #[test]
    fn sum_of_two_q_in_image_without_c() {
        let spec = GroupSpec::new(3).unwrap();
        let rel = RelationSpec::new(spec, [0, 1]).unwrap();
        let cert = im_tau_membership(&rel, &combo(&spec, &[1, 1, 0]), 3).unwrap();
        assert_eq!(cert.verdict, Verdict::InImage);
        let full = im_tau_membership(&RelationSpec::full(spec), &combo(&spec, &[1, 1, 0]), 3).unwrap();
        assert_eq!(full.verdict, Verdict::NotInImage);
    }

    #[test]
    fn q_minus_one_not_in_image_d2() {
        let spec = GroupSpec::new(2).unwrap();
        let h = q(&spec, "a").add_constant(&BigInt::from(-1));
        let cert = im_tau_membership(&RelationSpec::full(spec), &h, 6).unwrap();
        assert_eq!(cert.verdict, Verdict::NotInImage);
        assert!(matches!(cert.witness, Witness::NonInvariantCoset { .. }));
    }

    #[test]
    fn relation_in_image_for_partial() {
        let spec = GroupSpec::new(3).unwrap();
        let rel = RelationSpec::new(spec, [0]).unwrap();
        // (d - |F| - 1)·1 + q[a] = 1 + q[a]
        let h = q(&spec, "a").add_constant(&BigInt::from(1));
        let mut engine = MembershipEngine::new(spec);
        let cert = engine.im_tau_membership(&rel, &h, 3).unwrap();
        assert_eq!(cert.verdict, Verdict::InImage, "{}", cert.reason);
        assert!(engine.verify(&cert).unwrap());
        let p = cert.preimage().unwrap();
        assert_eq!(eta(p).unwrap(), h);
    }

    #[test]
    fn non_invariant_target_rejected() {
        let spec = GroupSpec::new(2).unwrap();
        let rel = RelationSpec::full(spec);
        let p = DepthFunction::indicator_p(&spec, &ReducedWord::parse(&spec, "a").unwrap()).unwrap();
        assert!(matches!(im_tau_membership(&rel, &p, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn record_round_trip_and_tamper() {
        let spec = GroupSpec::new(2).unwrap();
        let rel = RelationSpec::new(spec, [0]).unwrap();
        let h = q(&spec, "a");
        let mut engine = MembershipEngine::new(spec);
        let cert = engine.im_tau_membership(&rel, &h, 3).unwrap().with_label("q[a]");
        let back = MembershipCertificate::from_record(&spec, &cert.to_record()).unwrap();
        assert_eq!(back, cert);
        assert!(engine.verify(&back).unwrap());
        let mut forged = cert.clone();
        forged.target = q(&spec, "b");
        assert!(!engine.verify(&forged).unwrap());
    }

    #[derive(Default, Clone)]
    struct MemStore(Rc<RefCell<HashMap<String, CertificateRecord>>>);

    impl CertificateStore for MemStore {
        fn load(&self, key: &CertificateKey) -> Option<CertificateRecord> {
            self.0.borrow().get(&key.input).cloned()
        }
        fn store(&self, key: &CertificateKey, record: &CertificateRecord) {
            self.0.borrow_mut().insert(key.input.clone(), record.clone());
        }
    }

    #[test]
    fn corrupted_store_entry_is_recomputed() {
        let spec = GroupSpec::new(2).unwrap();
        let rel = RelationSpec::full(spec);
        let h = q(&spec, "a").sub(&q(&spec, "b")).unwrap();
        let store = MemStore::default();
        let mut engine = MembershipEngine::new(spec).with_store(Box::new(store.clone()));
        let first = engine.im_tau_membership(&rel, &h, 2).unwrap();
        for record in store.0.borrow_mut().values_mut() {
            record.verdict = Verdict::InImage;
        }
        let second = engine.im_tau_membership(&rel, &h, 2).unwrap();
        assert_eq!(first, second);
    }
}
