//! Finite-depth consistency report for the K-groups of the quotient.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::membership::{CertificateRecord, MembershipCertificate, MembershipEngine, Verdict};
use super::kernel_tau;
use crate::error::{Error, Result};
use crate::functions::DepthFunction;
use crate::quotient::RelationSpec;
use crate::words::{GroupSpec, Letter};

#[derive(Clone, Debug)]
pub struct KReportOptions {
    /// `|n(s)|` bound for the combinations `Σ n(s) q[s]` when `F = S`.
    pub combination_bound: i64,
    /// Coefficient bound for the independence combinations when `F ⊊ S`.
    pub independence_bound: i64,
    /// Record wall-clock timings; off by default so reports are reproducible.
    pub timings: bool,
}

impl Default for KReportOptions {
    fn default() -> Self {
        KReportOptions { combination_bound: 2, independence_bound: 1, timings: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitDecomposition {
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CertificateSummary {
    pub in_image: usize,
    pub not_in_image: usize,
    pub unknown: usize,
    /// Every certificate re-verified from its witness.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Section {
    pub statement: String,
    pub basis: Vec<String>,
    pub unit_class: Vec<String>,
    pub certificates: Vec<CertificateRecord>,
    pub summary: CertificateSummary,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelRank {
    pub depth: usize,
    pub rank: usize,
    pub constants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K1Section {
    pub statement: String,
    pub kernel_ranks: Vec<KernelRank>,
    pub constants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub k0_ms: u64,
    pub k1_ms: u64,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KReport {
    pub d: usize,
    pub relation: String,
    pub depth: usize,
    pub unit_decomposition: UnitDecomposition,
    pub k0: K0Section,
    pub k1: K1Section,
    pub timings: Option<Timings>,
}

impl KReport {
    pub fn consistent(&self) -> bool {
        self.unit_decomposition.holds && self.k0.consistent && self.k0.summary.verified && self.k1.constants
    }

    pub fn unknown_count(&self) -> usize {
        self.k0.summary.unknown
    }
}

/// `2q[a] - q[b] + 1`; an empty atom stands for the constant function.
pub fn combination_label(terms: &[(BigInt, String)]) -> String {
    let mut out = String::new();
    for (c, atom) in terms.iter().filter(|(c, _)| !c.is_zero()) {
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let mag = c.abs();
        if atom.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(atom);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn q_gen(spec: &GroupSpec, s: usize) -> Result<DepthFunction> {
    DepthFunction::indicator_q(spec, &spec.generator(s)?)
}

fn p_gen(spec: &GroupSpec, s: usize) -> Result<DepthFunction> {
    DepthFunction::indicator_p(spec, &spec.generator(s)?)
}

fn char_of(s: usize) -> char {
    Letter::generator(s).to_char()
}

/// Every nonzero integer vector in `[-bound, bound]^len`, lexicographically.
fn coefficient_vectors(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-bound..=bound).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&c| c != 0));
    out
}

fn linear_combination(spec: &GroupSpec, basis: &[DepthFunction], coeffs: &[i64]) -> Result<DepthFunction> {
    let mut f = DepthFunction::zero(spec, 1);
    for (b, &c) in basis.iter().zip(coeffs) {
        f = f.add(&b.scale(&BigInt::from(c)))?;
    }
    Ok(f)
}

struct Basis {
    labels: Vec<String>,
    functions: Vec<DepthFunction>,
    unit_class: Vec<i64>,
}

/// `[q[s]]` for `F = S`; otherwise `[1]`, `[p[s]]` for `s ∉ F` and
/// `[q[t]]` for `t ∈ F′`, where `F′` drops the largest generator of `F`.
fn k0_basis(rel: &RelationSpec) -> Result<Basis> {
    let spec = rel.group();
    let d = spec.rank();
    if rel.is_full() {
        return Ok(Basis {
            labels: (0..d).map(|s| format!("q[{}]", char_of(s))).collect(),
            functions: (0..d).map(|s| q_gen(spec, s)).collect::<Result<_>>()?,
            unit_class: vec![1; d],
        });
    }
    let mut labels = vec!["1".to_string()];
    let mut functions = vec![DepthFunction::one(spec)];
    for s in (0..d).filter(|&s| !rel.contains(s)) {
        labels.push(format!("p[{}]", char_of(s)));
        functions.push(p_gen(spec, s)?);
    }
    let f = rel.generators();
    for &t in &f[..f.len() - 1] {
        labels.push(format!("q[{}]", char_of(t)));
        functions.push(q_gen(spec, t)?);
    }
    let mut unit_class = vec![0; d];
    unit_class[0] = 1;
    Ok(Basis { labels, functions, unit_class })
}

fn tuple_text(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Certificates and kernel ranks checking the K-theory of `C(∂F_d / R_F) ⋊ F_d`
/// against `K₀ ≅ ℤ^d` with the unit class described in the report, and
/// `K₁ ≅ ℤ^d`, at depths up to `depth`.
pub fn k_report(rel: &RelationSpec, depth: usize, options: &KReportOptions) -> Result<KReport> {
    k_report_with(&mut MembershipEngine::new(*rel.group()), rel, depth, options)
}

/// [`k_report`] reusing `engine` and any certificate store attached to it.
pub fn k_report_with(
    engine: &mut MembershipEngine,
    rel: &RelationSpec,
    depth: usize,
    options: &KReportOptions,
) -> Result<KReport> {
    if depth < 2 {
        return Err(Error::Precondition(format!("report depth must be at least 2, got {depth}")));
    }
    let spec = *rel.group();
    let d = spec.rank();
    spec.check_depth(depth + 1)?;
    let start = Instant::now();

    let qs: Vec<DepthFunction> = (0..d).map(|s| q_gen(&spec, s)).collect::<Result<_>>()?;
    let unit_terms: Vec<String> = (0..d).map(|s| format!("q[{}]", char_of(s))).collect();
    let sum = qs.iter().try_fold(DepthFunction::zero(&spec, 1), |acc, q| acc.add(q))?;
    let unit_decomposition = UnitDecomposition {
        statement: format!("1 = {}", unit_terms.join(" + ")),
        holds: sum == DepthFunction::one(&spec),
    };

    let basis = k0_basis(rel)?;
    engine.spec().check_rank(d)?;
    let mut certs: Vec<MembershipCertificate> = Vec::new();
    let mut relation_ok = true;
    let statement;
    if rel.is_full() {
        for n in coefficient_vectors(d, options.combination_bound) {
            let target = linear_combination(&spec, &basis.functions, &n)?;
            let terms: Vec<(BigInt, String)> =
                n.iter().zip(&basis.labels).map(|(&c, l)| (BigInt::from(c), l.clone())).collect();
            certs.push(engine.im_tau_membership(rel, &target, depth)?.with_label(combination_label(&terms)));
        }
        statement = format!(
            "K0 consistent with Z^{d} with basis {} and [1] = {}: no nonzero combination with \
             coefficients in [-{b}, {b}] lies in im(tau)",
            basis.labels.iter().map(|l| format!("[{l}]")).collect::<Vec<_>>().join(", "),
            tuple_text(&basis.unit_class),
            b = options.combination_bound,
        );
    } else {
        let k = rel.generators().len();
        let constant = BigInt::from(d as i64 - k as i64 - 1);
        let mut target = DepthFunction::constant(&spec, constant.clone());
        let mut terms = vec![(constant, String::new())];
        for &s in rel.generators() {
            target = target.add(&qs[s])?;
            terms.push((BigInt::one(), format!("q[{}]", char_of(s))));
        }
        let cert = engine.im_tau_membership(rel, &target, depth)?.with_label(combination_label(&terms));
        relation_ok = cert.verdict == Verdict::InImage;
        certs.push(cert);
        for c in coefficient_vectors(d, options.independence_bound) {
            let target = linear_combination(&spec, &basis.functions, &c)?;
            let terms: Vec<(BigInt, String)> = c
                .iter()
                .zip(&basis.labels)
                .map(|(&x, l)| (BigInt::from(x), if l == "1" { String::new() } else { l.clone() }))
                .collect();
            certs.push(engine.im_tau_membership(rel, &target, depth)?.with_label(combination_label(&terms)));
        }
        let fsum: Vec<String> = rel.generators().iter().map(|&s| format!("[q[{}]]", char_of(s))).collect();
        statement = format!(
            "K0 consistent with Z^{d} with basis {} and [1] = {}: ({} - {} - 1)[1] + {} = 0, and no \
             nonzero combination of the basis with coefficients in [-{b}, {b}] lies in im(tau)",
            basis.labels.iter().map(|l| format!("[{l}]")).collect::<Vec<_>>().join(", "),
            tuple_text(&basis.unit_class),
            d,
            k,
            fsum.join(" + "),
            b = options.independence_bound,
        );
    }

    let mut summary = CertificateSummary { verified: true, ..Default::default() };
    let skip = usize::from(!rel.is_full());
    for (i, cert) in certs.iter().enumerate() {
        summary.verified &= engine.verify(cert)?;
        match cert.verdict {
            Verdict::InImage => summary.in_image += 1,
            Verdict::NotInImage => summary.not_in_image += 1,
            Verdict::Unknown => summary.unknown += 1,
        }
        if i >= skip && cert.verdict == Verdict::InImage {
            relation_ok = false;
        }
    }
    let k0 = K0Section {
        statement,
        basis: basis.labels.iter().map(|l| format!("[{l}]")).collect(),
        unit_class: basis.unit_class.iter().map(i64::to_string).collect(),
        certificates: certs.iter().map(MembershipCertificate::to_record).collect(),
        summary,
        consistent: relation_ok,
    };
    let k0_ms = start.elapsed().as_millis() as u64;

    let k1_start = Instant::now();
    let mut kernel_ranks = Vec::new();
    for n in 0..=depth {
        let k = kernel_tau(rel, n)?;
        kernel_ranks.push(KernelRank { depth: n, rank: k.rank, constants: k.constants_spanned });
    }
    let constants = kernel_ranks.iter().all(|k| k.constants && k.rank == d);
    let k1 = K1Section {
        statement: format!(
            "ker(tau_n) is the rank-{d} lattice of constant tuples for n = 0..{depth}, consistent with K1 = Z^{d}"
        ),
        kernel_ranks,
        constants,
    };
    let timings = options.timings.then(|| Timings {
        k0_ms,
        k1_ms: k1_start.elapsed().as_millis() as u64,
        total_ms: start.elapsed().as_millis() as u64,
    });
    Ok(KReport {
        d,
        relation: rel.to_string(),
        depth,
        unit_decomposition,
        k0,
        k1,
        timings,
    })
}
