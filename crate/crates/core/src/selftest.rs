//! A quick pass over the structural invariants at small sizes.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::Result;
use crate::functions::DepthFunction;
use crate::ktheory::{
    eta, eta_matrix, kernel_eta, kernel_tau, verify_explicit_preimage, verify_projection_identities,
    FunctionTuple, MembershipEngine, Verdict,
};
use crate::orbits::{coe_compare, orbit_count_invariant, CoeVerdict};
use crate::quotient::{merged_classes, separates, split_counts, RelationSpec};
use crate::words::{enumerate_words, GroupSpec};
use crate::zlinalg::{snf, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn spec(d: usize) -> GroupSpec {
    GroupSpec::new(d).expect("rank in range")
}

fn unit_decomposition() -> Result<(bool, String)> {
    for d in 2..=4 {
        let s = spec(d);
        let mut sum = DepthFunction::zero(&s, 1);
        for i in 0..d {
            sum = sum.add(&DepthFunction::indicator_q(&s, &s.generator(i)?)?)?;
        }
        if sum != DepthFunction::one(&s) {
            return Ok((false, format!("sum of q[s] differs from 1 for d = {d}")));
        }
    }
    Ok((true, "d = 2..4".into()))
}

fn group_action() -> Result<(bool, String)> {
    let s = spec(2);
    let short: Vec<_> = (0..=2).flat_map(|n| enumerate_words(&s, n)).collect();
    for w in enumerate_words(&s, 2) {
        let f = DepthFunction::indicator_p(&s, &w)?;
        for g in &short {
            for h in &short {
                let lhs = f.act(h)?.act(g)?;
                let rhs = f.act(&g.multiply(h)?)?;
                if lhs != rhs {
                    return Ok((false, format!("{g}.({h}.p[{w}]) differs from ({g}{h}).p[{w}]")));
                }
            }
        }
    }
    Ok((true, "d = 2, |g|, |h| <= 2, depth-2 cylinders".into()))
}

fn identities() -> Result<(bool, String)> {
    for d in 2..=3 {
        let r = verify_projection_identities(&spec(d), 6)?;
        if !r.all_hold() {
            return Ok((false, format!("recurrence fails for d = {d}")));
        }
    }
    Ok((true, "d = 2, 3; k <= 6".into()))
}

fn kernels_eta() -> Result<(bool, String)> {
    for (d, n_max) in [(2, 4), (3, 3)] {
        for n in 0..=n_max {
            let k = kernel_eta(&spec(d), n)?;
            if k.rank != d || !k.constants_spanned {
                return Ok((false, format!("ker(eta_{n}) for d = {d} has rank {}", k.rank)));
            }
        }
    }
    Ok((true, "d = 2 (n <= 4), d = 3 (n <= 3)".into()))
}

fn explicit_preimages() -> Result<(bool, String)> {
    let mut count = 0;
    for d in 2..=3 {
        let s = spec(d);
        for n in coefficient_box(d, 2) {
            let total: i64 = n.iter().sum();
            if total % (d as i64 - 1) != 0 {
                continue;
            }
            let n: Vec<BigInt> = n.into_iter().map(BigInt::from).collect();
            if !verify_explicit_preimage(&s, &n)? {
                return Ok((false, format!("explicit preimage fails for {n:?}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} coefficient vectors")))
}

fn coefficient_box(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-bound..=bound).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

fn q_independence() -> Result<(bool, String)> {
    let mut count = 0;
    for d in 2..=3 {
        let s = spec(d);
        let rel = RelationSpec::full(s);
        let mut engine = MembershipEngine::new(s);
        for n in coefficient_box(d, 1) {
            let total: i64 = n.iter().sum();
            if n.iter().all(|&c| c == 0) || total % (d as i64 - 1) != 0 {
                continue;
            }
            let mut h = DepthFunction::zero(&s, 1);
            for (i, &c) in n.iter().enumerate() {
                h = h.add(&DepthFunction::indicator_q(&s, &s.generator(i)?)?.scale(&BigInt::from(c)))?;
            }
            let cert = engine.im_tau_membership(&rel, &h, 3)?;
            if cert.verdict != Verdict::NotInImage || !engine.verify(&cert)? {
                return Ok((false, format!("{h} received {}", cert.verdict.as_str())));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} combinations with coefficients in [-1, 1]")))
}

fn partial_relations() -> Result<(bool, String)> {
    for (d, f) in [(3, vec![0]), (3, vec![0, 1])] {
        let s = spec(d);
        let rel = RelationSpec::new(s, f.clone())?;
        let mut h = DepthFunction::constant(&s, BigInt::from(d as i64 - f.len() as i64 - 1));
        for &i in &f {
            h = h.add(&DepthFunction::indicator_q(&s, &s.generator(i)?)?)?;
        }
        let mut engine = MembershipEngine::new(s);
        let cert = engine.im_tau_membership(&rel, &h, 3)?;
        if cert.verdict != Verdict::InImage || !engine.verify(&cert)? {
            return Ok((false, format!("{h} for F = {rel} received {}", cert.verdict.as_str())));
        }
    }
    Ok((true, "d = 3, F = {a}, {a, b}".into()))
}

fn kernels_tau() -> Result<(bool, String)> {
    for d in 2..=3 {
        for rel in RelationSpec::all_nonempty(spec(d)) {
            for n in 0..=3 {
                let k = kernel_tau(&rel, n)?;
                if k.rank != d || !k.constants_spanned {
                    return Ok((false, format!("ker(tau_{n}) for F = {rel} has rank {}", k.rank)));
                }
            }
        }
    }
    Ok((true, "every F, d = 2, 3; n <= 3".into()))
}

fn orbit_invariants() -> Result<(bool, String)> {
    for d in 2..=3 {
        let relations = RelationSpec::all_nonempty(spec(d));
        for rel in &relations {
            let count = orbit_count_invariant(rel, 2)?;
            if count.falsification_alarm() {
                return Ok((false, format!("F = {rel}: {} orbits", count.orbits)));
            }
        }
        for a in &relations {
            for b in &relations {
                let equivalent = matches!(coe_compare(a, b)?, CoeVerdict::Equivalent { .. });
                if equivalent != (a.generators().len() == b.generators().len()) {
                    return Ok((false, format!("comparison of {a} with {b}")));
                }
            }
        }
    }
    Ok((true, "d = 2, 3; all pairs".into()))
}

fn cantor_structure() -> Result<(bool, String)> {
    for d in 2..=3 {
        for rel in RelationSpec::all_nonempty(spec(d)) {
            for n in 0..3 {
                let grows = merged_classes(&rel, n + 1).len() > merged_classes(&rel, n).len();
                if !grows || split_counts(&rel, n)?.iter().any(|&c| c < 2) {
                    return Ok((false, format!("F = {rel} fails to split at depth {n}")));
                }
            }
        }
        for n in 1..=2 {
            if !separates(&RelationSpec::full(spec(d)), n)? {
                return Ok((false, format!("no separation for d = {d} at depth {n}")));
            }
        }
    }
    Ok((true, "d = 2, 3; n < 3".into()))
}

fn smith_forms() -> Result<(bool, String)> {
    let cases: [(&[&[i64]], &[i64]); 3] = [
        (&[&[2, 0], &[0, 3]], &[1, 6]),
        (&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], &[2, 6, 12]),
        (&[&[1, 2], &[2, 4]], &[1, 0]),
    ];
    for (rows, expected) in cases {
        let m = IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
        let d = snf(&m);
        let want: Vec<BigInt> = expected.iter().map(|&x| BigInt::from(x)).collect();
        if d.invariant_factors != want || !d.verify(&m) {
            return Ok((false, format!("invariant factors of {m} are {:?}", d.invariant_factors)));
        }
    }
    Ok((true, "three reference matrices".into()))
}

fn index_and_square() -> Result<(bool, String)> {
    let s = spec(3);
    for n in 1..=2 {
        let m = eta_matrix(&s, n)?;
        let next = eta_matrix(&s, n + 1)?;
        for j in 0..m.cols() {
            let mut v = vec![BigInt::zero(); m.cols()];
            v[j] = BigInt::from(1);
            let t = FunctionTuple::from_vector(&s, n, &v)?;
            let image = eta(&t)?;
            if image.index_mod().is_obstruction() {
                return Ok((false, format!("index_mod nonzero on eta of basis tuple {j} at depth {n}")));
            }
            let refined = next.mul_vec(&t.refine(n + 1)?.to_vector())?;
            if DepthFunction::from_coeffs(&s, n + 2, refined)? != image {
                return Ok((false, format!("refinement does not commute with eta at depth {n}")));
            }
        }
    }
    Ok((true, "d = 3, basis tuples at depths 1, 2".into()))
}

type Check = fn() -> Result<(bool, String)>;

/// Runs every check; an error inside a check is reported as a failure.
pub fn run_selftest() -> SelftestReport {
    let checks: [(&str, Check); 12] = [
        ("unit decomposition 1 = sum of q[s]", unit_decomposition),
        ("group action law", group_action),
        ("q[s^k] recurrences", identities),
        ("ker(eta_n) = constants", kernels_eta),
        ("explicit preimages of sum n(s) q[s]", explicit_preimages),
        ("independence of [q[s]] for F = S", q_independence),
        ("relation for F a proper subset", partial_relations),
        ("ker(tau_n) = constants", kernels_tau),
        ("orbit-count invariant equals #F", orbit_invariants),
        ("class growth, splitting and separation", cantor_structure),
        ("Smith normal form references", smith_forms),
        ("index_mod and refinement of eta", index_and_square),
    ];
    SelftestReport {
        checks: checks
            .iter()
            .map(|(name, check)| {
                let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
                SelftestCheck { name: name.to_string(), passed, detail }
            })
            .collect(),
    }
}
