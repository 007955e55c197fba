//! Closed-form identities in the image of `η`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{eta, FunctionTuple};
use crate::error::{Error, Result};
use crate::functions::DepthFunction;
use crate::orbits::{act_point, BoundaryPoint};
use crate::words::{enumerate_words, GroupSpec, Letter, ReducedWord};

/// One instance of the recurrence for `q[s^k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub generator: String,
    pub k: usize,
    pub statement: String,
    /// Exact equality of the depth-`k` coefficient vectors.
    pub holds: bool,
    /// Agreement at sampled boundary points, evaluated through the point action.
    pub pointwise: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub d: usize,
    pub k_max: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds && c.pointwise)
    }
}

fn q_power(spec: &GroupSpec, s: Letter, k: usize) -> Result<DepthFunction> {
    DepthFunction::indicator_q(spec, &ReducedWord::letter_power(spec.rank(), s, k as i64))
}

/// Right-hand side of the recurrence, built from `act` on cylinder vectors.
/// `qs[j] = q[s^j]` for `j >= 1`.
fn recurrence_rhs(qs: &[DepthFunction], s: Letter, k: usize) -> Result<DepthFunction> {
    let g = ReducedWord::letter_power(qs[1].spec().rank(), s, 1);
    let prev = &qs[k - 1];
    let sides = prev.act(&g)?.add(&prev.act(&g.inverse())?)?;
    let tail = if k == 2 { prev.add_constant(&BigInt::from(-2)) } else { qs[k - 2].neg() };
    sides.refine(k)?.add(&tail.refine(k)?)
}

fn q_table(spec: &GroupSpec, s: Letter, k_max: usize) -> Result<Vec<DepthFunction>> {
    let mut qs = vec![DepthFunction::one(spec)];
    for j in 1..=k_max {
        qs.push(q_power(spec, s, j)?);
    }
    Ok(qs)
}

/// Sample points `w·c^∞` with short `w` and `c`.
fn sample_points(spec: &GroupSpec) -> Result<Vec<BoundaryPoint>> {
    let mut out = Vec::new();
    let periods: Vec<ReducedWord> = (1..=2)
        .flat_map(|n| enumerate_words(spec, n))
        .filter(|c| c.is_cyclically_reduced())
        .collect();
    for n in 0..=2 {
        for w in enumerate_words(spec, n) {
            for c in &periods {
                out.push(BoundaryPoint::normalize(&w, c)?);
            }
        }
    }
    Ok(out)
}

/// `(g·f)(x) = f(g⁻¹x)` through the point action.
fn shifted_value(f: &DepthFunction, g: &ReducedWord, x: &BoundaryPoint) -> Result<BigInt> {
    f.evaluate(&act_point(&g.inverse(), x)?)
}

/// Checks `q[s²] = s·q[s] + s⁻¹·q[s] + q[s] − 2` and, for `3 ≤ k ≤ k_max`,
/// `q[s^k] = s·q[s^{k−1}] + s⁻¹·q[s^{k−1}] − q[s^{k−2}]`, for every
/// `s ∈ S ∪ S⁻¹`.
pub fn verify_projection_identities(spec: &GroupSpec, k_max: usize) -> Result<IdentityReport> {
    if k_max < 2 {
        return Err(Error::Precondition(format!("k_max must be at least 2, got {k_max}")));
    }
    spec.check_depth(k_max)?;
    let points = sample_points(spec)?;
    let mut checks = Vec::new();
    for s in spec.letters() {
        let g = ReducedWord::letter_power(spec.rank(), s, 1);
        let qs = q_table(spec, s, k_max)?;
        for k in 2..=k_max {
            let holds = qs[k] == recurrence_rhs(&qs, s, k)?;
            let mut pointwise = true;
            for x in &points {
                let lhs = qs[k].evaluate(x)?;
                let mut rhs = shifted_value(&qs[k - 1], &g, x)? + shifted_value(&qs[k - 1], &g.inverse(), x)?;
                if k == 2 {
                    rhs += qs[1].evaluate(x)? - 2;
                } else {
                    rhs -= qs[k - 2].evaluate(x)?;
                }
                if lhs != rhs {
                    pointwise = false;
                    break;
                }
            }
            let (c, ci) = (s.to_char(), s.inverse().to_char());
            let statement = if k == 2 {
                format!("q[{c}{c}] = {c}.q[{c}] + {ci}.q[{c}] + q[{c}] - 2")
            } else {
                format!("q[{c}^{k}] = {c}.q[{c}^{}] + {ci}.q[{c}^{}] - q[{c}^{}]", k - 1, k - 1, k - 2)
            };
            checks.push(IdentityCheck { generator: c.to_string(), k, statement, holds, pointwise });
        }
    }
    Ok(IdentityReport { d: spec.rank(), k_max, checks })
}

/// `g_s = (n_s − m)·p[s⁻¹]` for `m = Σ n_s / (d − 1)`; requires the sum to
/// be divisible by `d − 1`.
pub fn explicit_preimage(spec: &GroupSpec, n: &[BigInt]) -> Result<FunctionTuple> {
    if n.len() != spec.rank() {
        return Err(Error::DimensionMismatch { expected: spec.rank(), found: n.len() });
    }
    let total: BigInt = n.iter().sum();
    let modulus = BigInt::from(spec.rank() - 1);
    if !(&total % &modulus).is_zero() {
        return Err(Error::Precondition(format!(
            "coefficient sum {total} is not divisible by {modulus}"
        )));
    }
    let m = total / modulus;
    let components = n
        .iter()
        .enumerate()
        .map(|(s, ns)| {
            let inv = spec.generator(s)?.inverse();
            Ok(DepthFunction::indicator_p(spec, &inv)?.scale(&(ns - &m)))
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionTuple::new(components)
}

/// Checks `η(g) = Σ n_s q[s]` for the explicit preimage `g`.
pub fn verify_explicit_preimage(spec: &GroupSpec, n: &[BigInt]) -> Result<bool> {
    let g = explicit_preimage(spec, n)?;
    let mut target = DepthFunction::zero(spec, 1);
    for (s, ns) in n.iter().enumerate() {
        let q = DepthFunction::indicator_q(spec, &spec.generator(s)?)?;
        target = target.add(&q.scale(ns))?;
    }
    Ok(eta(&g)? == target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_small() {
        for d in 2..=3 {
            let spec = GroupSpec::new(d).unwrap();
            let r = verify_projection_identities(&spec, 4).unwrap();
            assert_eq!(r.checks.len(), 2 * d * 3);
            assert!(r.all_hold(), "{r:?}");
        }
    }

    #[test]
    fn wrong_constant_fails() {
        let spec = GroupSpec::new(2).unwrap();
        let s = Letter::generator(0);
        let qs = q_table(&spec, s, 2).unwrap();
        let rhs = recurrence_rhs(&qs, s, 2).unwrap().add_constant(&BigInt::from(1));
        assert_ne!(qs[2], rhs);
    }

    #[test]
    fn explicit_preimage_examples() {
        let spec = GroupSpec::new(3).unwrap();
        let n: Vec<BigInt> = [1, 1, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert!(verify_explicit_preimage(&spec, &n).unwrap());
        let odd: Vec<BigInt> = [1, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert!(matches!(verify_explicit_preimage(&spec, &odd), Err(Error::Precondition(_))));
    }
}
