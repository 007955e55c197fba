#![allow(dead_code)]

use boundaryk::words::reduce;
use boundaryk::{DepthFunction, GroupSpec, Letter, ReducedWord};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn spec(d: usize) -> GroupSpec {
    GroupSpec::new(d).unwrap()
}

pub fn word(spec: &GroupSpec, s: &str) -> ReducedWord {
    ReducedWord::parse(spec, s).unwrap()
}

/// Letter-stack reduction, independent of the crate's `reduce`.
pub fn stack_reduce(raw: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for &l in raw {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn raw_letters(d: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..2 * d).prop_map(Letter::from_code), 0..=max_len)
}

pub fn reduced_word(d: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
    raw_letters(d, max_len).prop_map(move |raw| reduce(&spec(d), &raw).unwrap())
}

pub fn nonempty_word(d: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
    reduced_word(d, max_len).prop_filter("nonempty", |w| !w.is_empty())
}

/// A random depth-`depth` function with small coefficients.
pub fn depth_function(d: usize, depth: usize) -> impl Strategy<Value = DepthFunction> {
    let size = spec(d).word_count(depth);
    prop::collection::vec(-3i64..=3, size).prop_map(move |c| {
        DepthFunction::from_coeffs(&spec(d), depth, c.into_iter().map(BigInt::from).collect()).unwrap()
    })
}

pub fn ints(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}
