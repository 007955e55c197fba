mod common;

use boundaryk::quotient::{constraint_pairs, invariant_basis, is_invariant, merged_classes, separates, split_counts};
use boundaryk::words::enumerate_words;
use boundaryk::{RelationSpec, ReducedWord};
use common::*;
use std::collections::BTreeSet;

fn relations(d: usize) -> Vec<RelationSpec> {
    RelationSpec::all_nonempty(spec(d))
}

#[test]
fn constraint_count_formula() {
    for d in 2..=4 {
        for rel in relations(d) {
            for n in 1..=4 {
                let expected = rel.generators().len() * (2 * d - 1).pow(n as u32 - 1);
                assert_eq!(constraint_pairs(&rel, n).pairs.len(), expected, "d = {d}, F = {rel}, n = {n}");
            }
        }
    }
}

/// At depth n the relation identifies w with its hat exactly when the last
/// letter of w belongs to F or F⁻¹, so classes are pairs or singletons.
#[test]
fn classes_are_hat_orbits() {
    for d in 2..=3 {
        for rel in relations(d) {
            for n in 1..=4 {
                let s = rel.group();
                let words = enumerate_words(s, n);
                let classes = merged_classes(&rel, n);
                let mut expected: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
                for w in &words {
                    let mut class = BTreeSet::from([w.index()]);
                    if rel.contains(w.last().unwrap().generator_index()) {
                        class.insert(w.hat().unwrap().index());
                    }
                    expected.insert(class);
                }
                let actual: BTreeSet<BTreeSet<usize>> =
                    classes.members.iter().map(|m| m.iter().copied().collect()).collect();
                assert_eq!(actual, expected, "d = {d}, F = {rel}, n = {n}");
                let merged_pairs = rel.generators().len() * (2 * d - 1).pow(n as u32 - 1);
                assert_eq!(classes.len(), words.len() - merged_pairs);
            }
        }
    }
}

#[test]
fn refinement_coherence() {
    for d in 2..=3 {
        for rel in relations(d) {
            for n in 0..=3 {
                for f in invariant_basis(&rel, n).unwrap() {
                    assert!(is_invariant(&rel, &f.refine(n + 1).unwrap()).unwrap());
                }
                let counts = split_counts(&rel, n).unwrap();
                assert_eq!(counts.len(), merged_classes(&rel, n).len());
                assert!(counts.iter().all(|&c| c >= 2));
                assert_eq!(counts.iter().sum::<usize>(), merged_classes(&rel, n + 1).len());
            }
        }
    }
}

#[test]
fn q_translates_are_invariant_but_p_is_not() {
    let s = spec(3);
    let rel = RelationSpec::parse(&s, "a").unwrap();
    let qa = boundaryk::DepthFunction::indicator_q(&s, &word(&s, "a")).unwrap();
    for g in enumerate_words(&s, 2) {
        assert!(is_invariant(&rel, &qa.act(&g).unwrap()).unwrap());
    }
    let pa = boundaryk::DepthFunction::indicator_p(&s, &word(&s, "a")).unwrap();
    assert!(!is_invariant(&rel, &pa).unwrap());
    let pb = boundaryk::DepthFunction::indicator_p(&s, &word(&s, "b")).unwrap();
    assert!(is_invariant(&rel, &pb).unwrap());
}

#[test]
fn separation() {
    for d in 2..=3 {
        for n in 1..=3 {
            assert!(separates(&RelationSpec::full(spec(d)), n).unwrap());
        }
    }
    assert!(separates(&RelationSpec::parse(&spec(2), "a").unwrap(), 2).is_err());
}

#[test]
fn relation_parsing() {
    let s = spec(3);
    assert_eq!(RelationSpec::parse(&s, "b,a").unwrap().to_string(), "a,b");
    assert!(RelationSpec::parse(&s, "").is_err());
    assert!(RelationSpec::parse(&s, "d").is_err());
    assert!(RelationSpec::parse(&s, "A").is_err());
    assert_eq!(relations(3).len(), 7);
}

/// Depth-n invariants built from the constraint pairs take one value on each
/// class `{g s^{+∞}, g s^{-∞}}`, and the depth-n prefixes of the two points
/// lie in one merged class.
#[test]
fn constraints_agree_with_point_classes() {
    use boundaryk::orbits::class_of;
    use boundaryk::BoundaryPoint;
    for d in 2..=3 {
        let s = spec(d);
        let points: Vec<BoundaryPoint> = (0..=2)
            .flat_map(|n| enumerate_words(&s, n))
            .flat_map(|g| (0..2 * d).map(move |c| (g.clone(), c)))
            .map(|(g, c)| {
                let t = ReducedWord::letter_power(d, boundaryk::Letter::from_code(c), 1);
                BoundaryPoint::normalize(&g, &t).unwrap()
            })
            .collect();
        for rel in relations(d) {
            for n in 1..=3 {
                let basis = invariant_basis(&rel, n).unwrap();
                let classes = merged_classes(&rel, n);
                for x in &points {
                    let class = class_of(&rel, x);
                    for f in &basis {
                        let v = f.evaluate(x).unwrap();
                        assert!(class.iter().all(|y| f.evaluate(y).unwrap() == v), "F = {rel}, n = {n}, x = {x}");
                    }
                    for y in &class {
                        let cx = classes.class_of_index[ReducedWord::from_reduced(&s, x.prefix_letters(n)).unwrap().index()];
                        let cy = classes.class_of_index[ReducedWord::from_reduced(&s, y.prefix_letters(n)).unwrap().index()];
                        assert_eq!(cx, cy, "F = {rel}, n = {n}: {x} and {y}");
                    }
                }
            }
        }
    }
}
