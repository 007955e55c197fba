mod common;

use boundaryk::orbits::{act_point, class_of, coe_compare, in_y, orbit_count_invariant, same_orbit};
use boundaryk::words::enumerate_words;
use boundaryk::{BoundaryPoint, CoeVerdict, RelationSpec, ReducedWord};
use common::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn point(d: usize, prefix: usize, period: usize) -> impl Strategy<Value = BoundaryPoint> {
    (reduced_word(d, prefix), nonempty_word(d, period)).prop_map(|(g, c)| BoundaryPoint::normalize(&g, &c).unwrap())
}

/// The first `k` letters of `g · c^∞`, read off a long reduced power.
fn letters_oracle(g: &ReducedWord, c: &ReducedWord, k: usize) -> Vec<boundaryk::Letter> {
    let m = k + g.len() + 2;
    let raw: Vec<_> = g.letters().iter().chain(c.letters().iter().cycle().take(m * c.len())).copied().collect();
    stack_reduce(&raw).into_iter().take(k).collect()
}

proptest! {
    #[test]
    fn normalize_is_sound(g in reduced_word(3, 4), c in nonempty_word(3, 4)) {
        let x = BoundaryPoint::normalize(&g, &c).unwrap();
        prop_assert_eq!(x.prefix_letters(12), letters_oracle(&g, &c, 12));
        let p = x.period();
        prop_assert!(p.is_cyclically_reduced());
        prop_assert_eq!(p.primitive_root(), p.clone());
        prop_assert_eq!(x.prefix().cancellation_length(p), 0);
        prop_assert!(x.prefix().is_empty() || x.prefix().last() != p.last());
        prop_assert_eq!(BoundaryPoint::normalize(&g.multiply(&c).unwrap(), &c).unwrap(), x.clone());
        prop_assert_eq!(BoundaryPoint::normalize(&g, &c.pow(2)).unwrap(), x.clone());
        prop_assert_eq!(BoundaryPoint::parse(&spec(3), &x.to_string()).unwrap(), x);
    }

    #[test]
    fn action_is_a_group_law(x in point(3, 3, 3), g in reduced_word(3, 3), h in reduced_word(3, 3)) {
        let gh = g.multiply(&h).unwrap();
        prop_assert_eq!(act_point(&g, &act_point(&h, &x).unwrap()).unwrap(), act_point(&gh, &x).unwrap());
        prop_assert_eq!(act_point(&spec(3).identity(), &x).unwrap(), x.clone());
    }

    #[test]
    fn stabilizer_fixes_point(x in point(3, 4, 3)) {
        let st = x.stabilizer();
        prop_assert!(!st.is_identity());
        prop_assert_eq!(x.act(&st).unwrap(), x);
    }

    #[test]
    fn same_orbit_witness_is_correct(x in point(2, 3, 3), y in point(2, 3, 3)) {
        if let Some(w) = same_orbit(&x, &y) {
            prop_assert_eq!(x.act(&w).unwrap(), y.clone());
        }
        let rotated = x.period().rotation_to(y.period()).is_some();
        prop_assert_eq!(same_orbit(&x, &y).is_some(), rotated);
    }
}

#[test]
fn same_orbit_matches_brute_force() {
    let s = spec(2);
    let short: Vec<ReducedWord> = (0..=5).flat_map(|n| enumerate_words(&s, n)).collect();
    let prefixes: Vec<ReducedWord> = (0..=2).flat_map(|n| enumerate_words(&s, n)).collect();
    let periods: Vec<ReducedWord> = (1..=2).flat_map(|n| enumerate_words(&s, n)).collect();
    let mut points = BTreeSet::new();
    for g in &prefixes {
        for c in &periods {
            points.insert(BoundaryPoint::normalize(g, c).unwrap());
        }
    }
    for x in &points {
        let reachable: BTreeSet<BoundaryPoint> = short.iter().map(|w| x.act(w).unwrap()).collect();
        for y in &points {
            if reachable.contains(y) {
                assert!(same_orbit(x, y).is_some(), "{x} reaches {y}");
            }
            if let Some(w) = same_orbit(x, y) {
                assert_eq!(x.act(&w).unwrap(), *y);
                if w.len() <= 5 {
                    assert!(reachable.contains(y));
                }
            }
        }
    }
}

#[test]
fn classes_of_y() {
    let s = spec(3);
    let rel = RelationSpec::parse(&s, "a,c").unwrap();
    let x = BoundaryPoint::parse(&s, "b|a").unwrap();
    assert!(in_y(&rel, &x));
    let class = class_of(&rel, &x);
    assert_eq!(class.len(), 2);
    assert!(class.contains(&x) && class.contains(&BoundaryPoint::parse(&s, "b|A").unwrap()));
    let z = BoundaryPoint::parse(&s, "a|b").unwrap();
    assert!(!in_y(&rel, &z));
    assert_eq!(class_of(&rel, &z), vec![z]);
}

#[test]
fn orbit_counts_and_comparison() {
    for d in 2..=4 {
        let relations = RelationSpec::all_nonempty(spec(d));
        for rel in &relations {
            let count = orbit_count_invariant(rel, 3).unwrap();
            assert_eq!(count.orbits, rel.generators().len(), "F = {rel}");
            assert!(!count.falsification_alarm());
        }
        for a in &relations {
            for b in &relations {
                match coe_compare(a, b).unwrap() {
                    CoeVerdict::Equivalent { permutation } => {
                        assert_eq!(a.generators().len(), b.generators().len());
                        for &i in a.generators() {
                            assert!(b.contains(permutation[i]));
                        }
                    }
                    CoeVerdict::Distinguished { left, right } => {
                        assert_ne!(left, right);
                        assert_eq!((left, right), (a.generators().len(), b.generators().len()));
                    }
                }
            }
        }
    }
}
