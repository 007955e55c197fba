mod common;

use boundaryk::words::{enumerate_words, index_of, reduce, word_of};
use boundaryk::ReducedWord;
use common::*;
use proptest::prelude::*;

#[test]
fn word_counts() {
    for d in 2..=4 {
        let s = spec(d);
        assert_eq!(enumerate_words(&s, 0).len(), 1);
        for n in 1..=4 {
            let expected = 2 * d * (2 * d - 1).pow(n as u32 - 1);
            assert_eq!(enumerate_words(&s, n).len(), expected);
            assert_eq!(s.word_count(n), expected);
        }
    }
}

#[test]
fn cyclic_normal_form_reconstructs_every_short_word() {
    for d in 2..=3 {
        let s = spec(d);
        for n in 1..=6 {
            for w in enumerate_words(&s, n) {
                let (conj, core) = w.cyclic_normal_form().unwrap();
                assert!(core.is_cyclically_reduced());
                let back = conj.multiply(&core).unwrap().multiply(&conj.inverse()).unwrap();
                assert_eq!(back, w);
            }
        }
    }
}

#[test]
fn hat_examples() {
    let s = spec(2);
    assert_eq!(word(&s, "abb").hat().unwrap().to_string(), "aBB");
    assert_eq!(word(&s, "A").hat().unwrap().to_string(), "a");
    assert!(s.identity().hat().is_err());
}

proptest! {
    #[test]
    fn reduce_matches_stack_oracle(raw in raw_letters(3, 12)) {
        let s = spec(3);
        let w = reduce(&s, &raw).unwrap();
        prop_assert_eq!(w.letters(), &stack_reduce(&raw)[..]);
        prop_assert_eq!(reduce(&s, w.letters()).unwrap(), w);
    }

    #[test]
    fn multiply_is_associative(a in reduced_word(3, 6), b in reduced_word(3, 6), c in reduced_word(3, 6)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let raw: Vec<_> = a.letters().iter().chain(b.letters()).chain(c.letters()).copied().collect();
        prop_assert_eq!(left.letters(), &stack_reduce(&raw)[..]);
    }

    #[test]
    fn inverse_and_hat_are_involutions(w in nonempty_word(3, 8)) {
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        prop_assert!(w.multiply(&w.inverse()).unwrap().is_identity());
        let h = w.hat().unwrap();
        prop_assert_eq!(h.len(), w.len());
        prop_assert_eq!(h.hat().unwrap(), w);
    }

    #[test]
    fn index_round_trip(w in reduced_word(3, 6)) {
        let s = spec(3);
        let i = index_of(&s, &w).unwrap();
        prop_assert_eq!(word_of(&s, w.len(), i).unwrap(), w);
    }

    #[test]
    fn parse_print_round_trip(w in reduced_word(4, 8)) {
        let s = spec(4);
        prop_assert_eq!(ReducedWord::parse(&s, &w.to_string()).unwrap(), w);
    }
}
