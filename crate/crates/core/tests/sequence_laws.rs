//! Splicing, subsequences and statistical equivalence on random symbolic
//! sequences, with terms compared against direct evaluation.

use proptest::prelude::*;
use statconv_core::constructions::corpus::Corpus;
use statconv_core::constructions::make_example2;
use statconv_core::index_sets::{exact_density, IndexSet, Rational};
use statconv_core::metric_spaces::{MetricSpace, Point};
use statconv_core::sequences::{disagreement_set, is_statistically_equivalent, splice, subsequence, LazySequence};

fn line() -> MetricSpace {
    MetricSpace::real_line()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splice_agrees_with_base_off_the_set(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let (base, _) = c.convergent_sequence(&line());
        let (patch, _) = c.convergent_sequence(&line());
        let k = c.symbolic_set(3);
        let y = splice(&base, &k, &patch).unwrap();
        for n in 1..=10_000u64 {
            let expect = if k.contains(n) { patch.eval(n) } else { base.eval(n) };
            prop_assert_eq!(y.eval(n), expect, "{} at {}", k, n);
        }
    }

    #[test]
    fn subsequence_along_full_is_the_sequence(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let (x, _) = c.convergent_sequence(&line());
        let s = subsequence(&x, &IndexSet::full()).unwrap();
        for n in 1..=10_000u64 {
            prop_assert_eq!(s.term(n), x.eval(n));
        }
    }

    #[test]
    fn disagreement_matches_pointwise_comparison(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let (x, _) = c.convergent_sequence(&line());
        let (y, _) = c.convergent_sequence(&line());
        let d = disagreement_set(&x, &y).unwrap();
        let mut count = 0;
        for n in 1..=5000u64 {
            let differ = x.eval(n) != y.eval(n);
            prop_assert_eq!(d.contains(n), differ, "{} at {}", d, n);
            count += differ as u64;
        }
        prop_assert_eq!(d.count_prefix(5000), count);
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_transitive(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let (x, _) = c.convergent_sequence(&line());
        let (d1, d2) = (c.null_set(), c.null_set());
        let p1 = LazySequence::constant(&line(), c.real_point()).unwrap();
        let p2 = LazySequence::constant(&line(), c.real_point()).unwrap();
        let y = splice(&x, &d1, &p1).unwrap();
        let z = splice(&y, &d2, &p2).unwrap();
        let h = 100_000;
        prop_assert!(is_statistically_equivalent(&x, &x, h).unwrap().is_proven());
        let xy = is_statistically_equivalent(&x, &y, h).unwrap();
        let yx = is_statistically_equivalent(&y, &x, h).unwrap();
        prop_assert_eq!(xy.label(), yx.label());
        prop_assert!(xy.holds());
        prop_assert!(is_statistically_equivalent(&y, &z, h).unwrap().holds());
        prop_assert_eq!(exact_density(&d1.union(&d2)), Some(Rational::from_integer(0)));
        prop_assert!(is_statistically_equivalent(&x, &z, h).unwrap().holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumerator_is_consistent_with_counting(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let k = if seed % 2 == 0 { c.sparse_set() } else { c.positive_density_set() };
        let (x, _) = c.convergent_sequence(&line());
        let s = subsequence(&x, &k).unwrap();
        let mut prev = 0;
        for rank in 1..=1000u64 {
            let n = s.index_of(rank);
            prop_assert!(n > prev && k.contains(n));
            prop_assert_eq!(k.count_prefix(n), rank, "{}", k);
            prop_assert_eq!(s.term(rank), x.eval(n));
            prev = n;
        }
    }
}

#[test]
fn parity_subsequences_of_the_alternating_sequence() {
    let (x, y) = (Point::Real(0.0), Point::Real(1.0));
    let s = make_example2(&line(), x.clone(), y.clone()).unwrap();
    let evens = subsequence(&s, &IndexSet::evens()).unwrap();
    let odds = subsequence(&s, &IndexSet::odds()).unwrap();
    for k in 1..=1000 {
        assert_eq!(evens.term(k), x);
        assert_eq!(odds.term(k), y);
    }
    let d = disagreement_set(&s, &LazySequence::constant(&line(), x.clone()).unwrap()).unwrap();
    assert_eq!(d.count_prefix(100), 50);
    assert!(
        is_statistically_equivalent(&s, &LazySequence::constant(&line(), x).unwrap(), 100_000)
            .unwrap()
            .is_refuted()
    );
}

#[test]
fn splice_on_empty_and_full() {
    let mut c = Corpus::new(3);
    let (x, _) = c.convergent_sequence(&line());
    let a = LazySequence::constant(&line(), Point::Real(2.5)).unwrap();
    let off = splice(&x, &IndexSet::empty(), &a).unwrap();
    let on = splice(&x, &IndexSet::full(), &a).unwrap();
    for n in 1..=1000 {
        assert_eq!(off.eval(n), x.eval(n));
        assert_eq!(on.eval(n), Point::Real(2.5));
    }
}

#[test]
fn finite_index_sets_have_no_subsequence() {
    let x = LazySequence::constant(&line(), Point::Real(0.0)).unwrap();
    assert!(subsequence(&x, &IndexSet::finite(vec![1, 2, 3]).unwrap()).is_err());
    assert!(subsequence(&x, &IndexSet::empty()).is_err());
}
