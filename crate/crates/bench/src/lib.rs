//! Benchmark inputs shared by the criterion targets.

use statconv_core::constructions::corpus::Corpus;
use statconv_core::{IndexSet, Polynomial};

/// Symbolic sets of increasing structure, keyed by a short label.
pub fn sample_sets() -> Vec<(&'static str, IndexSet)> {
    let cubic = IndexSet::polynomial_image(Polynomial::new(vec![0, 1, 3, 1]).unwrap());
    let mixed = IndexSet::evens()
        .union(&IndexSet::squares())
        .intersection(&IndexSet::progression(3, 5).unwrap().complement());
    let mut corpus = Corpus::new(0x5EED);
    vec![
        ("squares", IndexSet::squares()),
        ("cubic_mod4", cubic.intersection(&IndexSet::progression(2, 4).unwrap())),
        ("mixed", mixed),
        ("corpus_depth3", corpus.symbolic_set(3)),
    ]
}
