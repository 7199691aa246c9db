//! Seeded random index sets and sequences from the symbolic class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index_sets::{IndexSet, Polynomial};
use crate::metric_spaces::{MetricSpace, Point};
use crate::sequences::{splice, LazySequence};

/// Deterministic generator of corpus objects. The same seed always yields the
/// same sequence of objects.
pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Up to a dozen indices below 10⁴.
    pub fn finite_set(&mut self) -> IndexSet {
        let len = self.rng.random_range(0..=12);
        let elements = (0..len).map(|_| self.rng.random_range(1..10_000)).collect();
        IndexSet::finite_from_unsorted(elements).expect("positive elements")
    }

    /// A strictly increasing polynomial of degree 2 or 3 with small
    /// nonnegative coefficients.
    pub fn polynomial(&mut self) -> Polynomial {
        let degree = self.rng.random_range(2..=3);
        let mut coeffs: Vec<i64> = (0..degree).map(|_| self.rng.random_range(0..=6)).collect();
        coeffs.push(self.rng.random_range(1..=3));
        Polynomial::new(coeffs).expect("nonnegative coefficients increase")
    }

    /// An infinite set of density zero.
    pub fn sparse_set(&mut self) -> IndexSet {
        let image = IndexSet::polynomial_image(self.polynomial());
        match self.rng.random_range(0..4) {
            0 => image.union(&self.finite_set()),
            1 => {
                let step = self.rng.random_range(2..=5);
                let first = self.rng.random_range(1..=step);
                let restricted = image.intersection(&IndexSet::progression(first, step).expect("valid"));
                if restricted.is_finite() == Some(false) {
                    restricted
                } else {
                    image
                }
            }
            2 => image.union(&IndexSet::polynomial_image(self.polynomial())),
            _ => image,
        }
    }

    /// A set of density zero, finite or not.
    pub fn null_set(&mut self) -> IndexSet {
        match self.rng.random_range(0..3) {
            0 => self.finite_set(),
            _ => self.sparse_set(),
        }
    }

    /// A set of density one.
    pub fn dense_set(&mut self) -> IndexSet {
        let base = self.null_set().complement();
        match self.rng.random_range(0..3) {
            0 => base.intersection(&self.null_set().complement()),
            1 => base.union(&self.symbolic_set(2)),
            _ => base,
        }
    }

    /// A set of density at least 1/4: a union of progressions with step at
    /// most 4, possibly changed on a null set.
    pub fn positive_density_set(&mut self) -> IndexSet {
        let mut set = IndexSet::empty();
        for _ in 0..self.rng.random_range(1..=3) {
            let step = self.rng.random_range(1..=4);
            let first = self.rng.random_range(1..=step + 3);
            set = set.union(&IndexSet::progression(first, step).expect("valid"));
        }
        match self.rng.random_range(0..3) {
            0 => set.intersection(&self.null_set().complement()),
            1 => set.union(&self.sparse_set()),
            _ => set,
        }
    }

    /// A random boolean combination of progressions, polynomial images and
    /// finite sets.
    pub fn symbolic_set(&mut self, depth: u32) -> IndexSet {
        if depth == 0 || self.rng.random_bool(0.3) {
            return match self.rng.random_range(0..4) {
                0 => {
                    let step = self.rng.random_range(1..=6);
                    let first = self.rng.random_range(1..=8);
                    IndexSet::progression(first, step).expect("valid")
                }
                1 => IndexSet::polynomial_image(self.polynomial()),
                2 => self.finite_set(),
                _ => self.sparse_set(),
            };
        }
        let left = self.symbolic_set(depth - 1);
        match self.rng.random_range(0..3) {
            0 => left.union(&self.symbolic_set(depth - 1)),
            1 => left.intersection(&self.symbolic_set(depth - 1)),
            _ => left.complement(),
        }
    }

    /// A multiple of 1/4 in `[-4, 4]`.
    pub fn real_point(&mut self) -> Point {
        Point::Real(self.rng.random_range(-16i32..=16) as f64 / 4.0)
    }

    /// A real point different from `other`.
    pub fn real_point_except(&mut self, other: &Point) -> Point {
        loop {
            let p = self.real_point();
            if &p != other {
                return p;
            }
        }
    }

    /// A sequence statistically convergent to the returned point: the
    /// constant limit, changed on one to three null sets (by a constant or by
    /// two points alternating along the set) and sometimes on a finite
    /// prefix.
    pub fn convergent_sequence(&mut self, space: &MetricSpace) -> (LazySequence, Point) {
        let limit = self.real_point();
        let mut x = LazySequence::constant(space, limit.clone()).expect("real point");
        for _ in 0..self.rng.random_range(1..=3) {
            let on = self.null_set();
            let patch = if self.rng.random_bool(0.25) {
                let (p, q) = (self.real_point(), self.real_point());
                LazySequence::alternating(space, on.clone(), p, q).expect("real points")
            } else {
                LazySequence::constant(space, self.real_point()).expect("real point")
            };
            x = splice(&x, &on, &patch).expect("shared space");
        }
        if self.rng.random_bool(0.2) {
            let head = (0..self.rng.random_range(1..=8)).map(|_| self.real_point()).collect();
            x = LazySequence::table(space, head, x).expect("real points");
        }
        (x, limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_sets::{exact_density, Rational};

    #[test]
    fn generated_sets_have_the_promised_densities() {
        let mut c = Corpus::new(0x5EED);
        let zero = Rational::from_integer(0);
        for _ in 0..200 {
            let s = c.sparse_set();
            assert_eq!(exact_density(&s), Some(zero), "{s}");
            assert_eq!(s.is_finite(), Some(false), "{s}");
            assert_eq!(exact_density(&c.dense_set()), Some(Rational::from_integer(1)));
            let p = c.positive_density_set();
            assert!(exact_density(&p).is_some_and(|d| d >= Rational::new(1, 4)), "{p}");
        }
    }

    #[test]
    fn same_seed_same_objects() {
        let (mut a, mut b) = (Corpus::new(7), Corpus::new(7));
        for _ in 0..20 {
            let (x, y) = (a.symbolic_set(3), b.symbolic_set(3));
            assert_eq!(x.to_string(), y.to_string());
            assert!((1..=200).all(|k| x.contains(k) == y.contains(k)));
        }
    }
}
