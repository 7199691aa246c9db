//! Subsets of the positive integers with exact prefix counting.
//!
//! An [`IndexSet`] is an immutable expression tree over a few closed-form
//! families (progressions, polynomial images, finite sets) combined by union,
//! intersection and complement, plus opaque predicate-backed leaves. Indexing
//! is 1-based: `K(n)` is `{k ∈ K : 1 ≤ k ≤ n}`.

mod count;
mod density;
mod polynomial;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub use density::{
    density_bounds, density_profile, density_ratio_transfer, exact_density, horizon_ladder, is_statistically_dense,
    ladder_tail, null_density_verdict, relative_null_verdict, BoundStatus, DensityBounds, DensityProfile, ProfilePoint,
    RationalDoc, LADDER_RATIO, LADDER_RUNGS, LADDER_TAIL, RATIO_BAND, ZERO_DENSITY_TOLERANCE,
};
pub use polynomial::Polynomial;

/// Exact rational used for densities.
pub type Rational = Ratio<i128>;

type MembershipFn = dyn Fn(u64) -> bool + Send + Sync;

/// A membership test wrapped as an index set.
#[derive(Clone)]
pub struct PredicateSet {
    test: Arc<MembershipFn>,
    tag: String,
    budget: Option<u64>,
    infinite: bool,
}

impl PredicateSet {
    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Largest index the estimators may evaluate, if limited.
    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Whether the caller asserted that the set is infinite.
    pub fn asserted_infinite(&self) -> bool {
        self.infinite
    }

    pub fn contains(&self, k: u64) -> bool {
        (self.test)(k)
    }
}

impl fmt::Debug for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateSet")
            .field("tag", &self.tag)
            .field("budget", &self.budget)
            .field("infinite", &self.infinite)
            .finish()
    }
}

/// Structural view of an [`IndexSet`].
#[derive(Debug)]
pub enum SetExpr {
    Empty,
    Full,
    /// `{first, first + step, first + 2·step, ...}`
    ArithmeticProgression {
        first: u64,
        step: u64,
    },
    /// `{p(k) : k ≥ 1} ∩ ℕ` for a strictly increasing integer polynomial.
    PolynomialImage(Polynomial),
    /// Strictly increasing positive elements.
    FiniteSet(Vec<u64>),
    Union(IndexSet, IndexSet),
    Intersection(IndexSet, IndexSet),
    Complement(IndexSet),
    Predicate(PredicateSet),
    /// `{k : n(k) ∈ sub}` where `n(k)` enumerates the infinite set `along`
    /// and `sub ⊆ along`.
    RankImage {
        sub: IndexSet,
        along: IndexSet,
    },
    /// Members of `of` whose rank in `of` is odd (`odd = true`) or even.
    RankParity {
        of: IndexSet,
        odd: bool,
    },
}

/// A subset of ℕ = {1, 2, 3, ...}. Cheap to clone and safe to share.
#[derive(Clone)]
pub struct IndexSet(Arc<SetExpr>);

impl IndexSet {
    fn wrap(expr: SetExpr) -> Self {
        IndexSet(Arc::new(expr))
    }

    pub fn expr(&self) -> &SetExpr {
        &self.0
    }

    pub fn empty() -> Self {
        Self::wrap(SetExpr::Empty)
    }

    pub fn full() -> Self {
        Self::wrap(SetExpr::Full)
    }

    pub fn progression(first: u64, step: u64) -> Result<Self> {
        if first == 0 || step == 0 {
            return Err(Error::InvalidArgument(format!(
                "progression needs first >= 1 and step >= 1, got first = {first}, step = {step}"
            )));
        }
        if first == 1 && step == 1 {
            return Ok(Self::full());
        }
        Ok(Self::wrap(SetExpr::ArithmeticProgression { first, step }))
    }

    /// `{lo, lo + 1, ...}`.
    pub fn at_least(lo: u64) -> Self {
        Self::progression(lo.max(1), 1).expect("valid progression")
    }

    /// `{lo, ..., hi - 1}`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        let lo = lo.max(1);
        if hi <= lo {
            return Self::empty();
        }
        Self::at_least(lo).intersection(&Self::at_least(hi).complement())
    }

    pub fn evens() -> Self {
        Self::progression(2, 2).expect("valid progression")
    }

    pub fn odds() -> Self {
        Self::progression(1, 2).expect("valid progression")
    }

    pub fn polynomial_image(poly: Polynomial) -> Self {
        if poly.degree() == 1 {
            // c1·k + c0 over k >= 1 is a progression once positive.
            if let Some(first) = poly.nth_image(1) {
                let step = poly.coeffs()[1] as u64;
                return Self::progression(first, step).expect("positive image");
            }
        }
        Self::wrap(SetExpr::PolynomialImage(poly))
    }

    pub fn squares() -> Self {
        Self::polynomial_image(Polynomial::new(vec![0, 0, 1]).expect("k² is increasing"))
    }

    /// Builds a finite set; elements must be positive and strictly increasing.
    pub fn finite(elements: impl Into<Vec<u64>>) -> Result<Self> {
        let elements = elements.into();
        if elements.first() == Some(&0) {
            return Err(Error::InvalidArgument("finite set elements must be positive".into()));
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "finite set elements must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if elements.is_empty() {
            return Ok(Self::empty());
        }
        Ok(Self::wrap(SetExpr::FiniteSet(elements)))
    }

    /// Sorts and deduplicates before building.
    pub fn finite_from_unsorted(mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        Self::finite(elements)
    }

    pub fn predicate(tag: impl Into<String>, test: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self::wrap(SetExpr::Predicate(PredicateSet {
            test: Arc::new(test),
            tag: tag.into(),
            budget: None,
            infinite: false,
        }))
    }

    /// Predicate set with an evaluation budget and an optional infinitude assertion.
    pub fn predicate_with(
        tag: impl Into<String>,
        budget: Option<u64>,
        infinite: bool,
        test: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self::wrap(SetExpr::Predicate(PredicateSet {
            test: Arc::new(test),
            tag: tag.into(),
            budget,
            infinite,
        }))
    }

    /// Ranks of the members of `sub` within `along`: `{k : n(k) ∈ sub}` for
    /// the increasing enumeration `n` of `along`, which should be infinite.
    pub fn rank_image(sub: &IndexSet, along: &IndexSet) -> IndexSet {
        let sub = sub.intersection(along);
        match (sub.expr(), along.expr()) {
            (SetExpr::Empty, _) => Self::empty(),
            (_, SetExpr::Full) => sub,
            _ if sub == *along => Self::full(),
            _ => Self::wrap(SetExpr::RankImage {
                sub,
                along: along.clone(),
            }),
        }
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        match (self.expr(), other.expr()) {
            (SetExpr::Empty, _) => other.clone(),
            (_, SetExpr::Empty) => self.clone(),
            (SetExpr::Full, _) => self.clone(),
            (_, SetExpr::Full) => other.clone(),
            _ if self == other => self.clone(),
            _ if self.is_complement_of(other) => Self::full(),
            _ => Self::wrap(SetExpr::Union(self.clone(), other.clone())),
        }
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        match (self.expr(), other.expr()) {
            (SetExpr::Empty, _) => self.clone(),
            (_, SetExpr::Empty) => other.clone(),
            (SetExpr::Full, _) => other.clone(),
            (_, SetExpr::Full) => self.clone(),
            _ if self == other => self.clone(),
            _ if self.certainly_disjoint(other) => Self::empty(),
            _ => Self::wrap(SetExpr::Intersection(self.clone(), other.clone())),
        }
    }

    fn is_complement_of(&self, other: &IndexSet) -> bool {
        matches!(self.expr(), SetExpr::Complement(a) if a == other)
            || matches!(other.expr(), SetExpr::Complement(b) if b == self)
    }

    pub fn complement(&self) -> IndexSet {
        match self.expr() {
            SetExpr::Empty => Self::full(),
            SetExpr::Full => Self::empty(),
            SetExpr::Complement(inner) => inner.clone(),
            _ => Self::wrap(SetExpr::Complement(self.clone())),
        }
    }

    pub fn contains(&self, k: u64) -> bool {
        if k == 0 {
            return false;
        }
        match self.expr() {
            SetExpr::Empty => false,
            SetExpr::Full => true,
            SetExpr::ArithmeticProgression { first, step } => k >= *first && (k - first).is_multiple_of(*step),
            SetExpr::PolynomialImage(p) => p.preimage(k).is_some(),
            SetExpr::FiniteSet(v) => v.binary_search(&k).is_ok(),
            SetExpr::Union(a, b) => a.contains(k) || b.contains(k),
            SetExpr::Intersection(a, b) => a.contains(k) && b.contains(k),
            SetExpr::Complement(a) => !a.contains(k),
            SetExpr::Predicate(p) => p.contains(k),
            SetExpr::RankImage { sub, along } => along.nth(k).is_some_and(|n| sub.contains(n)),
            SetExpr::RankParity { of, odd } => of.contains(k) && (of.count_prefix(k) % 2 == 1) == *odd,
        }
    }

    /// Whether any predicate leaf occurs in the expression.
    pub fn has_predicate(&self) -> bool {
        match self.expr() {
            SetExpr::Predicate(_) => true,
            SetExpr::Union(a, b) | SetExpr::Intersection(a, b) | SetExpr::RankImage { sub: a, along: b } => {
                a.has_predicate() || b.has_predicate()
            }
            SetExpr::Complement(a) | SetExpr::RankParity { of: a, .. } => a.has_predicate(),
            _ => false,
        }
    }

    /// Smallest declared predicate budget in the expression.
    pub fn evaluation_budget(&self) -> Option<u64> {
        match self.expr() {
            SetExpr::Predicate(p) => p.budget,
            SetExpr::Union(a, b) | SetExpr::Intersection(a, b) | SetExpr::RankImage { sub: a, along: b } => {
                match (a.evaluation_budget(), b.evaluation_budget()) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                }
            }
            SetExpr::Complement(a) | SetExpr::RankParity { of: a, .. } => a.evaluation_budget(),
            _ => None,
        }
    }

    /// `Some(true)` if certainly finite, `Some(false)` if certainly infinite.
    pub fn is_finite(&self) -> Option<bool> {
        let known = match self.expr() {
            SetExpr::Empty | SetExpr::FiniteSet(_) => Some(true),
            SetExpr::Full | SetExpr::ArithmeticProgression { .. } | SetExpr::PolynomialImage(_) => Some(false),
            SetExpr::Complement(a) => match (a.is_finite(), a.expr()) {
                (Some(true), _) => Some(false),
                // Complement of a tail {lo, lo + 1, ...}.
                (_, SetExpr::ArithmeticProgression { step: 1, .. }) => Some(true),
                _ => None,
            },
            SetExpr::Union(a, b) => match (a.is_finite(), b.is_finite()) {
                (Some(true), Some(true)) => Some(true),
                (Some(false), _) | (_, Some(false)) => Some(false),
                _ => None,
            },
            SetExpr::Intersection(a, b) => match (a.is_finite(), b.is_finite()) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                _ => polynomial_meets_progression(a, b).or_else(|| polynomial_meets_progression(b, a)),
            },
            SetExpr::Predicate(p) => p.infinite.then_some(false),
            SetExpr::RankImage { sub, .. } => sub.is_finite(),
            SetExpr::RankParity { of, .. } => of.is_finite(),
        };
        if known.is_some() {
            return known;
        }
        match exact_density(self) {
            Some(d) if d > Rational::from_integer(0) => Some(false),
            _ => None,
        }
    }

    /// Elements whose rank in `self` is odd (`odd = true`) or even.
    ///
    /// The rank of `m ∈ K` is `|K(m)|`, so the first element has rank 1.
    pub fn rank_parity_subset(&self, odd: bool) -> IndexSet {
        let symbolic = match self.expr() {
            SetExpr::Empty => Some(Self::empty()),
            SetExpr::Full => Some(if odd { Self::odds() } else { Self::evens() }),
            SetExpr::ArithmeticProgression { first, step } => {
                let start = if odd { *first } else { first + step };
                Self::progression(start, 2 * step).ok()
            }
            SetExpr::PolynomialImage(p) => {
                // Ranks count from the first positive image point.
                let base = p.first_positive_arg() as i64;
                let shift = if odd { base - 2 } else { base - 1 };
                p.compose_affine(2, shift).ok().map(Self::polynomial_image)
            }
            SetExpr::FiniteSet(v) => {
                let keep: Vec<u64> = v.iter().skip(if odd { 0 } else { 1 }).step_by(2).copied().collect();
                Self::finite(keep).ok()
            }
            _ => None,
        };
        symbolic.unwrap_or_else(|| Self::wrap(SetExpr::RankParity { of: self.clone(), odd }))
    }

    /// True when `self` and `other` share no element, decided structurally.
    pub fn certainly_disjoint(&self, other: &IndexSet) -> bool {
        match (self.expr(), other.expr()) {
            (SetExpr::Empty, _) | (_, SetExpr::Empty) => true,
            (SetExpr::Complement(a), _) if a == other => true,
            (_, SetExpr::Complement(b)) if b == self => true,
            (
                SetExpr::ArithmeticProgression { first: f1, step: s1 },
                SetExpr::ArithmeticProgression { first: f2, step: s2 },
            ) => count::progression_meet(*f1, *s1, *f2, *s2).is_none(),
            _ => false,
        }
    }

    /// True when `self ⊆ other` is evident from the structure.
    pub fn certainly_subset_of(&self, other: &IndexSet) -> bool {
        if self == other {
            return true;
        }
        match (self.expr(), other.expr()) {
            (SetExpr::Empty, _) | (_, SetExpr::Full) => true,
            (SetExpr::Intersection(a, b), _) => a.certainly_subset_of(other) || b.certainly_subset_of(other),
            (SetExpr::RankParity { of, .. }, _) => of.certainly_subset_of(other),
            (_, SetExpr::Union(a, b)) => self.certainly_subset_of(a) || self.certainly_subset_of(b),
            _ => false,
        }
    }
}

/// Finiteness of `p(ℕ) ∩ ap(first, step)`: `p(k) mod step` has period `step`
/// in `k`, so one period of arguments decides whether the residue recurs.
fn polynomial_meets_progression(a: &IndexSet, b: &IndexSet) -> Option<bool> {
    let (SetExpr::PolynomialImage(p), SetExpr::ArithmeticProgression { first, step }) = (a.expr(), b.expr()) else {
        return None;
    };
    if *step > 1 << 16 {
        return None;
    }
    let step = *step as i128;
    let start = p.first_positive_arg();
    let hits = (start..start + step as u64).any(|k| p.eval(k).rem_euclid(step) == *first as i128 % step);
    Some(!hits)
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.expr(), other.expr()) {
            (SetExpr::Empty, SetExpr::Empty) | (SetExpr::Full, SetExpr::Full) => true,
            (
                SetExpr::ArithmeticProgression { first: f1, step: s1 },
                SetExpr::ArithmeticProgression { first: f2, step: s2 },
            ) => f1 == f2 && s1 == s2,
            (SetExpr::PolynomialImage(p), SetExpr::PolynomialImage(q)) => p == q,
            (SetExpr::FiniteSet(a), SetExpr::FiniteSet(b)) => a == b,
            (SetExpr::Union(a1, b1), SetExpr::Union(a2, b2))
            | (SetExpr::Intersection(a1, b1), SetExpr::Intersection(a2, b2)) => a1 == a2 && b1 == b2,
            (SetExpr::Complement(a), SetExpr::Complement(b)) => a == b,
            (SetExpr::Predicate(p), SetExpr::Predicate(q)) => Arc::ptr_eq(&p.test, &q.test),
            (SetExpr::RankImage { sub: s1, along: a1 }, SetExpr::RankImage { sub: s2, along: a2 }) => {
                s1 == s2 && a1 == a2
            }
            (SetExpr::RankParity { of: a, odd: p }, SetExpr::RankParity { of: b, odd: q }) => p == q && a == b,
            _ => false,
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr() {
            SetExpr::Empty => write!(f, "empty"),
            SetExpr::Full => write!(f, "full"),
            SetExpr::ArithmeticProgression { first: 2, step: 2 } => write!(f, "evens"),
            SetExpr::ArithmeticProgression { first: 1, step: 2 } => write!(f, "odds"),
            SetExpr::ArithmeticProgression { first, step } => write!(f, "ap({first},{step})"),
            SetExpr::PolynomialImage(p) if p.coeffs() == [0, 0, 1] => write!(f, "squares"),
            SetExpr::PolynomialImage(p) => write!(f, "{p}"),
            SetExpr::FiniteSet(v) if v.len() <= 8 => write!(f, "finite{v:?}"),
            SetExpr::FiniteSet(v) => write!(f, "finite[{} elements, max {}]", v.len(), v[v.len() - 1]),
            SetExpr::Union(a, b) => write!(f, "union({a}, {b})"),
            SetExpr::Intersection(a, b) => write!(f, "intersection({a}, {b})"),
            SetExpr::Complement(a) => write!(f, "complement({a})"),
            SetExpr::Predicate(p) => write!(f, "predicate[{}]", p.tag),
            SetExpr::RankImage { sub, along } => write!(f, "ranks({sub} in {along})"),
            SetExpr::RankParity { of, odd } => write!(f, "{}-rank({of})", if *odd { "odd" } else { "even" }),
        }
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet({self})")
    }
}
