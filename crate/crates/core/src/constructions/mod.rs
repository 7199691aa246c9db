//! Sequences and scenarios built from the classical counterexamples: the
//! square-indexed and alternating sequences, extraction of a convergent
//! equivalent sequence, perturbation along a sparse subsequence, and the
//! two-metric scenario.

pub mod corpus;

use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{default_epsilons, stat_convergence_report, StatReport, DEFAULT_HORIZON};
use crate::error::{Error, Result};
use crate::index_sets::{
    density_bounds, horizon_ladder, is_statistically_dense, relative_null_verdict, DensityBounds, IndexSet, Rational,
    ZERO_DENSITY_TOLERANCE,
};
use crate::metric_spaces::{Domain, MetricPair, MetricSpace, Point, TopologyRelation};
use crate::sequences::{
    disagreement_set, exceedance, is_statistically_equivalent, splice, subsequence, LazySequence, SubsequenceSpec,
};
use crate::verdict::{Evidence, Verdict};

/// Default number of levels `ε_j = 1/j` in the extraction schedule.
pub const DEFAULT_LEVELS: u32 = 20;
/// Arguments probed when validating a two-metric witness.
pub const WITNESS_PROBE: u64 = 1000;

fn distinct(x: &Point, y: &Point) -> Result<()> {
    if x == y {
        return Err(Error::DegenerateInput(format!(
            "the two points must differ, both are {x}"
        )));
    }
    Ok(())
}

/// `x` at perfect squares, `y` elsewhere.
pub fn make_example1(space: &MetricSpace, x: Point, y: Point) -> Result<LazySequence> {
    distinct(&x, &y)?;
    let description = format!("example1({x}, {y})");
    let base = LazySequence::constant(space, y)?;
    let patch = LazySequence::constant(space, x)?;
    Ok(splice(&base, &IndexSet::squares(), &patch)?.named(description))
}

/// `x` at even indices, `y` at odd ones.
pub fn make_example2(space: &MetricSpace, x: Point, y: Point) -> Result<LazySequence> {
    distinct(&x, &y)?;
    let description = format!("example2({x}, {y})");
    Ok(LazySequence::alternating(space, IndexSet::full(), y, x)?.named(description))
}

/// Levels `ε_j = 1/j` with cutoffs `N_j` and the kept index set.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractionSchedule {
    pub thresholds: Vec<f64>,
    /// Non-decreasing; `cutoffs[j - 1]` is `N_j`.
    pub cutoffs: Vec<u64>,
    #[serde(serialize_with = "ser_display")]
    pub kept: IndexSet,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone)]
pub struct Extraction {
    /// `x` on the kept set, `a` elsewhere.
    pub y: LazySequence,
    pub kept: IndexSet,
    pub schedule: ExtractionSchedule,
    /// Whether the kept set is statistically dense.
    pub dense: Verdict,
    /// Whether `y ≍ x`.
    pub equivalent: Verdict,
}

/// Builds `y ≍ x` that converges to `a` in the ordinary sense along the
/// schedule `ε_j = 1/j`, `j = 1..levels`.
///
/// The cutoff `N_j` is the first point of `{1} ∪ ladder(h)`, not below
/// `N_{j-1}`, from which every later point `n` of that list satisfies
/// `|A(n, 1/j)| < n/j`. Indices in `[N_j, N_{j+1})` are kept when
/// `d(x_k, a) < 1/j`, and so is the whole initial segment `[1, N_1)`.
pub fn extract_convergent_equivalent(x: &LazySequence, a: &Point, levels: u32, horizon: u64) -> Result<Extraction> {
    if levels == 0 {
        return Err(Error::InvalidArgument("extraction needs at least one level".into()));
    }
    let mut candidates = vec![1];
    candidates.extend(horizon_ladder(horizon).into_iter().filter(|&n| n > 1));

    let exceedances = (1..=levels)
        .into_par_iter()
        .map(|j| {
            let exc = exceedance(x, a, 1.0 / j as f64)?;
            let counts = exc.set.counts_at(&candidates);
            exc.faults.check()?;
            Ok((exc.set, counts))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cutoffs = Vec::with_capacity(levels as usize);
    let mut floor = 0;
    for (j, (_, counts)) in (1..=levels).zip(&exceedances) {
        // Last candidate where the density condition fails.
        let last_bad = candidates.iter().zip(counts).rposition(|(&n, &c)| c * j as u64 >= n);
        let start = match last_bad {
            Some(i) if i + 1 == candidates.len() => {
                return Err(Error::ScheduleFailure {
                    level: j,
                    detail: format!(
                        "{} of the first {horizon} terms lie at distance >= 1/{j} from {a}",
                        counts[i]
                    ),
                })
            }
            Some(i) => i + 1,
            None => 0,
        };
        let n_j = candidates[start.max(floor)];
        floor = start.max(floor);
        cutoffs.push(n_j);
    }

    let mut kept = IndexSet::interval(1, cutoffs[0]);
    for (j, (exc, _)) in exceedances.iter().enumerate() {
        let band = match cutoffs.get(j + 1) {
            Some(&next) => IndexSet::interval(cutoffs[j], next),
            None => IndexSet::at_least(cutoffs[j]),
        };
        kept = kept.union(&band.intersection(&exc.complement()));
    }
    let anchor = LazySequence::constant(x.space(), a.clone())?;
    let y = splice(x, &kept.complement(), &anchor)?.named(format!("extracted({x}, {a})"));
    let dense = is_statistically_dense(&kept, horizon);
    let equivalent = is_statistically_equivalent(x, &y, horizon)?;
    Ok(Extraction {
        y,
        kept: kept.clone(),
        schedule: ExtractionSchedule {
            thresholds: (1..=levels).map(|j| 1.0 / j as f64).collect(),
            cutoffs,
            kept,
        },
        dense,
        equivalent,
    })
}

/// `(y, y′)` where `y` alternates `a`, `b` along `K` and equals `x` off `K`,
/// and `y′` is `y` along `K`.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub y: LazySequence,
    pub ysub: SubsequenceSpec,
}

/// Replaces `x` along the sparse infinite set `K` by `a, b, a, b, ...`
/// (`a` at odd enumeration positions).
///
/// `K` must have upper density 0: exactly, or at most the zero-density
/// tolerance on the ladder tail when only an estimate is available.
pub fn lemma1_perturbation(x: &LazySequence, ksparse: &IndexSet, a: &Point, b: &Point) -> Result<Perturbation> {
    if a == b {
        return Err(Error::Domain(format!(
            "the two replacement points must differ, both are {a}"
        )));
    }
    if x.space().sole_point().is_some() {
        return Err(Error::Domain("the space has a single point".into()));
    }
    let bounds = density_bounds(ksparse, DEFAULT_HORIZON);
    let (num, den) = ZERO_DENSITY_TOLERANCE;
    let sparse = if bounds.is_exact() {
        bounds.upper == Rational::from_integer(0)
    } else {
        bounds.upper <= Rational::new(num, den)
    };
    if !sparse {
        return Err(Error::Domain(format!(
            "{ksparse} does not have upper density 0 (upper bound {})",
            bounds.upper
        )));
    }
    if ksparse.is_finite() != Some(false) {
        return Err(Error::Domain(format!("{ksparse} is not known to be infinite")));
    }
    resplice_along(x, ksparse, a, b)
}

/// The perturbation without the sparseness precondition, for experiments
/// along sets of positive density.
pub fn resplice_along(x: &LazySequence, k: &IndexSet, a: &Point, b: &Point) -> Result<Perturbation> {
    let patch = LazySequence::alternating(x.space(), k.clone(), a.clone(), b.clone())?;
    let y = splice(x, k, &patch)?.named(format!("perturbed({x}, {k}, {a}, {b})"));
    let ysub = subsequence(&y, k)?;
    Ok(Perturbation { y, ysub })
}

/// The three checked claims of the sparse-perturbation scenario.
#[derive(Debug, Clone)]
pub struct Theorem5Scenario {
    pub perturbation: Perturbation,
    /// `y` and `x` are taken along the same index set.
    pub same_indices: bool,
    pub equivalent: Verdict,
    pub y_convergent: Verdict,
    pub ysub_at_a: Verdict,
    pub ysub_at_b: Verdict,
}

impl Theorem5Scenario {
    pub fn passed(&self) -> bool {
        self.same_indices
            && self.equivalent.holds()
            && self.y_convergent.holds()
            && self.ysub_at_a.is_refuted()
            && self.ysub_at_b.is_refuted()
    }
}

/// For `x → a` statistically and a sparse `K`: `y ≍ x`, `y → a`
/// statistically, and `y` along `K` has no statistical limit in `{a, b}`.
pub fn theorem5_scenario(
    x: &LazySequence,
    a: &Point,
    ksparse: &IndexSet,
    b: &Point,
    horizon: u64,
) -> Result<Theorem5Scenario> {
    let eps = separating_schedule(x.space(), a, b, horizon)?;
    let base = stat_convergence_report(x, a, &eps, horizon)?;
    if base.overall.is_refuted() {
        return Err(Error::Domain(format!(
            "{x} is not statistically convergent to {a}: {}",
            base.overall
        )));
    }
    let perturbation = lemma1_perturbation(x, ksparse, a, b)?;
    let xsub = subsequence(x, ksparse)?;
    let same_indices = xsub.indices() == perturbation.ysub.indices();
    let equivalent = is_statistically_equivalent(&perturbation.y, x, horizon)?;
    let y_convergent = stat_convergence_report(&perturbation.y, a, &eps, horizon)?.overall;
    let ysub = perturbation.ysub.sequence();
    let ysub_at_a = stat_convergence_report(ysub, a, &eps, horizon)?.overall;
    let ysub_at_b = stat_convergence_report(ysub, b, &eps, horizon)?.overall;
    Ok(Theorem5Scenario {
        perturbation,
        same_indices,
        equivalent,
        y_convergent,
        ysub_at_a,
        ysub_at_b,
    })
}

/// Default schedule plus `d(a, b)`, so that the two points are told apart.
fn separating_schedule(space: &MetricSpace, a: &Point, b: &Point, horizon: u64) -> Result<Vec<f64>> {
    let mut eps = default_epsilons(horizon);
    eps.push(space.distance(a, b)?);
    eps.retain(|e| *e > 0.0);
    eps.sort_by(|p, q| q.total_cmp(p));
    eps.dedup();
    Ok(eps)
}

/// The two-metric scenario: `y` statistically convergent under `d₂` but
/// with `d₁`-exceedance density 1/2.
#[derive(Debug, Clone)]
pub struct Theorem2Scenario {
    pub witness: LazySequence,
    /// `x_n` at odd `n`, `a` at even `n`, measured with `d₁`.
    pub y: LazySequence,
    pub epsilon0: f64,
    pub report1: StatReport,
    pub report2: StatReport,
    /// `|{n ≤ h : d₁(y_n, a) ≥ ε₀}| / h`.
    pub d1_density: Rational,
    /// `d₂(y_n, a) ≤ 1/n` for every `n ≤ h`.
    pub tail_bound: Verdict,
}

/// `a + 1/(n + 1)` on ℝ, which satisfies `d₂(x_n, a) < 1/n` strictly for
/// `d₂ = |x - y|`.
pub fn default_witness(pair: &MetricPair, a: &Point) -> Result<LazySequence> {
    let (Domain::Reals, Some(center)) = (pair.space1.domain(), a.as_real()) else {
        return Err(Error::Domain(
            "the default witness needs a real domain and a real point".into(),
        ));
    };
    LazySequence::reciprocal(&pair.space1, center, 1.0)
}

pub fn theorem2plus_counterexample(
    pair: &MetricPair,
    a: &Point,
    witness: Option<&LazySequence>,
    epsilon0: f64,
    horizon: u64,
) -> Result<Theorem2Scenario> {
    if pair.relation != TopologyRelation::DifferentTopology {
        return Err(Error::Domain(
            "the scenario needs metrics with different topologies".into(),
        ));
    }
    let (d1, d2) = (&pair.space1, &pair.space2);
    d1.check_point(a)?;
    let witness = match witness {
        Some(w) => w.with_space(d1)?,
        None => default_witness(pair, a)?,
    };
    for n in 1..=WITNESS_PROBE {
        let p = witness.eval(n);
        let (far, near) = (d1.distance(&p, a)?, d2.distance(&p, a)?);
        if !(near < 1.0 / n as f64 && far >= epsilon0) {
            return Err(Error::Domain(format!(
                "witness fails at n = {n}: d2 = {near} (needs < 1/{n}), d1 = {far} (needs >= {epsilon0})"
            )));
        }
    }
    let anchor = LazySequence::constant(d1, a.clone())?;
    let y = splice(&witness, &IndexSet::evens(), &anchor)?.named(format!("odd-terms({witness}, {a})"));
    let y2 = y.with_space(d2)?;
    let report1 = stat_convergence_report(&y, a, &[epsilon0], horizon)?;
    let report2 = stat_convergence_report(&y2, a, &default_epsilons(horizon), horizon)?;
    let far = exceedance(&y, a, epsilon0)?;
    let d1_density = Rational::new(far.set.count_prefix(horizon) as i128, horizon as i128);
    far.faults.check()?;

    let violation = (1..=horizon)
        .into_par_iter()
        .find_first(|&n| d2.distance(&y2.eval(n), a).map_or(true, |d| d > 1.0 / n as f64));
    let tail_bound = match violation {
        Some(n) => {
            let d = d2.distance(&y2.eval(n), a)?;
            Verdict::refuted(vec![n], format!("d2(y_{n}, a) = {d} > 1/{n}"))
        }
        None => Verdict::supported_with(horizon, Evidence::note(format!("d2(y_n, a) <= 1/n for n <= {horizon}"))),
    };
    Ok(Theorem2Scenario {
        witness,
        y,
        epsilon0,
        report1,
        report2,
        d1_density,
        tail_bound,
    })
}

/// Result of [`lemma3_equivalence_check`].
#[derive(Debug, Clone, Serialize)]
pub struct SubsequenceEquivalence {
    pub bounds: DensityBounds,
    pub verdict: Verdict,
}

/// For `x ≍ y` and `K` of positive lower density: the subsequences along `K`
/// are equivalent, `|{n(k) ≤ m : x ≠ y}| / |K(m)| → 0`.
pub fn lemma3_equivalence_check(
    x: &LazySequence,
    y: &LazySequence,
    k: &IndexSet,
    horizon: u64,
) -> Result<SubsequenceEquivalence> {
    let eq = is_statistically_equivalent(x, y, horizon)?;
    if eq.is_refuted() {
        return Err(Error::Domain(format!(
            "{x} and {y} are not statistically equivalent: {eq}"
        )));
    }
    let bounds = density_bounds(k, horizon);
    if bounds.lower <= Rational::from_integer(0) {
        return Err(Error::Inapplicable(format!("lower density of {k} is 0")));
    }
    let disagreement = disagreement_set(x, y)?;
    let verdict = relative_null_verdict(&k.intersection(&disagreement), k, horizon);
    Ok(SubsequenceEquivalence { bounds, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::usual_convergence_check;
    use crate::index_sets::exact_density;

    fn r(v: f64) -> Point {
        Point::Real(v)
    }

    fn real() -> MetricSpace {
        MetricSpace::real_line()
    }

    fn is_square(n: u64) -> bool {
        let s = (n as f64).sqrt() as u64;
        (s.saturating_sub(1)..=s + 1).any(|k| k * k == n)
    }

    #[test]
    fn example1_terms() {
        let s = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        for n in [1, 4, 9, 16] {
            assert_eq!(s.eval(n), r(0.0));
        }
        for n in [2, 3, 5] {
            assert_eq!(s.eval(n), r(1.0));
        }
        assert!(matches!(
            make_example1(&real(), r(1.0), r(1.0)),
            Err(Error::DegenerateInput(_))
        ));
        assert_eq!(s.description(), "example1(0, 1)");
    }

    #[test]
    fn example2_terms() {
        let s = make_example2(&real(), r(0.0), r(1.0)).unwrap();
        assert!((1..=100).all(|n| s.eval(n) == r(if n % 2 == 0 { 0.0 } else { 1.0 })));
        assert!(subsequence(&s, &IndexSet::evens()).unwrap().sequence().finite_range() == Some(vec![r(0.0)]));
        assert!(make_example2(&real(), r(2.0), r(2.0)).is_err());
    }

    #[test]
    fn extraction_of_a_constant() {
        let x = LazySequence::constant(&real(), r(3.0)).unwrap();
        let ex = extract_convergent_equivalent(&x, &r(3.0), DEFAULT_LEVELS, 10_000).unwrap();
        assert_eq!(ex.kept, IndexSet::full());
        assert!(ex.schedule.cutoffs.iter().all(|&c| c == 1));
        assert!((1..=100).all(|n| ex.y.eval(n) == r(3.0)));
        assert!(ex.dense.is_proven());
    }

    #[test]
    fn extraction_of_example1() {
        let x = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        let h = 1_000_000;
        let ex = extract_convergent_equivalent(&x, &r(1.0), DEFAULT_LEVELS, h).unwrap();
        let cut = ex.schedule.cutoffs[0];
        assert!(ex.schedule.cutoffs.windows(2).all(|w| w[0] <= w[1]));
        let d = disagreement_set(&x, &ex.y).unwrap();
        assert!(d.count_prefix(h) <= 1000);
        assert!((cut..cut + 5000).all(|n| ex.y.eval(n) == r(1.0)));
        assert!((1..cut).all(|n| ex.y.eval(n) == x.eval(n)));
        assert!(ex.dense.is_proven() && ex.equivalent.is_proven());
    }

    #[test]
    fn extraction_fails_for_example2() {
        let x = make_example2(&real(), r(0.0), r(1.0)).unwrap();
        let err = extract_convergent_equivalent(&x, &r(0.0), DEFAULT_LEVELS, 100_000).unwrap_err();
        // Density 1/2 passes level 1 and first fails `< 1/j` at j = 2.
        assert!(matches!(err, Error::ScheduleFailure { level: 2, .. }), "{err}");
    }

    #[test]
    fn perturbation_along_squares() {
        let x = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        let (a, b) = (r(5.0), r(7.0));
        let p = lemma1_perturbation(&x, &IndexSet::squares(), &a, &b).unwrap();
        for k in 1..=1000u64 {
            assert_eq!(p.ysub.index_of(k), k * k);
            assert_eq!(p.ysub.term(k), if k % 2 == 1 { a.clone() } else { b.clone() });
        }
        for n in (1..=10_000).filter(|&n| !is_square(n)) {
            assert_eq!(p.y.eval(n), x.eval(n));
        }
        let eq = is_statistically_equivalent(&p.y, &x, 1_000_000).unwrap();
        assert!(eq.holds());
        let exc = exceedance(p.ysub.sequence(), &a, 2.0).unwrap().set;
        assert_eq!(Rational::new(exc.count_prefix(1000) as i128, 1000), Rational::new(1, 2));
        assert!(matches!(
            lemma1_perturbation(&x, &IndexSet::evens(), &a, &b),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            lemma1_perturbation(&x, &IndexSet::squares(), &a, &a),
            Err(Error::Domain(_))
        ));
        let finite = IndexSet::finite(vec![2, 3]).unwrap();
        assert!(lemma1_perturbation(&x, &finite, &a, &b).is_err());
    }

    #[test]
    fn theorem5_examples() {
        let h = 100_000;
        let x = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        let sc = theorem5_scenario(&x, &r(1.0), &IndexSet::squares(), &r(0.0), h).unwrap();
        assert!(sc.passed(), "{sc:?}");
        let c = LazySequence::constant(&real(), r(2.0)).unwrap();
        let sc = theorem5_scenario(&c, &r(2.0), &IndexSet::squares(), &r(3.0), h).unwrap();
        assert!(sc.passed());
        assert_eq!(sc.perturbation.ysub.term(1), r(2.0));
        assert_eq!(sc.perturbation.ysub.term(2), r(3.0));
        let x2 = make_example2(&real(), r(0.0), r(1.0)).unwrap();
        assert!(matches!(
            theorem5_scenario(&x2, &r(0.0), &IndexSet::squares(), &r(1.0), h),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn two_metric_scenario() {
        let pair = MetricPair::discrete_vs_real_line();
        let h = 1_000_000;
        let sc = theorem2plus_counterexample(&pair, &r(0.0), None, 0.5, h).unwrap();
        assert_eq!(sc.d1_density, Rational::new(1, 2));
        assert!(sc.report1.overall.is_refuted());
        assert!(sc.report2.overall.holds());
        assert!(sc.tail_bound.is_supported());
        let odd = 100_001;
        let far = exceedance(&sc.y, &r(0.0), 0.5).unwrap().set;
        assert_eq!(far.count_prefix(odd), odd.div_ceil(2));

        let literal = LazySequence::reciprocal(&pair.space1, 0.0, 0.0).unwrap();
        let err = theorem2plus_counterexample(&pair, &r(0.0), Some(&literal), 0.5, 1000).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let same = MetricPair::bounded_vs_real_line();
        assert!(theorem2plus_counterexample(&same, &r(0.0), None, 0.5, 1000).is_err());
    }

    #[test]
    fn lemma3_examples() {
        let h = 100_000;
        let x = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        let other = LazySequence::constant(&real(), r(9.0)).unwrap();
        let y = splice(&x, &IndexSet::squares(), &other).unwrap();
        let out = lemma3_equivalence_check(&x, &y, &IndexSet::evens(), h).unwrap();
        assert!(out.verdict.holds());
        assert!(matches!(
            lemma3_equivalence_check(&x, &y, &IndexSet::squares(), h),
            Err(Error::Inapplicable(_))
        ));
        assert!(lemma3_equivalence_check(&x, &x, &IndexSet::evens(), h)
            .unwrap()
            .verdict
            .is_proven());
    }

    #[test]
    fn extracted_sequence_converges_along_schedule() {
        let x = make_example1(&real(), r(0.0), r(1.0)).unwrap();
        let ex = extract_convergent_equivalent(&x, &r(1.0), 5, 10_000).unwrap();
        for (j, &nj) in (1..=5u64).zip(&ex.schedule.cutoffs) {
            let v = usual_convergence_check(&ex.y, &r(1.0), 1.0 / j as f64, 10_000).unwrap();
            assert!(v.holds());
            assert!((nj..=10_000).all(|n| real().distance(&ex.y.eval(n), &r(1.0)).unwrap() < 1.0 / j as f64));
        }
        assert_eq!(exact_density(&ex.kept), Some(Rational::from_integer(1)));
    }
}
