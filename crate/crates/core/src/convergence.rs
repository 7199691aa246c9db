//! Usual and statistical convergence verdicts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index_sets::{
    density_bounds, density_profile, exact_density, horizon_ladder, null_density_verdict, relative_null_verdict,
    DensityBounds, DensityProfile, IndexSet, Rational, RationalDoc,
};
use crate::metric_spaces::{MetricSpace, Point};
use crate::sequences::{disagreement_set, exceedance, Exceedance, LazySequence};
use crate::verdict::{Evidence, Verdict};

pub const DEFAULT_HORIZON: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const STAT_REPORT_SCHEMA: &str = "statconv.stat_report/v1";

/// Exponents `j` of the default schedule `ε_j = 2^-j`.
const DEFAULT_EPSILON_EXPONENTS: std::ops::RangeInclusive<i32> = 1..=20;
/// Schedule entries below `EPSILON_FLOOR / h` are dropped: a tail of length
/// `h/2` cannot separate `ε` from 0 for `1/n`-type sequences below that.
const EPSILON_FLOOR: f64 = 4.0;
const RANDOM_PAIRS: usize = 1024;

/// `ε_j = 2^-j` for `j = 1..20`, keeping `ε ≥ 4/h`.
pub fn default_epsilons(horizon: u64) -> Vec<f64> {
    DEFAULT_EPSILON_EXPONENTS
        .map(|j| 2f64.powi(-j))
        .filter(|&e| e >= EPSILON_FLOOR / horizon as f64)
        .collect()
}

/// The user schedule when given, else the default one. User values must be
/// positive, finite and strictly decreasing.
pub fn epsilon_schedule(user: Option<&[f64]>, horizon: u64) -> Result<Vec<f64>> {
    let Some(eps) = user else {
        return Ok(default_epsilons(horizon));
    };
    validate_epsilons(eps)?;
    Ok(eps.to_vec())
}

fn validate_epsilons(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidArgument("epsilon schedule is empty".into()));
    }
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive and finite, got {bad}"
        )));
    }
    if eps.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument(
            "epsilon schedule must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn validate_epsilon(eps: f64) -> Result<()> {
    validate_epsilons(&[eps])
}

fn validate_horizon(horizon: u64) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(())
}

/// "Is `d(x_k, a) ≥ ε`?" for a fixed sequence, candidate and `ε > 0`.
#[derive(Debug, Clone)]
pub struct ExceedanceQuery {
    pub sequence: LazySequence,
    pub candidate: Point,
    pub epsilon: f64,
}

impl ExceedanceQuery {
    pub fn new(sequence: &LazySequence, candidate: Point, epsilon: f64) -> Result<Self> {
        validate_epsilon(epsilon)?;
        sequence.space().check_point(&candidate)?;
        Ok(ExceedanceQuery {
            sequence: sequence.clone(),
            candidate,
            epsilon,
        })
    }
}

/// `{m : d(x_m, a) ≥ ε}`, symbolic when the sequence structure allows it.
pub fn exceedance_set(q: &ExceedanceQuery) -> Result<IndexSet> {
    Ok(exceedance(&q.sequence, &q.candidate, q.epsilon)?.set)
}

/// One row of a [`StatReport`].
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonEntry {
    pub epsilon: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact_density: Option<Rational>,
    pub profile: DensityProfile,
    pub verdict: Verdict,
}

/// Decision at the smallest positive distance of a finite-range sequence,
/// which settles every `ε > 0` at once.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// `None` when every term equals the candidate.
    pub epsilon: Option<f64>,
    pub verdict: Verdict,
}

impl Certificate {
    fn is_exact(&self) -> bool {
        !self.verdict.is_supported()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatReport {
    pub schema: &'static str,
    pub sequence: String,
    pub space: String,
    pub candidate: Point,
    pub horizon: u64,
    pub entries: Vec<EpsilonEntry>,
    pub certificate: Option<Certificate>,
    pub overall: Verdict,
}

impl StatReport {
    pub fn epsilons(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.epsilon).collect()
    }

    pub fn entry(&self, epsilon: f64) -> Option<&EpsilonEntry> {
        self.entries.iter().find(|e| e.epsilon == epsilon)
    }
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&RationalDoc(r)),
        None => s.serialize_none(),
    }
}

fn smallest_positive_distance(x: &LazySequence, a: &Point) -> Result<Option<Option<f64>>> {
    let Some(range) = x.finite_range() else {
        return Ok(None);
    };
    let mut best: Option<f64> = None;
    for p in &range {
        let d = x.space().distance(p, a)?;
        if d > 0.0 {
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    Ok(Some(best))
}

/// Verdicts on `x → a` statistically, one per `ε`, plus an overall verdict.
pub fn stat_convergence_report(x: &LazySequence, a: &Point, epsilons: &[f64], horizon: u64) -> Result<StatReport> {
    validate_epsilons(epsilons)?;
    validate_horizon(horizon)?;
    x.space().check_point(a)?;
    let ladder = horizon_ladder(horizon);

    let certificate = match smallest_positive_distance(x, a)? {
        None => None,
        Some(None) => Some(Certificate {
            epsilon: None,
            verdict: Verdict::Proven,
        }),
        Some(Some(eps)) => {
            let exc = exceedance(x, a, eps)?;
            let verdict = null_density_verdict(&exc.set, horizon);
            exc.faults.check()?;
            Some(Certificate {
                epsilon: Some(eps),
                verdict,
            })
        }
    };

    // Neighbouring ε often give structurally identical exceedance sets; each
    // distinct set is measured once.
    let mut distinct: Vec<Exceedance> = Vec::new();
    let mut slot = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let exc = exceedance(x, a, eps)?;
        match distinct.iter().position(|d| d.set == exc.set) {
            Some(i) => slot.push(i),
            None => {
                slot.push(distinct.len());
                distinct.push(exc);
            }
        }
    }
    let measured = distinct
        .par_iter()
        .map(|exc| {
            let profile = density_profile(&exc.set, &ladder)?;
            let verdict = null_density_verdict(&exc.set, horizon);
            exc.faults.check()?;
            Ok((exact_density(&exc.set), profile, verdict))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries: Vec<EpsilonEntry> = epsilons
        .iter()
        .zip(&slot)
        .map(|(&eps, &i)| {
            let (exact_density, profile, verdict) = measured[i].clone();
            EpsilonEntry {
                epsilon: eps,
                exact_density,
                profile,
                verdict,
            }
        })
        .collect();

    // A(ε₁) ⊇ A(ε₂) for ε₁ ≤ ε₂, so a proof at some ε covers every larger one.
    let certified = certificate.as_ref().is_some_and(|c| c.verdict.is_proven());
    let first_proven = entries.iter().rposition(|e| e.verdict.is_proven());
    for (i, entry) in entries.iter_mut().enumerate() {
        if certified || first_proven.is_some_and(|p| i < p) {
            entry.verdict = Verdict::Proven;
        }
    }

    let overall = match &certificate {
        Some(c) if c.is_exact() => c.verdict.clone(),
        _ => Verdict::all(entries.iter().map(|e| &e.verdict)),
    };
    Ok(StatReport {
        schema: STAT_REPORT_SCHEMA,
        sequence: x.description().to_string(),
        space: x.space().name().to_string(),
        candidate: a.clone(),
        horizon,
        entries,
        certificate,
        overall,
    })
}

/// Verdict on `x_n → a` in the ordinary sense at tolerance `ε`.
///
/// Finitely many exceedances, decided structurally, prove the claim; an
/// infinite exceedance set refutes it. Otherwise the tail is scanned down from
/// the horizon: a violation in `[⌈h/2⌉, h]` refutes, and a clean tail supports
/// the claim with `n₀ = last violation + 1` as evidence.
pub fn usual_convergence_check(x: &LazySequence, a: &Point, epsilon: f64, horizon: u64) -> Result<Verdict> {
    validate_horizon(horizon)?;
    let q = ExceedanceQuery::new(x, a.clone(), epsilon)?;
    let exc = exceedance(&q.sequence, &q.candidate, q.epsilon)?;
    match exc.set.is_finite() {
        Some(true) => return Ok(Verdict::Proven),
        Some(false) => {
            let witness = exc.set.latest_member(horizon).or_else(|| exc.set.nth(1));
            return Ok(Verdict::refuted(
                witness.into_iter().collect(),
                format!("d(x_n, a) >= {epsilon} infinitely often"),
            ));
        }
        None => {}
    }
    let last = exc.set.latest_member(horizon);
    exc.faults.check()?;
    match last {
        Some(n) if n >= horizon.div_ceil(2) => Ok(Verdict::refuted(
            vec![n],
            format!("d(x_{n}, a) >= {epsilon} in the second half of the horizon"),
        )),
        _ => {
            let n0 = last.map_or(1, |n| n + 1);
            Ok(Verdict::supported_with(
                horizon,
                Evidence::new(vec![n0], format!("d(x_n, a) < {epsilon} for {n0} <= n <= {horizon}")),
            ))
        }
    }
}

/// Verdict on the Cauchy property at tolerance `ε`.
///
/// Eventually constant sequences are proven. Otherwise adjacent pairs
/// `(n, n + 1)` are probed downward from the horizon through its second half,
/// then seeded random pairs from the same half.
pub fn cauchy_check(x: &LazySequence, epsilon: f64, horizon: u64) -> Result<Verdict> {
    validate_epsilon(epsilon)?;
    validate_horizon(horizon)?;
    if let Some(range) = x.finite_range() {
        for p in &range {
            let constant = LazySequence::constant(x.space(), p.clone())?;
            if disagreement_set(x, &constant)?.is_finite() == Some(true) {
                return Ok(Verdict::Proven);
            }
        }
    }
    let space = x.space();
    let gap = |m: u64, n: u64| space.distance(&x.eval(m), &x.eval(n));
    let lo = horizon.div_ceil(2);
    let adjacent = (lo..=horizon)
        .into_par_iter()
        .find_last(|&n| gap(n, n + 1).map_or(true, |d| d >= epsilon));
    if let Some(n) = adjacent {
        let d = gap(n, n + 1)?;
        return Ok(Verdict::refuted(
            vec![n, n + 1],
            format!("d(x_{n}, x_{}) = {d} >= {epsilon}", n + 1),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..RANDOM_PAIRS {
        let (m, n) = (rng.random_range(lo..=horizon), rng.random_range(lo..=horizon));
        let d = gap(m.min(n), m.max(n))?;
        if d >= epsilon {
            return Ok(Verdict::refuted(
                vec![m.min(n), m.max(n)],
                format!("pair distance {d} >= {epsilon}"),
            ));
        }
    }
    Ok(Verdict::supported_with(
        horizon,
        Evidence::note(format!(
            "adjacent pairs from {lo} to {horizon} and {RANDOM_PAIRS} random pairs stay below {epsilon}"
        )),
    ))
}

/// The real sequence `d(x_n, a)`.
///
/// Terms whose distance cannot be computed become NaN, which every later
/// distance computation reports as an error.
pub fn distance_sequence(x: &LazySequence, a: &Point) -> Result<LazySequence> {
    let space = x.space().clone();
    space.check_point(a)?;
    if let Some(range) = x.finite_range() {
        for p in &range {
            space.distance(p, a)?;
        }
    }
    let a = a.clone();
    let to_distance = Arc::new(move |p: &Point| Point::Real(space.distance(p, &a).unwrap_or(f64::NAN)));
    Ok(x.map_points(&MetricSpace::real_line(), to_distance))
}

/// Schedule used when a check needs to tell `a` and `b` apart.
fn separating_schedule(separation: f64, horizon: u64) -> Vec<f64> {
    let mut eps = default_epsilons(horizon);
    if separation > 0.0 {
        eps.push(separation / 2.0);
    }
    eps.sort_by(|p, q| q.total_cmp(p));
    eps.dedup();
    eps
}

/// Checks that `x` does not converge statistically to two distinct points.
/// A refutation here means the inputs are unsound (for instance a broken
/// metric), never a property of a valid sequence.
pub fn stat_limit_uniqueness(x: &LazySequence, a: &Point, b: &Point, horizon: u64) -> Result<Verdict> {
    let separation = x.space().distance(a, b)?;
    if separation == 0.0 {
        if a != b {
            return Err(Error::Domain(format!(
                "metric `{}` puts distinct points {a} and {b} at distance 0",
                x.space().name()
            )));
        }
        return Ok(Verdict::Proven);
    }
    let eps = separating_schedule(separation, horizon);
    let (ra, rb) = rayon::join(
        || stat_convergence_report(x, a, &eps, horizon),
        || stat_convergence_report(x, b, &eps, horizon),
    );
    let (ra, rb) = (ra?, rb?);
    if ra.overall.holds() && rb.overall.holds() {
        return Ok(Verdict::refuted(
            Vec::new(),
            format!("statistical limits {a} and {b} at distance {separation}"),
        ));
    }
    Ok(Verdict::Proven)
}

/// Result of [`subsequence_inheritance`].
#[derive(Debug, Clone, Serialize)]
pub struct InheritanceOutcome {
    pub bounds: DensityBounds,
    /// What the inheritance theorem asserts for `x` along `K`.
    pub asserted: Verdict,
    /// Relative exceedance densities `|K(n) ∩ A(ε)| / |K(n)|`, measured.
    pub measured: Verdict,
    pub agree: bool,
}

/// Subsequence along `K` of a statistically convergent `x`, asserted and
/// measured independently. `K` must have positive lower density.
pub fn subsequence_inheritance(x: &LazySequence, k: &IndexSet, a: &Point, horizon: u64) -> Result<InheritanceOutcome> {
    subsequence_inheritance_with(x, k, a, &default_epsilons(horizon), horizon)
}

pub fn subsequence_inheritance_with(
    x: &LazySequence,
    k: &IndexSet,
    a: &Point,
    epsilons: &[f64],
    horizon: u64,
) -> Result<InheritanceOutcome> {
    let report = stat_convergence_report(x, a, epsilons, horizon)?;
    if report.overall.is_refuted() {
        return Err(Error::Domain(format!(
            "{x} is not statistically convergent to {a}: {}",
            report.overall
        )));
    }
    let bounds = density_bounds(k, horizon);
    if bounds.lower <= Rational::from_integer(0) {
        return Err(Error::Inapplicable(format!("lower density of {k} is 0")));
    }
    let relative = |eps: f64| -> Result<Verdict> {
        let exc = exceedance(x, a, eps)?;
        let v = relative_null_verdict(&k.intersection(&exc.set), k, horizon);
        exc.faults.check()?;
        Ok(v)
    };
    let certified = match report.certificate.as_ref() {
        Some(c) if c.is_exact() => Some(match c.epsilon {
            Some(eps) => relative(eps)?,
            None => Verdict::Proven,
        }),
        _ => None,
    };
    let measured = match certified {
        Some(v) if !v.is_supported() => v,
        _ => {
            let per_eps = epsilons.par_iter().map(|&e| relative(e)).collect::<Result<Vec<_>>>()?;
            Verdict::all(&per_eps)
        }
    };
    let asserted = report.overall;
    Ok(InheritanceOutcome {
        agree: asserted.agrees_with(&measured),
        bounds,
        asserted,
        measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{splice, subsequence};

    fn r(v: f64) -> Point {
        Point::Real(v)
    }

    fn real() -> MetricSpace {
        MetricSpace::real_line()
    }

    fn konst(v: f64) -> LazySequence {
        LazySequence::constant(&real(), r(v)).unwrap()
    }

    fn squares_seq(x: f64, y: f64) -> LazySequence {
        splice(&konst(y), &IndexSet::squares(), &konst(x)).unwrap()
    }

    fn parity_seq(x: f64, y: f64) -> LazySequence {
        LazySequence::alternating(&real(), IndexSet::full(), r(y), r(x)).unwrap()
    }

    fn reciprocal() -> LazySequence {
        LazySequence::reciprocal(&real(), 0.0, 0.0).unwrap()
    }

    #[test]
    fn default_schedule() {
        let eps = default_epsilons(1_000_000);
        assert_eq!(eps.len(), 17);
        assert_eq!(eps[0], 0.5);
        assert_eq!(default_epsilons(1 << 30).len(), 20);
        assert!(epsilon_schedule(Some(&[0.1, 0.1]), 100).is_err());
        assert!(epsilon_schedule(Some(&[0.0]), 100).is_err());
        assert_eq!(epsilon_schedule(Some(&[0.3, 0.1]), 100).unwrap(), vec![0.3, 0.1]);
    }

    #[test]
    fn exceedance_examples() {
        let q = ExceedanceQuery::new(&squares_seq(0.0, 1.0), r(1.0), 1.0).unwrap();
        let e = exceedance_set(&q).unwrap();
        assert_eq!(e, IndexSet::squares());
        assert_eq!(e.count_prefix(1_000_000), 1000);
        let q = ExceedanceQuery::new(&konst(2.0), r(2.0), 0.25).unwrap();
        assert_eq!(exceedance_set(&q).unwrap(), IndexSet::empty());
        let q = ExceedanceQuery::new(&parity_seq(0.0, 1.0), r(0.0), 1.0).unwrap();
        assert_eq!(exceedance_set(&q).unwrap(), IndexSet::odds());
        assert!(ExceedanceQuery::new(&konst(2.0), r(2.0), -1.0).is_err());
    }

    #[test]
    fn report_examples() {
        let h = 1_000_000;
        let eps = default_epsilons(h);
        let rep = stat_convergence_report(&squares_seq(0.0, 1.0), &r(1.0), &eps, h).unwrap();
        assert!(rep.overall.is_proven());
        assert!(rep.entries.iter().all(|e| e.verdict.is_proven()));
        assert_eq!(rep.entries[0].profile.last().unwrap().count, 1000);

        let rep = stat_convergence_report(&parity_seq(0.0, 1.0), &r(0.0), &eps, h).unwrap();
        assert!(rep.overall.is_refuted());
        assert_eq!(rep.entries[0].exact_density, Some(Rational::new(1, 2)));

        assert!(stat_convergence_report(&konst(3.0), &r(3.0), &eps, h)
            .unwrap()
            .overall
            .is_proven());
        assert!(stat_convergence_report(&konst(3.0), &r(3.0), &[0.1, 0.2], h).is_err());
    }

    #[test]
    fn certificate_catches_gaps_below_the_schedule() {
        let x = splice(&konst(0.0), &IndexSet::evens(), &konst(1e-9)).unwrap();
        let rep = stat_convergence_report(&x, &r(0.0), &default_epsilons(1000), 1000).unwrap();
        assert!(rep.entries.iter().all(|e| e.verdict.is_proven()));
        assert!(rep.overall.is_refuted());
    }

    #[test]
    fn reciprocal_is_supported_not_proven() {
        let rep = stat_convergence_report(&reciprocal(), &r(0.0), &default_epsilons(1_000_000), 1_000_000).unwrap();
        assert!(rep.overall.is_supported());
        assert!(!rep.entries[0].profile.exact);
    }

    #[test]
    fn usual_examples() {
        let v = usual_convergence_check(&reciprocal(), &r(0.0), 1e-3, 1_000_000).unwrap();
        assert!(v.is_supported());
        assert_eq!(v.witness(), &[1001]);

        let v = usual_convergence_check(&squares_seq(0.0, 1.0), &r(1.0), 0.5, 1_000_000).unwrap();
        assert!(v.is_refuted());
        assert_eq!(v.witness(), &[1_000_000]);

        assert!(usual_convergence_check(&konst(4.0), &r(4.0), 0.1, 1000)
            .unwrap()
            .is_proven());
        let v = usual_convergence_check(&reciprocal(), &r(0.0), 1e-3, 1500).unwrap();
        assert!(v.is_refuted());
    }

    #[test]
    fn cauchy_examples() {
        let v = cauchy_check(&squares_seq(0.0, 1.0), 0.5, 1_000_000).unwrap();
        assert!(v.is_refuted());
        assert_eq!(v.witness(), &[1_000_000, 1_000_001]);
        let v = cauchy_check(&squares_seq(0.0, 1.0), 0.5, 100_000).unwrap();
        assert_eq!(v.witness(), &[316 * 316, 316 * 316 + 1]);

        assert!(cauchy_check(&konst(1.0), 0.1, 1000).unwrap().is_proven());
        let eventually = splice(&konst(1.0), &IndexSet::finite(vec![3, 8]).unwrap(), &konst(2.0)).unwrap();
        assert!(cauchy_check(&eventually, 0.1, 1000).unwrap().is_proven());
        assert!(cauchy_check(&reciprocal(), 1e-2, 1_000_000).unwrap().is_supported());
    }

    #[test]
    fn distance_sequence_examples() {
        let d = distance_sequence(&konst(2.0), &r(2.0)).unwrap();
        assert!((1..=10).all(|n| d.eval(n) == r(0.0)));
        let d = distance_sequence(&squares_seq(0.0, 3.0), &r(3.0)).unwrap();
        for n in 1..=20u64 {
            let sq = (1..=5).any(|k| k * k == n);
            assert_eq!(d.eval(n), r(if sq { 3.0 } else { 0.0 }), "n = {n}");
        }
        let d = distance_sequence(&parity_seq(0.0, 2.0), &r(0.0)).unwrap();
        let terms: Vec<Point> = (1..=4).map(|n| d.eval(n)).collect();
        assert_eq!(terms, vec![r(2.0), r(0.0), r(2.0), r(0.0)]);
    }

    #[test]
    fn uniqueness_examples() {
        let x = squares_seq(0.0, 1.0);
        assert!(stat_limit_uniqueness(&x, &r(1.0), &r(1.0), 10_000).unwrap().is_proven());
        assert!(stat_limit_uniqueness(&x, &r(1.0), &r(0.0), 10_000).unwrap().is_proven());
        let blind = MetricSpace::custom("blind", crate::metric_spaces::Domain::Reals, |_, _| 0.0);
        let y = konst(1.0).with_space(&blind).unwrap();
        assert!(matches!(
            stat_limit_uniqueness(&y, &r(1.0), &r(0.0), 1000),
            Err(Error::Domain(_))
        ));
        // 1 sits at distance 0 from everything, so x ≡ 1 "converges" to both 5 and 9.
        let hub = MetricSpace::custom("hub", crate::metric_spaces::Domain::Reals, |p, q| {
            let (p, q) = (p.as_real().unwrap(), q.as_real().unwrap());
            if p == 1.0 || q == 1.0 {
                0.0
            } else {
                (p - q).abs()
            }
        });
        let z = konst(1.0).with_space(&hub).unwrap();
        assert!(stat_limit_uniqueness(&z, &r(5.0), &r(9.0), 1000).unwrap().is_refuted());
    }

    #[test]
    fn inheritance_examples() {
        let x = squares_seq(0.0, 1.0);
        let h = 100_000;
        let out = subsequence_inheritance(&x, &IndexSet::squares().complement(), &r(1.0), h).unwrap();
        assert!(out.agree && out.measured.is_proven());
        let out = subsequence_inheritance(&x, &IndexSet::evens(), &r(1.0), h).unwrap();
        assert!(out.agree && out.measured.is_proven());
        assert_eq!(out.bounds.lower, Rational::new(1, 2));
        assert!(matches!(
            subsequence_inheritance(&x, &IndexSet::squares(), &r(1.0), h),
            Err(Error::Inapplicable(_))
        ));
        assert!(matches!(
            subsequence_inheritance(&parity_seq(0.0, 1.0), &IndexSet::evens(), &r(0.0), h),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn subsequence_report_is_exact() {
        let x = squares_seq(0.0, 1.0);
        let k = IndexSet::squares()
            .complement()
            .union(&IndexSet::progression(1, 7).unwrap());
        let sub = subsequence(&x, &k).unwrap();
        let rep = stat_convergence_report(sub.sequence(), &r(1.0), &[0.5], 10_000).unwrap();
        assert!(rep.overall.is_proven());
    }
}
