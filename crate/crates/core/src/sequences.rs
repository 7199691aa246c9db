//! Lazy metric-valued sequences, subsequences and statistical equivalence.
//!
//! A [`LazySequence`] is an expression tree. Constants, splices, alternations
//! and finite tables are understood structurally, so their exceedance and
//! disagreement sets come out as symbolic [`IndexSet`]s with exact densities.
//! Anything else falls back to predicate-backed sets counted by iteration.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Error, Result};
use crate::index_sets::{null_density_verdict, IndexSet, SetExpr};
use crate::metric_spaces::{MetricSpace, Point};
use crate::verdict::Verdict;

type TermFn = dyn Fn(u64) -> Point + Send + Sync;

enum SeqNode {
    Constant(Point),
    /// `patch` on `on`, `base` elsewhere.
    Splice {
        base: LazySequence,
        on: IndexSet,
        patch: LazySequence,
    },
    /// `odd` or `even` according to the parity of `|along(n)|`.
    Alternating {
        along: IndexSet,
        odd: Point,
        even: Point,
    },
    /// `center + 1/(n + shift)`.
    Reciprocal {
        center: f64,
        shift: f64,
    },
    /// `head[n - 1]` for `n ≤ head.len()`, then the tail sequence.
    Table {
        head: Vec<Point>,
        tail: LazySequence,
    },
    Function(Arc<TermFn>),
    Subsequence {
        parent: LazySequence,
        enumerator: Arc<Enumerator>,
    },
}

/// A sequence `(x_n)` of points of a metric space, evaluated on demand.
#[derive(Clone)]
pub struct LazySequence {
    node: Arc<SeqNode>,
    space: MetricSpace,
    description: Arc<str>,
}

impl LazySequence {
    fn wrap(space: &MetricSpace, node: SeqNode, description: String) -> Self {
        // Over a one-point space every sequence is the constant one.
        let node = match space.sole_point() {
            Some(p) if !matches!(node, SeqNode::Constant(_)) => SeqNode::Constant(p.clone()),
            _ => node,
        };
        LazySequence {
            node: Arc::new(node),
            space: space.clone(),
            description: description.into(),
        }
    }

    pub fn constant(space: &MetricSpace, point: Point) -> Result<Self> {
        space.check_point(&point)?;
        let description = format!("const({point})");
        Ok(Self::wrap(space, SeqNode::Constant(point), description))
    }

    /// `center + 1/(n + shift)` on a real domain; `shift > -1`.
    pub fn reciprocal(space: &MetricSpace, center: f64, shift: f64) -> Result<Self> {
        space.check_point(&Point::Real(center))?;
        if !(shift > -1.0 && shift.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "reciprocal shift must exceed -1, got {shift}"
            )));
        }
        let description = match (center == 0.0, shift == 0.0) {
            (true, true) => "1/n".to_string(),
            (true, false) => format!("1/(n+{shift})"),
            _ => format!("{center}+1/(n+{shift})"),
        };
        Ok(Self::wrap(space, SeqNode::Reciprocal { center, shift }, description))
    }

    /// Terms listed in `head` first, then `tail` evaluated at the same index.
    pub fn table(space: &MetricSpace, head: Vec<Point>, tail: LazySequence) -> Result<Self> {
        for p in &head {
            space.check_point(p)?;
        }
        same_domain(space, &tail.space)?;
        let description = format!("table[{} terms; then {}]", head.len(), tail);
        Ok(Self::wrap(space, SeqNode::Table { head, tail }, description))
    }

    /// Terms alternate `odd`, `even`, `odd`, ... along the enumeration of
    /// `along`; an index is odd or even by the parity of `|along(n)|`.
    pub fn alternating(space: &MetricSpace, along: IndexSet, odd: Point, even: Point) -> Result<Self> {
        space.check_point(&odd)?;
        space.check_point(&even)?;
        let description = format!("alternate({odd}, {even} along {along})");
        Ok(Self::wrap(
            space,
            SeqNode::Alternating { along, odd, even },
            description,
        ))
    }

    /// An opaque term function. Terms are not checked against the space
    /// until a distance is taken.
    pub fn from_fn(
        space: &MetricSpace,
        description: impl Into<String>,
        term: impl Fn(u64) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self::wrap(space, SeqNode::Function(Arc::new(term)), description.into())
    }

    /// The same sequence under another description.
    pub fn named(&self, description: impl Into<String>) -> Self {
        LazySequence {
            description: description.into().into(),
            ..self.clone()
        }
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Same terms measured with another metric on the same point domain.
    pub fn with_space(&self, space: &MetricSpace) -> Result<Self> {
        same_domain(space, &self.space)?;
        Ok(LazySequence {
            node: Arc::clone(&self.node),
            space: space.clone(),
            description: Arc::clone(&self.description),
        })
    }

    /// The `n`-th term (`n ≥ 1`).
    pub fn eval(&self, n: u64) -> Point {
        assert!(n >= 1, "sequences are indexed from 1");
        match &*self.node {
            SeqNode::Constant(p) => p.clone(),
            SeqNode::Splice { base, on, patch } => {
                if on.contains(n) {
                    patch.eval(n)
                } else {
                    base.eval(n)
                }
            }
            SeqNode::Alternating { along, odd, even } => {
                if along.count_prefix(n) % 2 == 1 {
                    odd.clone()
                } else {
                    even.clone()
                }
            }
            SeqNode::Reciprocal { center, shift } => Point::Real(center + 1.0 / (n as f64 + shift)),
            SeqNode::Table { head, tail } => match head.get((n - 1) as usize) {
                Some(p) => p.clone(),
                None => tail.eval(n),
            },
            SeqNode::Function(f) => f(n),
            SeqNode::Subsequence { parent, enumerator } => parent.eval(enumerator.nth(n)),
        }
    }

    /// Every value the sequence can take, when that is a known finite set.
    pub fn finite_range(&self) -> Option<Vec<Point>> {
        let mut out = Vec::new();
        self.collect_range(&mut out)?;
        Some(out)
    }

    fn collect_range(&self, out: &mut Vec<Point>) -> Option<()> {
        let mut push = |p: &Point| {
            if !out.contains(p) {
                out.push(p.clone());
            }
        };
        match &*self.node {
            SeqNode::Constant(p) => push(p),
            SeqNode::Alternating { odd, even, .. } => {
                push(odd);
                push(even);
            }
            SeqNode::Splice { base, patch, .. } => {
                base.collect_range(out)?;
                patch.collect_range(out)?;
            }
            SeqNode::Table { head, tail } => {
                head.iter().for_each(push);
                tail.collect_range(out)?;
            }
            SeqNode::Subsequence { parent, .. } => parent.collect_range(out)?,
            SeqNode::Reciprocal { .. } | SeqNode::Function(_) => return None,
        }
        Some(())
    }

    /// Structural map of every term through `f`, into `space`.
    pub(crate) fn map_points(
        &self,
        space: &MetricSpace,
        f: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    ) -> LazySequence {
        let description = format!("map({self})");
        let node = match &*self.node {
            SeqNode::Constant(p) => SeqNode::Constant(f(p)),
            SeqNode::Splice { base, on, patch } => SeqNode::Splice {
                base: base.map_points(space, Arc::clone(&f)),
                on: on.clone(),
                patch: patch.map_points(space, Arc::clone(&f)),
            },
            SeqNode::Alternating { along, odd, even } => SeqNode::Alternating {
                along: along.clone(),
                odd: f(odd),
                even: f(even),
            },
            SeqNode::Table { head, tail } => SeqNode::Table {
                head: head.iter().map(|p| f(p)).collect(),
                tail: tail.map_points(space, Arc::clone(&f)),
            },
            _ => {
                let inner = self.clone();
                SeqNode::Function(Arc::new(move |n| f(&inner.eval(n))))
            }
        };
        Self::wrap(space, node, description)
    }
}

impl fmt::Display for LazySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

impl fmt::Debug for LazySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazySequence({} in {})", self.description, self.space.name())
    }
}

fn same_domain(a: &MetricSpace, b: &MetricSpace) -> Result<()> {
    if a.domain() == b.domain() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "spaces `{}` and `{}` have different point domains",
            a.name(),
            b.name()
        )))
    }
}

/// Term `n` is `patch(n)` for `n ∈ on` and `base(n)` otherwise.
pub fn splice(base: &LazySequence, on: &IndexSet, patch: &LazySequence) -> Result<LazySequence> {
    same_domain(&base.space, &patch.space)?;
    match on.expr() {
        SetExpr::Empty => return Ok(base.clone()),
        SetExpr::Full => return patch.with_space(&base.space),
        _ => {}
    }
    let description = format!("splice({base}, {on}, {patch})");
    let node = SeqNode::Splice {
        base: base.clone(),
        on: on.clone(),
        patch: patch.clone(),
    };
    Ok(LazySequence::wrap(&base.space, node, description))
}

const SCAN_PER_MEMBER: u64 = 64;
const SCAN_SLACK: u64 = 4096;
/// Sparse sets are listed into the cache up to this many members.
const LIST_CAP: u64 = 1 << 22;

/// Enumerates an infinite index set in increasing order.
pub(crate) struct Enumerator {
    indices: IndexSet,
    /// Members found so far and the last index scanned.
    cache: RwLock<(Vec<u64>, u64)>,
    /// Set once a scan ran out of budget: the set is too sparse to walk.
    sparse: AtomicBool,
}

impl Enumerator {
    fn new(indices: IndexSet) -> Self {
        Enumerator {
            indices,
            cache: RwLock::new((Vec::new(), 0)),
            sparse: AtomicBool::new(false),
        }
    }

    /// `n(k)`, the `k`-th member (`k ≥ 1`).
    ///
    /// Ranks near the cached prefix are reached by scanning. Sets with a
    /// closed count jump to far ranks by search instead.
    fn nth(&self, k: u64) -> u64 {
        assert!(k >= 1, "enumeration starts at 1");
        {
            let cache = self.cache.read().expect("enumerator lock");
            if let Some(&m) = cache.0.get((k - 1) as usize) {
                return m;
            }
        }
        let closed = self.indices.has_closed_count();
        if closed && self.sparse.load(Ordering::Relaxed) {
            return self
                .listed(k)
                .unwrap_or_else(|| self.indices.nth(k).expect("index set is infinite"));
        }
        let mut cache = self.cache.write().expect("enumerator lock");
        let missing = k.saturating_sub(cache.0.len() as u64);
        let budget = if closed {
            missing.saturating_mul(SCAN_PER_MEMBER).saturating_add(SCAN_SLACK)
        } else {
            u64::MAX
        };
        let mut steps = 0;
        while (cache.0.len() as u64) < k && steps < budget {
            let next = cache.1 + 1;
            cache.1 = next;
            steps += 1;
            if self.indices.contains(next) {
                cache.0.push(next);
            }
        }
        match cache.0.get((k - 1) as usize) {
            Some(&m) => m,
            None => {
                self.sparse.store(true, Ordering::Relaxed);
                drop(cache);
                self.listed(k)
                    .unwrap_or_else(|| self.indices.nth(k).expect("index set is infinite"))
            }
        }
    }

    /// Refills the cache by listing members up to a doubled rank, when the
    /// set can be listed directly.
    fn listed(&self, k: u64) -> Option<u64> {
        if k > LIST_CAP {
            return None;
        }
        let mut cache = self.cache.write().expect("enumerator lock");
        if let Some(&m) = cache.0.get((k - 1) as usize) {
            return Some(m);
        }
        let target = k.max(2 * cache.0.len() as u64).min(LIST_CAP);
        let top = self.indices.nth(target)?;
        let members: Vec<u64> = self.indices.direct_elements(top)?.collect();
        *cache = (members, top);
        cache.0.get((k - 1) as usize).copied()
    }
}

/// `x′ = (x_{n(k)})` for the increasing enumeration `n(k)` of an infinite set.
#[derive(Clone)]
pub struct SubsequenceSpec {
    parent: LazySequence,
    indices: IndexSet,
    enumerator: Arc<Enumerator>,
    sequence: LazySequence,
}

impl SubsequenceSpec {
    pub fn parent(&self) -> &LazySequence {
        &self.parent
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    /// `n(k)`.
    pub fn index_of(&self, k: u64) -> u64 {
        self.enumerator.nth(k)
    }

    pub fn term(&self, k: u64) -> Point {
        self.sequence.eval(k)
    }

    /// The subsequence as a sequence in its own right, indexed by `k`.
    pub fn sequence(&self) -> &LazySequence {
        &self.sequence
    }
}

impl fmt::Debug for SubsequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsequenceSpec({} along {})", self.parent, self.indices)
    }
}

/// The subsequence of `x` along `indices`, which must be certainly infinite.
pub fn subsequence(x: &LazySequence, indices: &IndexSet) -> Result<SubsequenceSpec> {
    match indices.is_finite() {
        Some(false) => {}
        Some(true) => return Err(Error::Domain(format!("index set {indices} is finite"))),
        None => {
            return Err(Error::Domain(format!(
                "index set {indices} is not known to be infinite; assert infinitude on the predicate"
            )))
        }
    }
    let enumerator = Arc::new(Enumerator::new(indices.clone()));
    let sequence = simplify_subsequence(x, indices).unwrap_or_else(|| {
        let description = format!("sub({x}, {indices})");
        let node = SeqNode::Subsequence {
            parent: x.clone(),
            enumerator: Arc::clone(&enumerator),
        };
        LazySequence::wrap(&x.space, node, description)
    });
    Ok(SubsequenceSpec {
        parent: x.clone(),
        indices: indices.clone(),
        enumerator,
        sequence,
    })
}

/// Closed forms for `x` along `k`, reindexed from 1.
fn simplify_subsequence(x: &LazySequence, k: &IndexSet) -> Option<LazySequence> {
    let space = &x.space;
    let described = |seq: LazySequence| LazySequence {
        description: format!("sub({x}, {k})").into(),
        ..seq
    };
    if matches!(k.expr(), SetExpr::Full) {
        return Some(x.clone());
    }
    match &*x.node {
        SeqNode::Constant(_) => Some(x.clone()),
        SeqNode::Splice { base, on, patch } => {
            let inner = if k.certainly_subset_of(on) {
                patch
            } else if k.certainly_disjoint(on) {
                base
            } else {
                return None;
            };
            let simplified = simplify_subsequence(&inner.with_space(space).ok()?, k)?;
            Some(described(simplified))
        }
        SeqNode::Alternating { along, odd, even } => {
            if k == along {
                let node = SeqNode::Alternating {
                    along: IndexSet::full(),
                    odd: odd.clone(),
                    even: even.clone(),
                };
                return Some(LazySequence::wrap(space, node, format!("sub({x}, {k})")));
            }
            for (parity, point) in [(true, odd), (false, even)] {
                if k.certainly_subset_of(&along.rank_parity_subset(parity)) {
                    let node = SeqNode::Constant(point.clone());
                    return Some(LazySequence::wrap(space, node, format!("sub({x}, {k})")));
                }
            }
            None
        }
        _ => None,
    }
}

/// Records the first distance failure seen inside a lazy predicate.
#[derive(Clone, Default)]
pub struct FaultLatch(Arc<Mutex<Option<Error>>>);

impl FaultLatch {
    fn record(&self, err: Error) {
        let mut slot = self.0.lock().expect("fault latch");
        if slot.is_none() {
            *slot = Some(err);
        }
    }

    /// Fails with the first recorded error, if any.
    pub fn check(&self) -> Result<()> {
        match self.0.lock().expect("fault latch").clone() {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }
}

/// An exceedance set `{m : d(x_m, a) ≥ ε}` together with the latch of the
/// predicate leaves that compute it.
#[derive(Clone)]
pub struct Exceedance {
    pub set: IndexSet,
    pub faults: FaultLatch,
}

/// `{m : d(x_m, a) ≥ ε}` measured in the space of `x`.
pub fn exceedance(x: &LazySequence, a: &Point, epsilon: f64) -> Result<Exceedance> {
    x.space.check_point(a)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let faults = FaultLatch::default();
    let set = exceedance_within(x, &x.space, a, epsilon, &IndexSet::full(), &faults)?;
    Ok(Exceedance { set, faults })
}

fn exceedance_within(
    x: &LazySequence,
    space: &MetricSpace,
    a: &Point,
    eps: f64,
    within: &IndexSet,
    faults: &FaultLatch,
) -> Result<IndexSet> {
    if matches!(within.expr(), SetExpr::Empty) {
        return Ok(IndexSet::empty());
    }
    let exceeds = |p: &Point| -> Result<bool> { Ok(space.distance(p, a)? >= eps) };
    match &*x.node {
        SeqNode::Constant(p) => Ok(if exceeds(p)? { within.clone() } else { IndexSet::empty() }),
        SeqNode::Splice { base, on, patch } => {
            let inside = exceedance_within(patch, space, a, eps, &within.intersection(on), faults)?;
            let outside = exceedance_within(base, space, a, eps, &within.intersection(&on.complement()), faults)?;
            Ok(inside.union(&outside))
        }
        SeqNode::Alternating { along, odd, even } if within.certainly_subset_of(along) => {
            Ok(parity_part(along, exceeds(odd)?, exceeds(even)?, within))
        }
        SeqNode::Table { head, tail } => {
            let mut hits = Vec::new();
            for (i, p) in head.iter().enumerate() {
                let n = i as u64 + 1;
                if within.contains(n) && exceeds(p)? {
                    hits.push(n);
                }
            }
            let rest = within.intersection(&IndexSet::at_least(head.len() as u64 + 1));
            Ok(IndexSet::finite(hits)?.union(&exceedance_within(tail, space, a, eps, &rest, faults)?))
        }
        SeqNode::Subsequence { parent, enumerator } if enumerator.indices.has_closed_count() => {
            let along = &enumerator.indices;
            let inner = exceedance_within(parent, space, a, eps, along, faults)?;
            Ok(IndexSet::rank_image(&inner, along).intersection(within))
        }
        _ => {
            let (seq, space, a, within, faults) = (x.clone(), space.clone(), a.clone(), within.clone(), faults.clone());
            let tag = format!("d({x}, {a}) >= {eps}");
            Ok(IndexSet::predicate(tag, move |n| {
                within.contains(n)
                    && match space.distance(&seq.eval(n), &a) {
                        Ok(d) => d >= eps,
                        Err(err) => {
                            faults.record(err);
                            false
                        }
                    }
            }))
        }
    }
}

/// Members of `along` at odd and/or even rank, restricted to `within ⊆ along`.
fn parity_part(along: &IndexSet, odd: bool, even: bool, within: &IndexSet) -> IndexSet {
    let part = match (odd, even) {
        (true, true) => along.clone(),
        (true, false) => along.rank_parity_subset(true),
        (false, true) => along.rank_parity_subset(false),
        (false, false) => return IndexSet::empty(),
    };
    if within == along {
        part
    } else {
        part.intersection(within)
    }
}

/// `{n : x_n ≠ y_n}`, compared by exact representation.
pub fn disagreement_set(x: &LazySequence, y: &LazySequence) -> Result<IndexSet> {
    same_domain(&x.space, &y.space)?;
    Ok(disagreement_within(x, y, &IndexSet::full()))
}

fn disagreement_within(x: &LazySequence, y: &LazySequence, within: &IndexSet) -> IndexSet {
    if matches!(within.expr(), SetExpr::Empty) || Arc::ptr_eq(&x.node, &y.node) {
        return IndexSet::empty();
    }
    let split = |base: &LazySequence, on: &IndexSet, patch: &LazySequence, other: &LazySequence| {
        disagreement_within(patch, other, &within.intersection(on)).union(&disagreement_within(
            base,
            other,
            &within.intersection(&on.complement()),
        ))
    };
    match (&*x.node, &*y.node) {
        (_, SeqNode::Splice { base, on, patch }) if Arc::ptr_eq(&base.node, &x.node) => {
            disagreement_within(x, patch, &within.intersection(on))
        }
        (SeqNode::Splice { base, on, patch }, _) if Arc::ptr_eq(&base.node, &y.node) => {
            disagreement_within(patch, y, &within.intersection(on))
        }
        (SeqNode::Constant(p), SeqNode::Constant(q)) => {
            if p == q {
                IndexSet::empty()
            } else {
                within.clone()
            }
        }
        (SeqNode::Splice { base, on, patch }, _) => split(base, on, patch, y),
        (_, SeqNode::Splice { base, on, patch }) => split(base, on, patch, x),
        (SeqNode::Table { head, tail }, _) => table_disagreement(head, tail, y, within),
        (_, SeqNode::Table { head, tail }) => table_disagreement(head, tail, x, within),
        (SeqNode::Alternating { along, odd, even }, SeqNode::Constant(c))
        | (SeqNode::Constant(c), SeqNode::Alternating { along, odd, even })
            if within.certainly_subset_of(along) =>
        {
            parity_part(along, odd != c, even != c, within)
        }
        (
            SeqNode::Alternating { along, odd, even },
            SeqNode::Alternating {
                along: along2,
                odd: odd2,
                even: even2,
            },
        ) if along == along2 && within.certainly_subset_of(along) => {
            parity_part(along, odd != odd2, even != even2, within)
        }
        (SeqNode::Subsequence { parent, enumerator }, SeqNode::Constant(_))
            if enumerator.indices.has_closed_count() =>
        {
            let along = &enumerator.indices;
            IndexSet::rank_image(&disagreement_within(parent, y, along), along).intersection(within)
        }
        (SeqNode::Constant(_), SeqNode::Subsequence { parent, enumerator })
            if enumerator.indices.has_closed_count() =>
        {
            let along = &enumerator.indices;
            IndexSet::rank_image(&disagreement_within(parent, x, along), along).intersection(within)
        }
        (
            SeqNode::Reciprocal { center, shift },
            SeqNode::Reciprocal {
                center: center2,
                shift: shift2,
            },
        ) if center == center2 && shift == shift2 => IndexSet::empty(),
        _ => {
            let (x, y, within) = (x.clone(), y.clone(), within.clone());
            let tag = format!("{x} != {y}");
            IndexSet::predicate(tag, move |n| within.contains(n) && x.eval(n) != y.eval(n))
        }
    }
}

fn table_disagreement(head: &[Point], tail: &LazySequence, other: &LazySequence, within: &IndexSet) -> IndexSet {
    let hits: Vec<u64> = (1..=head.len() as u64)
        .filter(|&n| within.contains(n) && head[(n - 1) as usize] != other.eval(n))
        .collect();
    let rest = within.intersection(&IndexSet::at_least(head.len() as u64 + 1));
    IndexSet::finite(hits)
        .expect("increasing")
        .union(&disagreement_within(tail, other, &rest))
}

/// Verdict on `x ≍ y`: the disagreement set has density zero.
pub fn is_statistically_equivalent(x: &LazySequence, y: &LazySequence, horizon: u64) -> Result<Verdict> {
    Ok(null_density_verdict(&disagreement_set(x, y)?, horizon))
}
