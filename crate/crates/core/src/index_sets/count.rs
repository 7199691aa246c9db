//! Prefix counting `|K(n)|`, enumeration and ranking.
//!
//! Closed forms are used where the expression tree allows; anything else
//! falls back to a membership scan. Scans over disjoint ranges run in
//! parallel and are merged by addition.

use num_integer::Integer;
use rayon::prelude::*;
use std::iter::Peekable;

use super::{IndexSet, SetExpr};

/// Downward scan length tried by `latest_member` before searching.
const LATEST_SCAN: u64 = 256;

/// Ranges shorter than this are scanned on the calling thread.
const PARALLEL_CHUNK: u64 = 1 << 16;

/// Linear enumeration gives up past this index.
const SCAN_LIMIT: u64 = 1 << 40;
/// Ceiling for rank search over closed counts.
const SEARCH_LIMIT: u64 = 1 << 62;

/// The progression `{first, first + step, ...}` equal to the intersection of
/// two progressions, or `None` if they are disjoint.
pub(crate) fn progression_meet(f1: u64, s1: u64, f2: u64, s2: u64) -> Option<(u64, u64)> {
    let (f1, s1, f2, s2) = (f1 as i128, s1 as i128, f2 as i128, s2 as i128);
    let g = s1.gcd(&s2);
    if (f2 - f1).rem_euclid(g) != 0 {
        return None;
    }
    let lcm = s1 / g * s2;
    // Solve f1 + s1·t ≡ f2 (mod s2).
    let m = s2 / g;
    let a = (s1 / g).rem_euclid(m);
    let rhs = ((f2 - f1) / g).rem_euclid(m);
    let t = if m == 1 {
        0
    } else {
        (rhs * mod_inverse(a, m)).rem_euclid(m)
    };
    let mut x = f1 + s1 * t;
    let floor = f1.max(f2);
    if x < floor {
        x += (floor - x + lcm - 1) / lcm * lcm;
    }
    Some((u64::try_from(x).ok()?, u64::try_from(lcm).ok()?))
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let ext = a.extended_gcd(&m);
    ext.x.rem_euclid(m)
}

fn progression_count(first: u64, step: u64, n: u64) -> u64 {
    if n < first {
        0
    } else {
        (n - first) / step + 1
    }
}

impl IndexSet {
    /// `|{k ∈ K : k ≤ n}|`. Exact for every variant.
    pub fn count_prefix(&self, n: u64) -> u64 {
        self.try_count(n).unwrap_or_else(|| self.count_range(1, n))
    }

    /// Counts at several horizons, sharing one scan when a scan is needed.
    pub fn counts_at(&self, horizons: &[u64]) -> Vec<u64> {
        let Some(&max) = horizons.iter().max() else {
            return Vec::new();
        };
        if self.try_count(max).is_some() {
            return horizons
                .iter()
                .map(|&n| self.try_count(n).expect("closed form"))
                .collect();
        }
        let mut order: Vec<usize> = (0..horizons.len()).collect();
        order.sort_by_key(|&i| horizons[i]);
        let mut out = vec![0; horizons.len()];
        let (mut done, mut acc) = (0u64, 0u64);
        for i in order {
            let n = horizons[i];
            if n > done {
                acc += self.count_range(done + 1, n);
                done = n;
            }
            out[i] = acc;
        }
        out
    }

    /// Number of members in `lo..=hi` by membership tests.
    pub fn count_range(&self, lo: u64, hi: u64) -> u64 {
        let lo = lo.max(1);
        if hi < lo {
            return 0;
        }
        if hi - lo < PARALLEL_CHUNK {
            return (lo..=hi).filter(|&k| self.contains(k)).count() as u64;
        }
        let chunks = (hi - lo) / PARALLEL_CHUNK + 1;
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let a = lo + c * PARALLEL_CHUNK;
                let b = (a + PARALLEL_CHUNK - 1).min(hi);
                (a..=b).filter(|&k| self.contains(k)).count() as u64
            })
            .sum()
    }

    /// Whether `count_prefix` is available without a membership scan.
    pub fn has_closed_count(&self) -> bool {
        self.try_count(1).is_some()
    }

    pub(crate) fn try_count(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return Some(0);
        }
        match self.expr() {
            SetExpr::Empty => Some(0),
            SetExpr::Full => Some(n),
            SetExpr::ArithmeticProgression { first, step } => Some(progression_count(*first, *step, n)),
            SetExpr::PolynomialImage(p) => Some(p.count_le(n)),
            SetExpr::FiniteSet(v) => Some(v.partition_point(|&x| x <= n) as u64),
            SetExpr::Complement(a) => a.try_count(n).map(|c| n - c),
            SetExpr::Union(a, b) => {
                let both = intersection_count(a, b, n)?;
                Some(a.try_count(n)? + b.try_count(n)? - both)
            }
            SetExpr::Intersection(a, b) => intersection_count(a, b, n),
            SetExpr::Predicate(_) => None,
            SetExpr::RankImage { sub, along } => {
                if !along.has_closed_count() {
                    return None;
                }
                let top = along.nth(n)?;
                if !sub.has_predicate() {
                    if let Some(it) = along.direct_elements(top) {
                        return Some(it.filter(|&m| sub.contains(m)).count() as u64);
                    }
                }
                sub.try_count(top)
            }
            SetExpr::RankParity { of, odd } => of.try_count(n).map(|c| if *odd { c.div_ceil(2) } else { c / 2 }),
        }
    }

    /// Members `≤ n` in increasing order, when they can be listed directly.
    pub(crate) fn direct_elements(&self, n: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        match self.expr() {
            SetExpr::Empty => Some(Box::new(std::iter::empty())),
            SetExpr::ArithmeticProgression { first, step } => Some(Box::new(
                (*first..=n.max(*first))
                    .step_by(*step as usize)
                    .filter(move |&k| k <= n),
            )),
            SetExpr::PolynomialImage(p) => {
                let k0 = p.first_positive_arg();
                Some(Box::new(
                    (k0..)
                        .map(move |k| p.eval(k))
                        .take_while(move |&v| v <= n as i128)
                        .map(|v| v as u64),
                ))
            }
            SetExpr::FiniteSet(v) => Some(Box::new(v.iter().copied().take_while(move |&x| x <= n))),
            SetExpr::Intersection(a, b) => {
                let (walk, test) = match (a.direct_cost(n), b.direct_cost(n)) {
                    (Some(ca), Some(cb)) if cb < ca => (b, a),
                    (Some(_), _) => (a, b),
                    (None, Some(_)) => (b, a),
                    (None, None) => return None,
                };
                Some(Box::new(walk.direct_elements(n)?.filter(move |&k| test.contains(k))))
            }
            SetExpr::RankParity { of, odd } => {
                let skip = if *odd { 0 } else { 1 };
                Some(Box::new(of.direct_elements(n)?.skip(skip).step_by(2)))
            }
            SetExpr::Union(a, b) => Some(Box::new(MergeUnion {
                left: a.direct_elements(n)?.peekable(),
                right: b.direct_elements(n)?.peekable(),
            })),
            _ => None,
        }
    }

    fn direct_cost(&self, n: u64) -> Option<u64> {
        match self.expr() {
            SetExpr::Empty
            | SetExpr::ArithmeticProgression { .. }
            | SetExpr::PolynomialImage(_)
            | SetExpr::FiniteSet(_) => self.try_count(n),
            SetExpr::Intersection(a, b) => match (a.direct_cost(n), b.direct_cost(n)) {
                (Some(ca), Some(cb)) => Some(ca.min(cb)),
                (ca, cb) => ca.or(cb),
            },
            SetExpr::Union(a, b) => Some(a.direct_cost(n)? + b.direct_cost(n)?),
            SetExpr::RankParity { of, .. } => of.direct_cost(n),
            _ => None,
        }
    }

    /// The `rank`-th smallest member (1-based), or `None` if there is none.
    pub fn nth(&self, rank: u64) -> Option<u64> {
        if rank == 0 {
            return None;
        }
        match self.expr() {
            SetExpr::Empty => None,
            SetExpr::Full => Some(rank),
            SetExpr::ArithmeticProgression { first, step } => first.checked_add((rank - 1).checked_mul(*step)?),
            SetExpr::PolynomialImage(p) => p.nth_image(rank),
            SetExpr::FiniteSet(v) => v.get(rank as usize - 1).copied(),
            SetExpr::RankParity { of, odd } => of.nth(if *odd { 2 * rank - 1 } else { 2 * rank }),
            _ if self.has_closed_count() => self.nth_by_search(rank),
            _ => self.members().nth(rank as usize - 1),
        }
    }

    fn nth_by_search(&self, rank: u64) -> Option<u64> {
        // Each index adds at most one member, so `m + (rank - |K(m)|)` never
        // passes the answer. Dense sets converge in a step or two.
        let mut lo = rank - 1;
        let mut probe = rank;
        for _ in 0..4 {
            let c = self.count_prefix(probe);
            if c >= rank {
                return Some(probe);
            }
            lo = probe;
            probe = probe.checked_add(rank - c)?;
        }
        if self.is_finite() == Some(true) && self.count_prefix(probe) < rank {
            return None;
        }
        let mut hi = probe;
        while self.count_prefix(hi) < rank {
            if hi >= SEARCH_LIMIT {
                return None;
            }
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        if let Some(mut it) = self.direct_elements(hi) {
            return it.nth((rank - 1) as usize);
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if self.count_prefix(mid) >= rank {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// All members in increasing order. Infinite sets yield forever; scans of
    /// opaque sets stop after an internal limit.
    pub fn members(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self.expr() {
            SetExpr::Full => Box::new(1..),
            SetExpr::ArithmeticProgression { first, step } => Box::new((*first..).step_by(*step as usize)),
            SetExpr::PolynomialImage(p) => Box::new((p.first_positive_arg()..).map(move |k| p.eval(k) as u64)),
            SetExpr::FiniteSet(v) => Box::new(v.iter().copied()),
            SetExpr::Empty => Box::new(std::iter::empty()),
            _ => Box::new((1..=SCAN_LIMIT).filter(move |&k| self.contains(k))),
        }
    }

    /// Largest member `≤ n`.
    pub fn last_member_upto(&self, n: u64) -> Option<u64> {
        let c = self.try_count(n)?;
        if c == 0 {
            return None;
        }
        self.nth(c)
    }

    /// Largest member `≤ n`. A short downward scan comes first, then the
    /// closed-form search if there is one.
    pub fn latest_member(&self, n: u64) -> Option<u64> {
        if !self.has_closed_count() {
            return (1..=n).rev().find(|&k| self.contains(k));
        }
        let floor = n.saturating_sub(LATEST_SCAN);
        match (floor + 1..=n).rev().find(|&k| self.contains(k)) {
            Some(k) => Some(k),
            None if floor == 0 => None,
            None => self.last_member_upto(floor),
        }
    }
}

/// Sorted, duplicate-free merge of two increasing streams.
struct MergeUnion<'a> {
    left: Peekable<Box<dyn Iterator<Item = u64> + 'a>>,
    right: Peekable<Box<dyn Iterator<Item = u64> + 'a>>,
}

impl Iterator for MergeUnion<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match (self.left.peek().copied(), self.right.peek().copied()) {
            (Some(l), Some(r)) if l == r => {
                self.right.next();
                self.left.next()
            }
            (Some(l), Some(r)) if l < r => self.left.next(),
            (Some(_), Some(_)) | (None, Some(_)) => self.right.next(),
            (Some(_), None) => self.left.next(),
            (None, None) => None,
        }
    }
}

fn intersection_count(a: &IndexSet, b: &IndexSet, n: u64) -> Option<u64> {
    match (a.expr(), b.expr()) {
        (SetExpr::Empty, _) | (_, SetExpr::Empty) => return Some(0),
        (SetExpr::Full, _) => return b.try_count(n),
        (_, SetExpr::Full) => return a.try_count(n),
        (
            SetExpr::ArithmeticProgression { first: f1, step: s1 },
            SetExpr::ArithmeticProgression { first: f2, step: s2 },
        ) => {
            return Some(match progression_meet(*f1, *s1, *f2, *s2) {
                Some((f, s)) => progression_count(f, s, n),
                None => 0,
            })
        }
        _ => {}
    }
    // Walk the sparser directly listable side and test the other.
    let pick = match (a.direct_cost(n), b.direct_cost(n)) {
        (Some(ca), Some(cb)) => Some(if ca <= cb { (a, b) } else { (b, a) }),
        (Some(_), None) => Some((a, b)),
        (None, Some(_)) => Some((b, a)),
        (None, None) => None,
    };
    if let Some((walk, test)) = pick {
        let it = walk.direct_elements(n)?;
        return Some(it.filter(|&k| test.contains(k)).count() as u64);
    }
    match (a.expr(), b.expr()) {
        (SetExpr::Complement(c), _) => Some(b.try_count(n)? - intersection_count(c, b, n)?),
        (_, SetExpr::Complement(c)) => Some(a.try_count(n)? - intersection_count(a, c, n)?),
        _ => None,
    }
}
