//! Natural density: exact values on the symbolic class and finite-horizon
//! estimates on a geometric ladder of prefix lengths.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{IndexSet, Rational, SetExpr};
use crate::error::{Error, Result};
use crate::verdict::{Evidence, Verdict};

/// Ratio between consecutive ladder rungs.
pub const LADDER_RATIO: u64 = 2;
/// Number of rungs, the last one being the horizon itself.
pub const LADDER_RUNGS: u32 = 12;
/// Rungs used for the liminf/limsup estimates.
pub const LADDER_TAIL: usize = 6;
/// Largest tail density still read as "tends to zero".
pub const ZERO_DENSITY_TOLERANCE: (i128, i128) = (1, 100);
/// Half-width of the band around 1 accepted for ratio profiles.
pub const RATIO_BAND: (i128, i128) = (1, 100);

/// Periods beyond this are not expanded into residue tables.
const MAX_PERIOD: u64 = 1 << 16;

fn tolerance(t: (i128, i128)) -> Rational {
    Rational::new(t.0, t.1)
}

/// `⌈h / 2^(L-i)⌉` for `i = 1..=L`, deduplicated and increasing.
pub fn horizon_ladder(horizon: u64) -> Vec<u64> {
    let horizon = horizon.max(1);
    let mut rungs: Vec<u64> = (1..=LADDER_RUNGS)
        .map(|i| {
            let div = LADDER_RATIO.pow(LADDER_RUNGS - i);
            horizon.div_ceil(div).max(1)
        })
        .collect();
    rungs.dedup();
    rungs
}

/// The last [`LADDER_TAIL`] rungs of the ladder ending at `horizon`.
pub fn ladder_tail(horizon: u64) -> Vec<u64> {
    let rungs = horizon_ladder(horizon);
    let skip = rungs.len().saturating_sub(LADDER_TAIL);
    rungs[skip..].to_vec()
}

/// Residue classes modulo `period` that agree with a set up to density zero.
struct Residues {
    period: u64,
    members: Vec<bool>,
}

impl Residues {
    fn constant(member: bool) -> Self {
        Residues {
            period: 1,
            members: vec![member],
        }
    }

    fn combine(&self, other: &Residues, op: impl Fn(bool, bool) -> bool) -> Option<Residues> {
        let period = self.period.lcm(&other.period);
        if period > MAX_PERIOD {
            return None;
        }
        let members = (0..period)
            .map(|r| {
                op(
                    self.members[(r % self.period) as usize],
                    other.members[(r % other.period) as usize],
                )
            })
            .collect();
        Some(Residues { period, members })
    }

    fn density(&self) -> Rational {
        let count = self.members.iter().filter(|&&m| m).count();
        Rational::new(count as i128, self.period as i128)
    }
}

fn periodic_form(set: &IndexSet) -> Option<Residues> {
    match set.expr() {
        SetExpr::Empty | SetExpr::FiniteSet(_) => Some(Residues::constant(false)),
        SetExpr::PolynomialImage(p) if p.degree() >= 2 => Some(Residues::constant(false)),
        SetExpr::Full => Some(Residues::constant(true)),
        SetExpr::ArithmeticProgression { first, step } => {
            if *step > MAX_PERIOD {
                return None;
            }
            let mut members = vec![false; *step as usize];
            members[(first % step) as usize] = true;
            Some(Residues { period: *step, members })
        }
        SetExpr::PolynomialImage(_) => None,
        SetExpr::Complement(a) => {
            let mut r = periodic_form(a)?;
            r.members.iter_mut().for_each(|m| *m = !*m);
            Some(r)
        }
        SetExpr::Union(a, b) => periodic_form(a)?.combine(&periodic_form(b)?, |x, y| x || y),
        SetExpr::Intersection(a, b) => periodic_form(a)?.combine(&periodic_form(b)?, |x, y| x && y),
        SetExpr::RankParity { of, .. } if exact_density(of).is_some_and(|d| d.is_zero()) => {
            Some(Residues::constant(false))
        }
        SetExpr::Predicate(_) | SetExpr::RankImage { .. } | SetExpr::RankParity { .. } => None,
    }
}

/// Natural density when it follows from the structure, `None` otherwise.
///
/// Finite boolean combinations of progressions, finite sets and polynomial
/// images are decided through residue tables; expressions with opaque leaves
/// fall back to absorption rules (a density-zero part never changes a union,
/// a density-one part never changes an intersection).
pub fn exact_density(set: &IndexSet) -> Option<Rational> {
    if let Some(r) = periodic_form(set) {
        return Some(r.density());
    }
    let zero = Rational::zero();
    let one = Rational::one();
    match set.expr() {
        SetExpr::Complement(a) => exact_density(a).map(|d| one - d),
        SetExpr::Union(a, b) => {
            let (da, db) = (exact_density(a), exact_density(b));
            if da == Some(one) || db == Some(one) {
                Some(one)
            } else if da == Some(zero) {
                db
            } else if db == Some(zero) {
                da
            } else {
                None
            }
        }
        SetExpr::RankImage { sub, along } => {
            let (ds, da) = (exact_density(sub)?, exact_density(along)?);
            (!da.is_zero()).then(|| ds / da)
        }
        SetExpr::RankParity { of, .. } => exact_density(of).map(|d| d / Rational::from_integer(2)),
        SetExpr::Intersection(a, b) => {
            let (da, db) = (exact_density(a), exact_density(b));
            if da == Some(zero) || db == Some(zero) {
                Some(zero)
            } else if da == Some(one) {
                db
            } else if db == Some(one) {
                da
            } else {
                None
            }
        }
        _ => None,
    }
}

/// One sample `count / base` of a density profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfilePoint {
    pub n: u64,
    pub count: u64,
    /// `n` for plain densities, `|K(n)|` for densities relative to `K`.
    pub base: u64,
}

impl ProfilePoint {
    pub fn value(&self) -> Rational {
        if self.base == 0 {
            Rational::zero()
        } else {
            Rational::new(self.count as i128, self.base as i128)
        }
    }

    pub fn approx(&self) -> f64 {
        if self.base == 0 {
            0.0
        } else {
            self.count as f64 / self.base as f64
        }
    }
}

impl Serialize for ProfilePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ProfilePoint", 3)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("num", &self.count)?;
        s.serialize_field("den", &self.base)?;
        s.end()
    }
}

/// The finite map `n ↦ |K(n)| / n` over a set of horizons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityProfile {
    /// False when some count came from an opaque predicate.
    pub exact: bool,
    pub points: Vec<ProfilePoint>,
}

impl DensityProfile {
    pub fn horizons(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.n).collect()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.points.iter().map(ProfilePoint::value).collect()
    }

    pub fn last(&self) -> Option<&ProfilePoint> {
        self.points.last()
    }

    /// Relative profile `|S(n)| / |K(n)|`, skipping horizons where `K(n)` is empty.
    pub fn relative(sub: &IndexSet, within: &IndexSet, horizons: &[u64]) -> DensityProfile {
        let num = sub.counts_at(horizons);
        let den = within.counts_at(horizons);
        DensityProfile {
            exact: !sub.has_predicate() && !within.has_predicate(),
            points: horizons
                .iter()
                .zip(num.iter().zip(&den))
                .filter(|(_, (_, &d))| d > 0)
                .map(|(&n, (&count, &base))| ProfilePoint { n, count, base })
                .collect(),
        }
    }

    /// Columns `n,count,density,density_approx`; the density column is the
    /// unreduced fraction `count/base`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "count", "density", "density_approx"])?;
        for p in &self.points {
            w.write_record([
                p.n.to_string(),
                p.count.to_string(),
                format!("{}/{}", p.count, p.base),
                format!("{:.12}", p.approx()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact `|K(n)| / n` at each horizon.
pub fn density_profile(set: &IndexSet, horizons: &[u64]) -> Result<DensityProfile> {
    if horizons.first() == Some(&0) {
        return Err(Error::InvalidArgument("horizons must be positive".into()));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("horizons must be strictly increasing".into()));
    }
    let counts = set.counts_at(horizons);
    Ok(DensityProfile {
        exact: !set.has_predicate(),
        points: horizons
            .iter()
            .zip(counts)
            .map(|(&n, count)| ProfilePoint { n, count, base: n })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundStatus {
    Exact,
    EstimatedAt(u64),
}

/// Lower and upper density, exact or read off the ladder tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub status: BoundStatus,
}

impl DensityBounds {
    pub fn is_exact(&self) -> bool {
        self.status == BoundStatus::Exact
    }
}

impl Serialize for DensityBounds {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DensityBounds", 3)?;
        s.serialize_field("lower", &RationalDoc(&self.lower))?;
        s.serialize_field("upper", &RationalDoc(&self.upper))?;
        s.serialize_field("status", &self.status)?;
        s.end()
    }
}

/// Serializes a rational as `{"num": .., "den": ..}`.
pub struct RationalDoc<'a>(pub &'a Rational);

impl Serialize for RationalDoc<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 2)?;
        s.serialize_field("num", &(*self.0.numer() as i64))?;
        s.serialize_field("den", &(*self.0.denom() as i64))?;
        s.end()
    }
}

fn effective_horizon(set: &IndexSet, horizon: u64) -> u64 {
    match set.evaluation_budget() {
        Some(b) => horizon.min(b).max(1),
        None => horizon.max(1),
    }
}

pub fn density_bounds(set: &IndexSet, horizon: u64) -> DensityBounds {
    if let Some(d) = exact_density(set) {
        return DensityBounds {
            lower: d,
            upper: d,
            status: BoundStatus::Exact,
        };
    }
    let h = effective_horizon(set, horizon);
    let tail = ladder_tail(h);
    let counts = set.counts_at(&tail);
    let values: Vec<Rational> = tail
        .iter()
        .zip(counts)
        .map(|(&n, c)| Rational::new(c as i128, n as i128))
        .collect();
    DensityBounds {
        lower: values.iter().min().copied().unwrap_or_default(),
        upper: values.iter().max().copied().unwrap_or_default(),
        status: BoundStatus::EstimatedAt(h),
    }
}

fn refutation_with_latest(set: &IndexSet, horizon: u64, note: String) -> Verdict {
    let witness = set.latest_member(horizon).into_iter().collect();
    Verdict::Refuted(Evidence::new(witness, note))
}

/// Verdict on "`set` has density zero".
///
/// Exact densities decide outright. Otherwise the claim is supported when the
/// density at the horizon is within [`ZERO_DENSITY_TOLERANCE`] or the set has
/// no member in the second half of the horizon.
pub fn null_density_verdict(set: &IndexSet, horizon: u64) -> Verdict {
    if let Some(d) = exact_density(set) {
        if d.is_zero() {
            return Verdict::Proven;
        }
        return refutation_with_latest(set, horizon, format!("exact density {d}"));
    }
    let h = effective_horizon(set, horizon);
    let tail = ladder_tail(h);
    let half = h.div_ceil(2);
    let mut probe = tail.clone();
    if !probe.contains(&half) {
        probe.push(half);
        probe.sort_unstable();
    }
    let counts = set.counts_at(&probe);
    let at = |n: u64| counts[probe.iter().position(|&x| x == n).expect("probed")];
    let upper = tail
        .iter()
        .map(|&n| Rational::new(at(n) as i128, n as i128))
        .max()
        .unwrap_or_default();
    let last = Rational::new(at(h) as i128, h as i128);
    if last <= tolerance(ZERO_DENSITY_TOLERANCE) || at(h) == at(half) {
        let note = format!("density {last} at {h}, tail maximum {upper}");
        return Verdict::supported_with(h, Evidence::note(note));
    }
    refutation_with_latest(set, h, format!("density {last} at horizon {h}"))
}

/// Verdict on "`sub` has density zero relative to `within`", that is
/// `|sub(n)| / |within(n)| → 0`. `sub` is expected to be a subset of `within`.
pub fn relative_null_verdict(sub: &IndexSet, within: &IndexSet, horizon: u64) -> Verdict {
    if let (Some(ds), Some(dw)) = (exact_density(sub), exact_density(within)) {
        if !dw.is_zero() {
            let ratio = ds / dw;
            if ratio.is_zero() {
                return Verdict::Proven;
            }
            return refutation_with_latest(sub, horizon, format!("exact relative density {ratio}"));
        }
    }
    let h = effective_horizon(sub, horizon).min(effective_horizon(within, horizon));
    let half = h.div_ceil(2);
    let mut probe = ladder_tail(h);
    if !probe.contains(&half) {
        probe.push(half);
        probe.sort_unstable();
    }
    let profile = DensityProfile::relative(sub, within, &probe);
    let upper = profile.values().into_iter().max().unwrap_or_default();
    let last = profile.last().map(|p| p.value()).unwrap_or_default();
    let count_at = |n: u64| profile.points.iter().find(|p| p.n == n).map(|p| p.count);
    let clean_tail = count_at(h).is_some() && count_at(h) == count_at(half);
    if last <= tolerance(ZERO_DENSITY_TOLERANCE) || clean_tail {
        let note = format!("relative density {last} at {h}, tail maximum {upper}");
        return Verdict::supported_with(h, Evidence::note(note));
    }
    refutation_with_latest(sub, h, format!("relative density {last} at horizon {h}"))
}

/// Verdict on "`set` has density one".
pub fn is_statistically_dense(set: &IndexSet, horizon: u64) -> Verdict {
    if let Some(d) = exact_density(set) {
        if d.is_one() {
            return Verdict::Proven;
        }
        let gap = set.complement();
        return refutation_with_latest(&gap, horizon, format!("exact density {d}"));
    }
    match null_density_verdict(&set.complement(), horizon) {
        Verdict::Refuted(e) => Verdict::Refuted(Evidence::new(e.indices, format!("complement: {}", e.note))),
        other => other,
    }
}

/// Checks whether `other` inherits density one from the dense set `dense`
/// through `|dense(n)| / |other(n)| → 1`.
pub fn density_ratio_transfer(dense: &IndexSet, other: &IndexSet, horizon: u64) -> Result<Verdict> {
    let base = is_statistically_dense(dense, horizon);
    if base.is_refuted() {
        return Err(Error::Domain(format!("{dense} is not statistically dense: {base}")));
    }
    if base.is_proven() {
        if let Some(d2) = exact_density(other) {
            if d2.is_one() {
                return Ok(Verdict::Proven);
            }
            let note = if d2.is_zero() {
                "ratio is unbounded".to_string()
            } else {
                format!("ratio tends to {}", d2.recip())
            };
            return Ok(Verdict::refuted(Vec::new(), note));
        }
    }
    let h = effective_horizon(dense, horizon).min(effective_horizon(other, horizon));
    let tail = ladder_tail(h);
    let num = dense.counts_at(&tail);
    let den = other.counts_at(&tail);
    let band = tolerance(RATIO_BAND);
    let (lo, hi) = (Rational::one() - band, Rational::one() + band);
    for ((&n, &a), &b) in tail.iter().zip(&num).zip(&den) {
        let in_band = b > 0 && {
            let r = Rational::new(a as i128, b as i128);
            r >= lo && r <= hi
        };
        if !in_band {
            return Ok(Verdict::refuted(
                vec![n],
                format!("ratio {a}/{b} outside [{lo}, {hi}] at n = {n}"),
            ));
        }
    }
    Ok(Verdict::supported(h))
}
