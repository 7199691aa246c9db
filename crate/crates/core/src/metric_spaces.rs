//! Metric spaces `(X, d)` over a few point domains.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verdict::{Evidence, Verdict};

/// Tolerance for axiom checks on real-valued domains.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// A point of some space. Equality is equality of representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Real(f64),
    Vector(Vec<f64>),
    Label(String),
}

impl Point {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Real(x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{x}"),
            Point::Vector(v) => write!(f, "{v:?}"),
            Point::Label(s) => write!(f, "{s}"),
        }
    }
}

/// The underlying set `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Reals,
    Euclidean(usize),
    Finite(Vec<Point>),
}

impl Domain {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Domain::Reals, Point::Real(x)) => x.is_finite(),
            (Domain::Euclidean(d), Point::Vector(v)) => v.len() == *d && v.iter().all(|x| x.is_finite()),
            (Domain::Finite(points), p) => points.contains(p),
            _ => false,
        }
    }
}

type DistanceFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum Metric {
    /// `|x - y|` on reals.
    Absolute,
    /// `min(1, |x - y|)` on reals.
    Truncated,
    /// Euclidean norm of the difference.
    Euclidean,
    /// `0` on equal points, `1` otherwise.
    Discrete,
    Custom(Arc<DistanceFn>),
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Absolute => write!(f, "Absolute"),
            Metric::Truncated => write!(f, "Truncated"),
            Metric::Euclidean => write!(f, "Euclidean"),
            Metric::Discrete => write!(f, "Discrete"),
            Metric::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug)]
struct SpaceInner {
    name: String,
    domain: Domain,
    metric: Metric,
}

/// A point domain with a distance function. Cheap to clone.
#[derive(Debug, Clone)]
pub struct MetricSpace(Arc<SpaceInner>);

impl MetricSpace {
    pub fn new(name: impl Into<String>, domain: Domain, metric: Metric) -> Self {
        MetricSpace(Arc::new(SpaceInner {
            name: name.into(),
            domain,
            metric,
        }))
    }

    pub fn real_line() -> Self {
        Self::new("real_line", Domain::Reals, Metric::Absolute)
    }

    pub fn bounded_real() -> Self {
        Self::new("bounded_real", Domain::Reals, Metric::Truncated)
    }

    /// The discrete metric on ℝ.
    pub fn discrete() -> Self {
        Self::new("discrete", Domain::Reals, Metric::Discrete)
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(format!("euclidean({dim})"), Domain::Euclidean(dim), Metric::Euclidean)
    }

    /// A finite space under the discrete metric.
    pub fn finite_discrete(name: impl Into<String>, points: Vec<Point>) -> Self {
        Self::new(name, Domain::Finite(points), Metric::Discrete)
    }

    /// The one-point space `{label}`.
    pub fn singleton(label: impl Into<String>) -> Self {
        Self::finite_discrete("singleton", vec![Point::Label(label.into())])
    }

    pub fn custom(
        name: impl Into<String>,
        domain: Domain,
        distance: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, domain, Metric::Custom(Arc::new(distance)))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn domain(&self) -> &Domain {
        &self.0.domain
    }

    pub fn metric(&self) -> &Metric {
        &self.0.metric
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.0.domain.contains(p)
    }

    /// The single point of a one-point space.
    pub fn sole_point(&self) -> Option<&Point> {
        match &self.0.domain {
            Domain::Finite(points) if points.len() == 1 => points.first(),
            _ => None,
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutsideSpace {
                point: p.to_string(),
                space: self.name().to_string(),
            })
        }
    }

    /// `d(p, q)`; fails for points outside the domain or non-finite results.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        let d = match (&self.0.metric, p, q) {
            (Metric::Absolute, Point::Real(x), Point::Real(y)) => (x - y).abs(),
            (Metric::Truncated, Point::Real(x), Point::Real(y)) => (x - y).abs().min(1.0),
            (Metric::Euclidean, Point::Vector(a), Point::Vector(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            (Metric::Discrete, p, q) => {
                if p == q {
                    0.0
                } else {
                    1.0
                }
            }
            (Metric::Custom(f), p, q) => f(p, q),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "metric {:?} does not apply to points {p} and {q}",
                    self.0.metric
                )))
            }
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::DistanceOverflow {
                left: p.to_string(),
                right: q.to_string(),
            })
        }
    }

    fn exact_axioms(&self) -> bool {
        matches!(self.0.domain, Domain::Finite(_))
    }
}

/// Looks up a builtin space: `real_line`, `euclidean(d)`, `discrete`, `bounded_real`.
pub fn builtin_space(name: &str) -> Result<MetricSpace> {
    let trimmed = name.trim();
    match trimmed {
        "real_line" => return Ok(MetricSpace::real_line()),
        "discrete" => return Ok(MetricSpace::discrete()),
        "bounded_real" => return Ok(MetricSpace::bounded_real()),
        _ => {}
    }
    if let Some(dim) = trimmed
        .strip_prefix("euclidean(")
        .and_then(|rest| rest.strip_suffix(')'))
        .and_then(|d| d.trim().parse::<usize>().ok())
        .filter(|&d| d >= 1)
    {
        return Ok(MetricSpace::euclidean(dim));
    }
    Err(Error::UnknownSpace(name.to_string()))
}

/// Samples the metric axioms on every ordered triple of `samples`.
///
/// The result is `Proven` when the samples exhaust a finite domain,
/// `SupportedAtHorizon(samples.len())` otherwise, and `Refuted` with the
/// offending sample indices (0-based) on the first violation.
pub fn check_axioms(space: &MetricSpace, samples: &[Point]) -> Result<Verdict> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("axiom check needs at least two samples".into()));
    }
    for p in samples {
        space.check_point(p)?;
    }
    let tol = if space.exact_axioms() { 0.0 } else { AXIOM_TOLERANCE };
    let n = samples.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = space.distance(&samples[i], &samples[j])?;
        }
    }
    let fail = |idx: &[usize], what: String| Ok(Verdict::refuted(idx.iter().map(|&i| i as u64).collect(), what));
    for i in 0..n {
        for j in 0..n {
            let same = samples[i] == samples[j];
            if d[i][j] < 0.0 {
                return fail(&[i, j], format!("negative distance d = {}", d[i][j]));
            }
            if same && d[i][j] != 0.0 {
                return fail(&[i, j], format!("d(p, p) = {} for equal points", d[i][j]));
            }
            if !same && d[i][j] == 0.0 {
                return fail(&[i, j], "distinct points at distance 0".into());
            }
            if (d[i][j] - d[j][i]).abs() > tol {
                return fail(&[i, j], format!("asymmetric: {} vs {}", d[i][j], d[j][i]));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][k] > d[i][j] + d[j][k] + tol {
                    return fail(
                        &[i, j, k],
                        format!("triangle inequality: {} > {} + {}", d[i][k], d[i][j], d[j][k]),
                    );
                }
            }
        }
    }
    if let Domain::Finite(points) = space.domain() {
        if points.iter().all(|p| samples.contains(p)) {
            return Ok(Verdict::Proven);
        }
    }
    Ok(Verdict::supported_with(
        n as u64,
        Evidence::note(format!("{n} samples")),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TopologyRelation {
    SameTopology,
    DifferentTopology,
}

/// Two metrics on one point domain, with their declared topological relation.
#[derive(Debug, Clone)]
pub struct MetricPair {
    pub space1: MetricSpace,
    pub space2: MetricSpace,
    pub relation: TopologyRelation,
}

impl MetricPair {
    pub fn new(space1: MetricSpace, space2: MetricSpace, relation: TopologyRelation) -> Result<Self> {
        if space1.domain() != space2.domain() {
            return Err(Error::Domain(format!(
                "spaces `{}` and `{}` do not share a point domain",
                space1.name(),
                space2.name()
            )));
        }
        Ok(MetricPair {
            space1,
            space2,
            relation,
        })
    }

    /// `d₁` discrete and `d₂ = |x - y|` on ℝ.
    pub fn discrete_vs_real_line() -> Self {
        Self::new(
            MetricSpace::discrete(),
            MetricSpace::real_line(),
            TopologyRelation::DifferentTopology,
        )
        .expect("shared domain")
    }

    /// `d₁ = min(1, |x - y|)` and `d₂ = |x - y|` on ℝ.
    pub fn bounded_vs_real_line() -> Self {
        Self::new(
            MetricSpace::bounded_real(),
            MetricSpace::real_line(),
            TopologyRelation::SameTopology,
        )
        .expect("shared domain")
    }
}
