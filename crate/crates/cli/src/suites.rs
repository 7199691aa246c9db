//! Seeded suites over the random corpus of symbolic sets and sequences.

use rayon::prelude::*;
use serde::Serialize;
use statconv_core::constructions::corpus::Corpus;
use statconv_core::constructions::theorem5_scenario;
use statconv_core::convergence::{default_epsilons, stat_convergence_report, subsequence_inheritance};
use statconv_core::index_sets::{density_bounds, exact_density};
use statconv_core::sequences::splice;
use statconv_core::{IndexSet, MetricSpace, Point, Rational, Result, SubsequenceSpec};

use crate::config::Suite;

/// Lower density required of the index sets in the inheritance suite.
pub const INHERITANCE_LOWER_DENSITY: (i128, i128) = (1, 4);
/// Allowed distance of the relative exceedance densities from 1/2.
pub const HALF_TOLERANCE: f64 = 1e-2;
/// Enumeration depth of the relative exceedance counts.
pub const RELATIVE_DEPTH: u64 = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct CaseRecord {
    pub case: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub seed: u64,
    pub horizon: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub records: Vec<CaseRecord>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// `|{r ≤ depth : d(y′_r, candidate) ≥ ε}|`.
pub fn relative_exceedance(ysub: &SubsequenceSpec, candidate: &Point, eps: f64, depth: u64) -> Result<u64> {
    let space = ysub.sequence().space();
    let mut count = 0;
    for r in 1..=depth {
        if space.distance(&ysub.term(r), candidate)? >= eps {
            count += 1;
        }
    }
    Ok(count)
}

fn show(d: Option<Rational>) -> String {
    d.map_or_else(|| "unknown".to_string(), |d| d.to_string())
}

pub fn run_suite(suite: Suite, cases: usize, seed: u64, horizon: u64) -> SuiteOutcome {
    let mut corpus = Corpus::new(seed);
    let records: Vec<CaseRecord> = match suite {
        Suite::FilterLaws => {
            let inputs: Vec<_> = (0..cases)
                .map(|_| (corpus.dense_set(), corpus.dense_set(), corpus.symbolic_set(3)))
                .collect();
            inputs
                .into_par_iter()
                .enumerate()
                .map(|(case, (k1, k2, other))| filter_case(case, &k1, &k2, &other))
                .collect()
        }
        Suite::Inheritance => {
            let line = MetricSpace::real_line();
            let inputs: Vec<_> = (0..cases)
                .map(|_| {
                    let (x, a) = corpus.convergent_sequence(&line);
                    (x, a, corpus.positive_density_set())
                })
                .collect();
            inputs
                .into_par_iter()
                .enumerate()
                .map(|(case, (x, a, k))| {
                    let (num, den) = INHERITANCE_LOWER_DENSITY;
                    let bounds = density_bounds(&k, horizon);
                    if !bounds.is_exact() || bounds.lower < Rational::new(num, den) {
                        return CaseRecord {
                            case,
                            passed: false,
                            detail: format!("{k}: lower density {} is not exactly >= {num}/{den}", bounds.lower),
                        };
                    }
                    match subsequence_inheritance(&x, &k, &a, horizon) {
                        Ok(out) => CaseRecord {
                            case,
                            passed: out.agree,
                            detail: format!(
                                "{x} -> {a} along {k}: asserted {}, measured {}",
                                out.asserted.label(),
                                out.measured.label()
                            ),
                        },
                        Err(e) => failure(case, e),
                    }
                })
                .collect()
        }
        Suite::NullSplice => {
            let line = MetricSpace::real_line();
            let inputs: Vec<_> = (0..cases)
                .map(|_| {
                    let (x, a) = corpus.convergent_sequence(&line);
                    let (patch, _) = corpus.convergent_sequence(&line);
                    (x, a, corpus.null_set(), patch)
                })
                .collect();
            inputs
                .into_par_iter()
                .enumerate()
                .map(|(case, (x, a, d, patch))| {
                    let density = exact_density(&d);
                    if density != Some(Rational::from_integer(0)) {
                        return CaseRecord {
                            case,
                            passed: false,
                            detail: format!("{d} has density {}", show(density)),
                        };
                    }
                    let run = || -> Result<CaseRecord> {
                        let y = splice(&x, &d, &patch)?;
                        let overall = stat_convergence_report(&y, &a, &default_epsilons(horizon), horizon)?.overall;
                        Ok(CaseRecord {
                            case,
                            passed: overall.is_proven(),
                            detail: format!("{x} changed on {d}: {overall} at {a}"),
                        })
                    };
                    run().unwrap_or_else(|e| failure(case, e))
                })
                .collect()
        }
        Suite::SparsePerturbation => {
            let line = MetricSpace::real_line();
            let inputs: Vec<_> = (0..cases)
                .map(|_| {
                    let (x, a) = corpus.convergent_sequence(&line);
                    let k = corpus.sparse_set();
                    let b = corpus.real_point_except(&a);
                    (x, a, k, b)
                })
                .collect();
            inputs
                .into_par_iter()
                .enumerate()
                .map(|(case, (x, a, k, b))| {
                    let run = || -> Result<CaseRecord> {
                        let s = theorem5_scenario(&x, &a, &k, &b, horizon)?;
                        let eps = x.space().distance(&a, &b)?;
                        let ysub = &s.perturbation.ysub;
                        let at_a = relative_exceedance(ysub, &a, eps, RELATIVE_DEPTH)? as f64 / RELATIVE_DEPTH as f64;
                        let at_b = relative_exceedance(ysub, &b, eps, RELATIVE_DEPTH)? as f64 / RELATIVE_DEPTH as f64;
                        let halves = (at_a - 0.5).abs() <= HALF_TOLERANCE && (at_b - 0.5).abs() <= HALF_TOLERANCE;
                        Ok(CaseRecord {
                            case,
                            passed: s.passed() && halves,
                            detail: format!(
                                "{x} along {k} with {a}, {b}: equivalent {}, y at a {}, y' at a {}, y' at b {}, \
                                 relative exceedance {at_a} and {at_b}",
                                s.equivalent.label(),
                                s.y_convergent.label(),
                                s.ysub_at_a.label(),
                                s.ysub_at_b.label()
                            ),
                        })
                    };
                    run().unwrap_or_else(|e| failure(case, e))
                })
                .collect()
        }
    };
    let passed = records.iter().filter(|r| r.passed).count();
    SuiteOutcome {
        suite: suite.name(),
        seed,
        horizon,
        cases,
        passed,
        failed: cases - passed,
        records,
    }
}

fn failure(case: usize, e: statconv_core::Error) -> CaseRecord {
    CaseRecord {
        case,
        passed: false,
        detail: e.to_string(),
    }
}

fn filter_case(case: usize, k1: &IndexSet, k2: &IndexSet, other: &IndexSet) -> CaseRecord {
    let one = Some(Rational::from_integer(1));
    let meet = exact_density(&k1.intersection(k2));
    let join = exact_density(&k1.union(other));
    CaseRecord {
        case,
        passed: exact_density(k1) == one && exact_density(k2) == one && meet == one && join == one,
        detail: format!("d({k1} ∩ {k2}) = {}, d({k1} ∪ {other}) = {}", show(meet), show(join)),
    }
}
