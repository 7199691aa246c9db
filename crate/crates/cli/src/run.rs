//! Executes the analyses of a validated config.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use statconv_core::constructions::{
    extract_convergent_equivalent, lemma3_equivalence_check, theorem2plus_counterexample, theorem5_scenario,
};
use statconv_core::convergence::{
    cauchy_check, epsilon_schedule, stat_convergence_report, subsequence_inheritance_with, usual_convergence_check,
};
use statconv_core::index_sets::{density_profile, exact_density, horizon_ladder, RationalDoc};
use statconv_core::sequences::{disagreement_set, is_statistically_equivalent};
use statconv_core::{Rational, StatReport, Verdict};

use crate::config::{AnalysisConfig, AnalysisDef, AnalysisKind};
use crate::model::{metric_pair, Model};
use crate::suites::{relative_exceedance, run_suite};

pub const RUN_REPORT_SCHEMA: &str = "statconv.run_report/v1";

/// One CSV line: an exceedance count `count / base` at horizon `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub analysis: String,
    pub epsilon: f64,
    pub n: u64,
    pub count: u64,
    pub base: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisRecord {
    pub name: String,
    pub kind: &'static str,
    pub horizon: u64,
    pub status: Status,
    /// One-line headline: a verdict label or a pass count.
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub rows: Vec<CsvRow>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisTiming {
    pub name: String,
    pub ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub analyses: Vec<AnalysisTiming>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: AnalysisConfig,
    pub analyses: Vec<AnalysisRecord>,
    pub timing: Timing,
}

#[derive(Serialize)]
struct ReportView<'a> {
    schema: &'static str,
    library_version: &'static str,
    seed: u64,
    horizon: u64,
    config: &'a AnalysisConfig,
    analyses: &'a [AnalysisRecord],
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<&'a Timing>,
}

impl RunReport {
    pub fn has_errors(&self) -> bool {
        self.analyses.iter().any(|a| a.status == Status::Error)
    }

    pub fn analysis(&self, name: &str) -> Option<&AnalysisRecord> {
        self.analyses.iter().find(|a| a.name == name)
    }

    /// Pretty JSON; `canonical` drops the timing block so that identical
    /// runs give identical bytes.
    pub fn to_json(&self, canonical: bool) -> String {
        let view = ReportView {
            schema: RUN_REPORT_SCHEMA,
            library_version: statconv_core::VERSION,
            seed: self.config.seed,
            horizon: self.config.horizon,
            config: &self.config,
            analyses: &self.analyses,
            timing: (!canonical).then_some(&self.timing),
        };
        let mut s = serde_json::to_string_pretty(&view).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn rows(&self) -> impl Iterator<Item = &CsvRow> {
        self.analyses.iter().flat_map(|a| &a.rows)
    }
}

/// Runs every analysis. Failures are recorded per analysis; none aborts the run.
pub fn run(config: &AnalysisConfig) -> RunReport {
    let start = Instant::now();
    let model = Model::build(config, &mut Vec::new());
    let analyses: Vec<AnalysisRecord> = config
        .analyses
        .par_iter()
        .map(|def| run_one(config, &model, def))
        .collect();
    let timing = Timing {
        total_ms: ms(start.elapsed()),
        analyses: analyses
            .iter()
            .map(|a| AnalysisTiming {
                name: a.name.clone(),
                ms: ms(a.elapsed),
            })
            .collect(),
    };
    RunReport {
        config: config.clone(),
        analyses,
        timing,
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

struct Outcome {
    summary: String,
    result: Value,
    rows: Vec<CsvRow>,
}

fn run_one(config: &AnalysisConfig, model: &Model, def: &AnalysisDef) -> AnalysisRecord {
    let horizon = config.horizon_of(def);
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| execute(config, model, def, horizon))).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        Err(format!("analysis panicked: {msg}"))
    });
    let (status, summary, result, error, rows) = match outcome {
        Ok(o) => (Status::Ok, o.summary, Some(o.result), None, o.rows),
        Err(e) => (Status::Error, "error".to_string(), None, Some(e), Vec::new()),
    };
    AnalysisRecord {
        name: def.name.clone(),
        kind: def.kind.label(),
        horizon,
        status,
        summary,
        result,
        error,
        rows,
        elapsed: start.elapsed(),
    }
}

fn report_rows(name: &str, report: &StatReport) -> Vec<CsvRow> {
    report
        .entries
        .iter()
        .flat_map(|e| {
            e.profile.points.iter().map(move |p| CsvRow {
                analysis: name.to_string(),
                epsilon: e.epsilon,
                n: p.n,
                count: p.count,
                base: p.base,
            })
        })
        .collect()
}

fn verdict_only(verdict: Verdict, extra: Value) -> Outcome {
    let mut result = json!({ "verdict": verdict });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    Outcome {
        summary: verdict.to_string(),
        result,
        rows: Vec::new(),
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn execute(config: &AnalysisConfig, model: &Model, def: &AnalysisDef, horizon: u64) -> Result<Outcome, String> {
    let seq = |name: &str| {
        model
            .sequences
            .get(name)
            .cloned()
            .ok_or_else(|| format!("unknown sequence `{name}`"))
    };
    let set = |name: &str| {
        model
            .sets
            .get(name)
            .cloned()
            .ok_or_else(|| format!("unknown set `{name}`"))
    };
    let schedule = |own: &Option<Vec<f64>>| {
        epsilon_schedule(own.as_deref().or(config.epsilons.as_deref()), horizon).map_err(|e| e.to_string())
    };
    let name = def.name.as_str();
    let err = |e: statconv_core::Error| e.to_string();
    Ok(match &def.kind {
        AnalysisKind::StatReport {
            sequence,
            candidate,
            epsilons,
        } => {
            let x = seq(sequence)?;
            let report = stat_convergence_report(&x, candidate, &schedule(epsilons)?, horizon).map_err(err)?;
            Outcome {
                summary: report.overall.to_string(),
                rows: report_rows(name, &report),
                result: value(&report),
            }
        }
        AnalysisKind::Usual {
            sequence,
            candidate,
            epsilon,
        } => {
            let v = usual_convergence_check(&seq(sequence)?, candidate, *epsilon, horizon).map_err(err)?;
            verdict_only(v, json!({ "epsilon": epsilon }))
        }
        AnalysisKind::Cauchy { sequence, epsilon } => {
            let v = cauchy_check(&seq(sequence)?, *epsilon, horizon).map_err(err)?;
            verdict_only(v, json!({ "epsilon": epsilon }))
        }
        AnalysisKind::Equivalence { left, right } => {
            let (x, y) = (seq(left)?, seq(right)?);
            let v = is_statistically_equivalent(&x, &y, horizon).map_err(err)?;
            let d = disagreement_set(&x, &y).map_err(err)?;
            let profile = density_profile(&d, &horizon_ladder(horizon)).map_err(err)?;
            let exact = exact_density(&d);
            verdict_only(
                v,
                json!({
                    "disagreement": d.to_string(),
                    "exact_density": exact.as_ref().map(|r| value(&RationalDoc(r))),
                    "profile": profile,
                }),
            )
        }
        AnalysisKind::Inheritance {
            sequence,
            set: k,
            candidate,
            epsilons,
        } => {
            let out = subsequence_inheritance_with(&seq(sequence)?, &set(k)?, candidate, &schedule(epsilons)?, horizon)
                .map_err(err)?;
            Outcome {
                summary: format!(
                    "asserted {}, measured {}, {}",
                    out.asserted.label(),
                    out.measured.label(),
                    if out.agree { "agree" } else { "disagree" }
                ),
                result: value(&out),
                rows: Vec::new(),
            }
        }
        AnalysisKind::SubsequenceEquivalence { left, right, set: k } => {
            let out = lemma3_equivalence_check(&seq(left)?, &seq(right)?, &set(k)?, horizon).map_err(err)?;
            Outcome {
                summary: out.verdict.to_string(),
                result: value(&out),
                rows: Vec::new(),
            }
        }
        AnalysisKind::Extraction {
            sequence,
            candidate,
            levels,
        } => extraction(&seq(sequence)?, candidate, *levels, horizon)?,
        AnalysisKind::SparsePerturbation {
            sequence,
            set: k,
            candidate,
            other,
            depth,
        } => {
            let x = seq(sequence)?;
            let s = theorem5_scenario(&x, candidate, &set(k)?, other, horizon).map_err(err)?;
            let eps = x.space().distance(candidate, other).map_err(err)?;
            let ysub = &s.perturbation.ysub;
            let relative = |p| -> Result<Value, String> {
                let count = relative_exceedance(ysub, p, eps, *depth).map_err(err)?;
                Ok(json!({ "num": count, "den": depth, "approx": count as f64 / *depth as f64 }))
            };
            Outcome {
                summary: if s.passed() { "scenario holds" } else { "scenario fails" }.to_string(),
                result: json!({
                    "y": s.perturbation.y.to_string(),
                    "epsilon": eps,
                    "same_indices": s.same_indices,
                    "equivalent": s.equivalent,
                    "y_convergent": s.y_convergent,
                    "ysub_at_candidate": s.ysub_at_a,
                    "ysub_at_other": s.ysub_at_b,
                    "relative_at_candidate": relative(candidate)?,
                    "relative_at_other": relative(other)?,
                    "passed": s.passed(),
                }),
                rows: Vec::new(),
            }
        }
        AnalysisKind::TwoMetric {
            pair,
            candidate,
            epsilon0,
            witness,
        } => {
            let p = metric_pair(pair).ok_or_else(|| format!("unknown metric pair `{pair}`"))?;
            let w = witness.as_deref().map(seq).transpose()?;
            let s = theorem2plus_counterexample(&p, candidate, w.as_ref(), *epsilon0, horizon).map_err(err)?;
            let mut rows = report_rows(&format!("{name}/d1"), &s.report1);
            rows.extend(report_rows(&format!("{name}/d2"), &s.report2));
            Outcome {
                summary: format!("d1 density {}, d2 {}", s.d1_density, s.report2.overall),
                result: json!({
                    "pair": pair,
                    "witness": s.witness.to_string(),
                    "y": s.y.to_string(),
                    "epsilon0": s.epsilon0,
                    "d1_density": RationalDoc(&s.d1_density),
                    "d1_report": s.report1,
                    "d2_report": s.report2,
                    "tail_bound": s.tail_bound,
                }),
                rows,
            }
        }
        AnalysisKind::Suite { suite, cases, seed } => {
            let out = run_suite(*suite, *cases, seed.unwrap_or(config.seed), horizon);
            Outcome {
                summary: format!("{}/{} passed", out.passed, out.cases),
                result: value(&out),
                rows: Vec::new(),
            }
        }
    })
}

fn extraction(
    x: &statconv_core::LazySequence,
    a: &statconv_core::Point,
    levels: u32,
    horizon: u64,
) -> Result<Outcome, String> {
    let err = |e: statconv_core::Error| e.to_string();
    let ex = extract_convergent_equivalent(x, a, levels, horizon).map_err(err)?;
    let cutoffs = &ex.schedule.cutoffs;
    let space = x.space().clone();
    // d(y_n, a) < 1/j from N_j on.
    let violation = (cutoffs[0]..=horizon).into_par_iter().find_first(|&n| {
        let j = cutoffs.partition_point(|&c| c <= n) as f64;
        space.distance(&ex.y.eval(n), a).map_or(true, |d| d >= 1.0 / j)
    });
    let tail = match violation {
        Some(n) => Verdict::refuted(vec![n], format!("d(y_{n}, a) reaches the level bound")),
        None => Verdict::supported(horizon),
    };
    let disagreement = disagreement_set(x, &ex.y).map_err(err)?;
    let density = Rational::new(disagreement.count_prefix(horizon) as i128, horizon as i128);
    Ok(Outcome {
        summary: format!("levels {levels}, disagreement density {density} at {horizon}"),
        result: json!({
            "y": ex.y.to_string(),
            "schedule": ex.schedule,
            "dense": ex.dense,
            "equivalent": ex.equivalent,
            "level_bounds": tail,
            "disagreement_density": RationalDoc(&density),
        }),
        rows: Vec::new(),
    })
}
