//! Acceptance criteria, one PASS/FAIL line each. Criteria 1 to 8 read the
//! report of one in-process run of `configs/acceptance.toml` and re-check
//! the key numbers against brute force; criterion 9 runs the binary twice.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::Value;
use statconv_cli::run::{AnalysisRecord, Status};
use statconv_cli::{parse_config, run, RunReport};
use statconv_core::constructions::{extract_convergent_equivalent, make_example1};
use statconv_core::index_sets::horizon_ladder;
use statconv_core::{MetricSpace, Point};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/acceptance.toml");
const HORIZON: u64 = 1_000_000;
/// Wall-clock limit for criteria 1 and 2.
const RUNTIME_LIMIT: Duration = Duration::from_secs(5);
/// Largest disagreement density of the extraction at the horizon.
const EXTRACTION_DISAGREEMENT: f64 = 1e-3;
const LEVELS: u32 = 20;
const SUITE_CASES: [(&str, usize); 4] = [
    ("filter_laws", 100),
    ("inheritance", 100),
    ("null_splice", 100),
    ("sparse_perturbation", 50),
];

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn record<'a>(report: &'a RunReport, name: &str) -> Result<&'a AnalysisRecord, String> {
    let a = report.analysis(name).ok_or_else(|| format!("no analysis `{name}`"))?;
    match (&a.status, &a.error) {
        (Status::Ok, _) => Ok(a),
        (_, e) => Err(format!("{name} errored: {}", e.as_deref().unwrap_or("?"))),
    }
}

fn result(a: &AnalysisRecord) -> &Value {
    a.result.as_ref().expect("ok analyses carry a result")
}

fn label(v: &Value) -> &str {
    v["verdict"].as_str().unwrap_or("?")
}

/// Runs a config built from the acceptance file restricted to `names`.
fn timed_subset(names: &[&str]) -> Result<(RunReport, Duration), String> {
    let text = std::fs::read_to_string(CONFIG).map_err(|e| e.to_string())?;
    let mut config = parse_config(&text).map_err(|e| e.to_string())?;
    config.analyses.retain(|a| names.contains(&a.name.as_str()));
    let start = Instant::now();
    let report = run(&config);
    Ok((report, start.elapsed()))
}

fn example1_reproduction(report: &RunReport) -> Check {
    let stat = record(report, "example1_stat")?;
    let rows: Vec<_> = stat.rows.iter().filter(|r| r.epsilon == 1.0).collect();
    let ladder = horizon_ladder(HORIZON);
    ensure(
        rows.iter().map(|r| r.n).collect::<Vec<_>>() == ladder,
        "ε = 1 rows do not follow the ladder",
    )?;
    for r in &rows {
        ensure(
            r.count == r.n.isqrt() && r.base == r.n,
            format!("count {} at n = {}", r.count, r.n),
        )?;
    }
    ensure(
        label(&result(stat)["overall"]) == "Proven",
        format!("stat verdict {}", stat.summary),
    )?;
    let cauchy = record(report, "example1_cauchy")?;
    let w: Vec<u64> = result(cauchy)["verdict"]["witness"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_u64).collect())
        .unwrap_or_default();
    ensure(
        label(&result(cauchy)["verdict"]) == "Refuted",
        "Cauchy verdict is not Refuted",
    )?;
    ensure(
        w.len() == 2 && w[0].isqrt().pow(2) == w[0] && w[1] == w[0] + 1,
        format!("witness {w:?} is not (k², k²+1)"),
    )?;
    let (_, took) = timed_subset(&["example1_stat", "example1_cauchy"])?;
    ensure(took < RUNTIME_LIMIT, format!("took {took:?}"))?;
    Ok(format!(
        "|A(n, 1)| = ⌊√n⌋ on {} rungs, Cauchy witness {w:?}, {took:.2?}",
        rows.len()
    ))
}

fn two_metric_scenario(report: &RunReport) -> Check {
    let a = record(report, "two_metric")?;
    let r = result(a);
    let (num, den) = (r["d1_density"]["num"].as_i64(), r["d1_density"]["den"].as_i64());
    ensure(num == Some(1) && den == Some(2), format!("d1 density {num:?}/{den:?}"))?;
    let d2 = &r["d2_report"];
    ensure(d2["candidate"].as_f64() == Some(0.0), "d2 report is not at 0")?;
    ensure(
        label(&d2["overall"]) == "SupportedAtHorizon",
        format!("d2 verdict {}", label(&d2["overall"])),
    )?;
    ensure(label(&r["tail_bound"]) != "Refuted", "tail bound 1/n violated")?;
    let d1_last = a
        .rows
        .iter()
        .filter(|row| row.analysis.ends_with("/d1") && row.n == HORIZON)
        .map(|row| (row.count, row.base))
        .next();
    ensure(
        d1_last == Some((HORIZON / 2, HORIZON)),
        format!("d1 CSV row at 10⁶: {d1_last:?}"),
    )?;
    let (_, took) = timed_subset(&["two_metric"])?;
    ensure(took < RUNTIME_LIMIT, format!("took {took:?}"))?;
    Ok(format!(
        "d1 density 1/2 at 10⁶, d2 SupportedAtHorizon with tail 1/n, {took:.2?}"
    ))
}

fn suite(report: &RunReport, name: &str) -> Check {
    let a = record(report, name)?;
    let r = result(a);
    let expected = SUITE_CASES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c);
    let (cases, failed) = (r["cases"].as_u64(), r["failed"].as_u64());
    ensure(
        cases.map(|c| c as usize) == expected,
        format!("{cases:?} cases, expected {expected:?}"),
    )?;
    if failed != Some(0) {
        let first = r["records"]
            .as_array()
            .and_then(|v| v.iter().find(|c| c["passed"] == false))
            .map(|c| c["detail"].to_string())
            .unwrap_or_default();
        return Err(format!("{failed:?} failures, first: {first}"));
    }
    Ok(format!("{} seeded cases, 0 failures", cases.unwrap_or(0)))
}

fn extraction(report: &RunReport) -> Check {
    let a = record(report, "example1_extraction")?;
    let r = result(a);
    ensure(
        label(&r["level_bounds"]) != "Refuted",
        format!("level bound violated: {}", r["level_bounds"]),
    )?;
    let (num, den) = (
        r["disagreement_density"]["num"].as_f64(),
        r["disagreement_density"]["den"].as_f64(),
    );
    let reported = num.zip(den).map(|(n, d)| n / d).ok_or("no disagreement density")?;
    ensure(
        reported <= EXTRACTION_DISAGREEMENT,
        format!("disagreement density {reported}"),
    )?;

    // Brute force on the same input: term by term over the horizon.
    let line = MetricSpace::real_line();
    let (zero, one) = (Point::Real(0.0), Point::Real(1.0));
    let x = make_example1(&line, zero, one.clone()).map_err(|e| e.to_string())?;
    let ex = extract_convergent_equivalent(&x, &one, LEVELS, HORIZON).map_err(|e| e.to_string())?;
    let cut = &ex.schedule.cutoffs;
    let bad = (cut[0]..=HORIZON).into_par_iter().find_first(|&n| {
        let j = cut.partition_point(|&c| c <= n) as f64;
        line.distance(&ex.y.eval(n), &one).unwrap() >= 1.0 / j
    });
    ensure(bad.is_none(), format!("d(y_n, a) >= 1/j at n = {bad:?}"))?;
    let differ = (1..=HORIZON)
        .into_par_iter()
        .filter(|&n| x.eval(n) != ex.y.eval(n))
        .count();
    let brute = differ as f64 / HORIZON as f64;
    ensure(
        brute == reported,
        format!("brute disagreement {brute}, reported {reported}"),
    )?;
    Ok(format!(
        "J = {LEVELS}, N_1 = {}, disagreement density {brute} <= {EXTRACTION_DISAGREEMENT}",
        cut[0]
    ))
}

fn singleton(report: &RunReport) -> Check {
    let usual = record(report, "singleton_usual")?;
    let stat = record(report, "singleton_stat")?;
    ensure(
        label(&result(usual)["verdict"]) == "Proven",
        format!("usual {}", usual.summary),
    )?;
    ensure(
        label(&result(stat)["overall"]) == "Proven",
        format!("statistical {}", stat.summary),
    )?;
    Ok("usual and statistical convergence both Proven".into())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_statconv"))
            .args([
                Path::new(CONFIG).as_os_str(),
                "--seed".as_ref(),
                "0x5EED".as_ref(),
                "--canonical".as_ref(),
            ])
            .arg("--out-dir")
            .arg(&dir)
            .args(["--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            status.status.success(),
            format!("run {run} exited with {}", status.status),
        )?;
        outputs.push(std::fs::read(dir.join("acceptance.json")).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], "canonical JSON differs between runs")?;
    Ok(format!("{} identical bytes", outputs[0].len()))
}

fn main() -> ExitCode {
    let text = std::fs::read_to_string(CONFIG).expect("acceptance config");
    let config = parse_config(&text).expect("acceptance config is valid");
    let report = run(&config);

    let criteria: Vec<Criterion> = vec![
        ("example 1 reproduction", Box::new(|| example1_reproduction(&report))),
        ("two-metric scenario", Box::new(|| two_metric_scenario(&report))),
        ("filter laws", Box::new(|| suite(&report, "filter_laws"))),
        (
            "subsequence inheritance suite",
            Box::new(|| suite(&report, "inheritance")),
        ),
        ("null-set splice suite", Box::new(|| suite(&report, "null_splice"))),
        ("convergent equivalent extraction", Box::new(|| extraction(&report))),
        (
            "sparse perturbation suite",
            Box::new(|| suite(&report, "sparse_perturbation")),
        ),
        ("singleton space", Box::new(|| singleton(&report))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
