//! Config validation, exit codes and emitted files of the `statconv` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use statconv_cli::output::CSV_COLUMNS;
use statconv_cli::{parse_config, run, ConfigError, EXIT_ANALYSIS_ERROR, EXIT_CONFIG_ERROR, EXIT_OK};

const SCHEMA: &str = include_str!("../schema/run_report.v1.json");

const MINIMAL: &str = r#"
[sequences.ex1]
construction = "example1"
x = 0
y = 1

[[analyses]]
name = "stat"
kind = "stat_report"
sequence = "ex1"
candidate = 1
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn statconv(config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statconv"))
        .arg(config)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn issues(text: &str) -> Vec<String> {
    match parse_config(text) {
        Err(ConfigError::Invalid(v)) => v.into_iter().map(|i| i.to_string()).collect(),
        other => panic!("expected validation errors, got {other:?}"),
    }
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    jsonschema::draft202012::new(&schema).expect("schema compiles")
}

fn assert_valid(doc: &Value) {
    let v = validator();
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn minimal_config_is_valid() {
    let c = parse_config(MINIMAL).unwrap();
    assert_eq!(c.analyses.len(), 1);
    assert_eq!(c.horizon, 1_000_000);
    assert_eq!(c.seed, 0x5EED);
}

#[test]
fn zero_epsilon_names_the_field() {
    let text = format!("{MINIMAL}epsilons = [0.5, 0.0]\n");
    let found = issues(&text);
    assert!(
        found.iter().any(|i| i.starts_with("analyses[0].epsilons[1]")),
        "{found:?}"
    );
}

#[test]
fn unknown_space_is_reported() {
    let text = MINIMAL.replace("x = 0", "space = \"hyperbolic\"\nx = 0");
    let found = issues(&text);
    assert!(found.iter().any(|i| i.contains("hyperbolic")), "{found:?}");
}

#[test]
fn all_problems_are_collected() {
    let text = r#"
horizon = 10
colour = "red"

[sets.loop]
kind = "complement"
of = "loop"

[sequences.bad]
construction = "constant"
point = "not a real"

[[analyses]]
name = "a"
kind = "usual"
sequence = "missing"
candidate = 0
epsilon = -1

[[analyses]]
name = "a"
kind = "suite"
suite = "filter_laws"
cases = 0

[[analyses]]
name = "b"
kind = "no_such_kind"
"#;
    let found = issues(text);
    for needle in [
        "horizon:",
        "colour:",
        "sets.loop:",
        "sequences.bad:",
        "analyses[0].sequence:",
        "analyses[0].epsilon:",
        "analyses[1].name:",
        "analyses[1].cases:",
        "analyses[2]:",
    ] {
        assert!(
            found.iter().any(|i| i.starts_with(needle)),
            "missing {needle} in {found:#?}"
        );
    }
}

#[test]
fn malformed_syntax_is_a_parse_error() {
    assert!(matches!(parse_config("horizon = = 3"), Err(ConfigError::Parse(_))));
}

#[test]
fn recursive_sequences_are_rejected() {
    let text = r#"
[sets.sq]
kind = "squares"

[sequences.a]
construction = "splice"
base = "b"
on = "sq"
patch = "b"

[sequences.b]
construction = "splice"
base = "a"
on = "sq"
patch = "a"
"#;
    let found = issues(text);
    assert!(found.iter().any(|i| i.contains("in terms of itself")), "{found:?}");
}

#[test]
fn example1_csv_holds_square_root_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), MINIMAL);
    let out = tmp.path().join("out");
    let o = statconv(&cfg, &["--out-dir", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("run.json").exists());
    let mut rdr = csv::Reader::from_path(out.join("run.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
    let mut at_one = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let (eps, n, count): (f64, u64, u64) = (
            rec[1].parse().unwrap(),
            rec[2].parse().unwrap(),
            rec[3].parse().unwrap(),
        );
        assert_eq!(&rec[4], format!("{count}/{n}"));
        let approx: f64 = rec[5].parse().unwrap();
        assert!((approx - count as f64 / n as f64).abs() < 1e-15);
        if eps == 0.5 {
            at_one += 1;
            assert_eq!(count, n.isqrt(), "n = {n}");
        }
    }
    assert_eq!(at_one, 12);
}

#[test]
fn two_metric_config_has_half_density_column() {
    let text = r#"
[[analyses]]
name = "pair"
kind = "two_metric"
pair = "discrete_vs_real_line"
candidate = 0
epsilon0 = 0.5
"#;
    let report = run(&parse_config(text).unwrap());
    let d1: Vec<_> = report.rows().filter(|r| r.analysis == "pair/d1").collect();
    assert!(!d1.is_empty());
    assert!(d1.iter().all(|r| r.count * 2 == r.n || r.count * 2 == r.n + 1));
    assert!(report.rows().any(|r| r.analysis == "pair/d2"));
}

#[test]
fn empty_analysis_list_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "horizon = 1000\n");
    let out = tmp.path().join("out");
    let o = statconv(&cfg, &["--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(doc["analyses"].as_array().unwrap().len(), 0);
    assert_valid(&doc);
    let csv = std::fs::read_to_string(out.join("run.csv")).unwrap();
    assert_eq!(csv.trim(), CSV_COLUMNS.join(","));
}

#[test]
fn bad_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "horizon = 5\n");
    assert_eq!(statconv(&cfg, &[]).status.code(), Some(EXIT_CONFIG_ERROR));
    let cfg = write_config(tmp.path(), MINIMAL);
    let o = statconv(&cfg, &["--horizon", "999", "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG_ERROR));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon"));
    assert_eq!(
        statconv(&tmp.path().join("absent.toml"), &[]).status.code(),
        Some(EXIT_CONFIG_ERROR)
    );
}

#[test]
fn failing_analysis_exits_one_and_keeps_the_rest() {
    let text = format!(
        "{MINIMAL}{}",
        r#"
[sets.sq]
kind = "squares"

[[analyses]]
name = "thin"
kind = "inheritance"
sequence = "ex1"
set = "sq"
candidate = 1
"#
    );
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let o = statconv(&cfg, &["--out-dir", out.to_str().unwrap(), "--canonical"]);
    assert_eq!(o.status.code(), Some(EXIT_ANALYSIS_ERROR));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_valid(&doc);
    let analyses = doc["analyses"].as_array().unwrap();
    assert_eq!(analyses[0]["status"], "ok");
    assert_eq!(analyses[1]["status"], "error");
    assert!(analyses[1]["error"].as_str().unwrap().contains("lower density"));
    assert!(doc.get("timing").is_none());
}

#[test]
fn refuted_verdicts_are_not_errors() {
    let text = MINIMAL.replace("candidate = 1", "candidate = 0");
    let report = run(&parse_config(&text).unwrap());
    assert!(!report.has_errors());
    assert!(report.analyses[0].summary.starts_with("Refuted"));
}

#[test]
fn unwritable_output_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "horizon = 1000\n");
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let o = statconv(&cfg, &["--out-dir", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_ANALYSIS_ERROR));
}

#[test]
fn timed_report_validates_and_seed_flag_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        "{MINIMAL}{}",
        r#"
[[analyses]]
name = "laws"
kind = "suite"
suite = "filter_laws"
cases = 5
"#
    );
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    let o = statconv(
        &cfg,
        &["--out-dir", out.to_str().unwrap(), "--seed", "0x10", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_valid(&doc);
    assert_eq!(doc["seed"], 16);
    assert_eq!(doc["analyses"][1]["result"]["seed"], 16);
    assert_eq!(doc["timing"]["analyses"].as_array().unwrap().len(), 2);
}

#[test]
fn acceptance_report_validates() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/acceptance.toml");
    let config = statconv_cli::load_config(&cfg).unwrap();
    let report = run(&config);
    assert!(!report.has_errors());
    let doc: Value = serde_json::from_str(&report.to_json(true)).unwrap();
    assert_valid(&doc);
}
