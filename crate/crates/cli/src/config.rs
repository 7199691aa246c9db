//! The analysis configuration: a TOML document with `spaces`, `sets`,
//! `sequences` and `analyses` sections.
//!
//! Syntax errors stop parsing. Everything after that (shape, references,
//! ranges) is collected so a config is reported with all of its problems.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use statconv_core::convergence::{DEFAULT_HORIZON, DEFAULT_SEED};
use statconv_core::Point;

use crate::model::Model;

/// Horizons below this are rejected.
pub const MIN_HORIZON: u64 = 1000;

/// One problem found in a config, located by its dotted path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub field: String,
    pub message: String,
}

impl Issue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config ({} problem{}):\n{}", .0.len(), if .0.len() == 1 { "" } else { "s" }, list(.0))]
    Invalid(Vec<Issue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

fn list(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  - {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// File stem of the outputs; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDef {
    /// `real_line`, `bounded_real`, `discrete` or `euclidean(d)`.
    Builtin {
        name: String,
    },
    /// A finite set of labelled points with the discrete metric.
    Finite {
        points: Vec<Point>,
    },
    Singleton {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDef {
    Full,
    Empty,
    Squares,
    Evens,
    Odds,
    Progression {
        first: u64,
        step: u64,
    },
    /// Image of `n ↦ c₀ + c₁n + …` over `n ≥ 1`, coefficients lowest first.
    Polynomial {
        coeffs: Vec<i64>,
    },
    Finite {
        elements: Vec<u64>,
    },
    Union {
        of: Vec<String>,
    },
    Intersection {
        of: Vec<String>,
    },
    Complement {
        of: String,
    },
}

fn real_line() -> String {
    "real_line".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceDef {
    Constant {
        #[serde(default = "real_line")]
        space: String,
        point: Point,
    },
    /// `center + 1/(n + shift)`.
    Reciprocal {
        #[serde(default = "real_line")]
        space: String,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `x` at perfect squares, `y` elsewhere.
    Example1 {
        #[serde(default = "real_line")]
        space: String,
        x: Point,
        y: Point,
    },
    /// `x` at even indices, `y` at odd ones.
    Example2 {
        #[serde(default = "real_line")]
        space: String,
        x: Point,
        y: Point,
    },
    Alternating {
        #[serde(default = "real_line")]
        space: String,
        along: String,
        odd: Point,
        even: Point,
    },
    /// `patch` on the set `on`, `base` elsewhere.
    Splice { base: String, on: String, patch: String },
    /// Listed head terms, then the tail sequence at the same index.
    Table {
        #[serde(default = "real_line")]
        space: String,
        head: Vec<Point>,
        tail: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Density-one sets are closed under intersection and supersets.
    FilterLaws,
    /// Subsequences along sets of positive lower density keep the limit.
    Inheritance,
    /// Changing a convergent sequence on a null set keeps the limit.
    NullSplice,
    /// Alternating perturbation along a sparse set.
    SparsePerturbation,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::FilterLaws => "filter_laws",
            Suite::Inheritance => "inheritance",
            Suite::NullSplice => "null_splice",
            Suite::SparsePerturbation => "sparse_perturbation",
        }
    }
}

fn default_levels() -> u32 {
    statconv_core::constructions::DEFAULT_LEVELS
}

fn default_depth() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisKind {
    StatReport {
        sequence: String,
        candidate: Point,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilons: Option<Vec<f64>>,
    },
    Usual {
        sequence: String,
        candidate: Point,
        epsilon: f64,
    },
    Cauchy {
        sequence: String,
        epsilon: f64,
    },
    Equivalence {
        left: String,
        right: String,
    },
    Inheritance {
        sequence: String,
        set: String,
        candidate: Point,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilons: Option<Vec<f64>>,
    },
    SubsequenceEquivalence {
        left: String,
        right: String,
        set: String,
    },
    Extraction {
        sequence: String,
        candidate: Point,
        #[serde(default = "default_levels")]
        levels: u32,
    },
    SparsePerturbation {
        sequence: String,
        set: String,
        candidate: Point,
        other: Point,
        /// Enumeration depth of the relative exceedance counts.
        #[serde(default = "default_depth")]
        depth: u64,
    },
    TwoMetric {
        /// `discrete_vs_real_line` or `bounded_vs_real_line`.
        pair: String,
        candidate: Point,
        epsilon0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<String>,
    },
    Suite {
        suite: Suite,
        cases: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl AnalysisKind {
    pub fn label(&self) -> &'static str {
        match self {
            AnalysisKind::StatReport { .. } => "stat_report",
            AnalysisKind::Usual { .. } => "usual",
            AnalysisKind::Cauchy { .. } => "cauchy",
            AnalysisKind::Equivalence { .. } => "equivalence",
            AnalysisKind::Inheritance { .. } => "inheritance",
            AnalysisKind::SubsequenceEquivalence { .. } => "subsequence_equivalence",
            AnalysisKind::Extraction { .. } => "extraction",
            AnalysisKind::SparsePerturbation { .. } => "sparse_perturbation",
            AnalysisKind::TwoMetric { .. } => "two_metric",
            AnalysisKind::Suite { .. } => "suite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisDef {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(flatten)]
    pub kind: AnalysisKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub horizon: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    pub output: OutputConfig,
    pub spaces: BTreeMap<String, SpaceDef>,
    pub sets: BTreeMap<String, SetDef>,
    pub sequences: BTreeMap<String, SequenceDef>,
    pub analyses: Vec<AnalysisDef>,
}

impl AnalysisConfig {
    /// Horizon of one analysis: its own, else the config-wide one.
    pub fn horizon_of(&self, a: &AnalysisDef) -> u64 {
        a.horizon.unwrap_or(self.horizon)
    }

    /// All problems of an already shaped config.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        check_horizon(self.horizon, "horizon", &mut issues);
        if let Some(eps) = &self.epsilons {
            check_schedule(eps, "epsilons", &mut issues);
        }
        if let Some(stem) = &self.output.stem {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                issues.push(Issue::new("output.stem", format!("`{stem}` is not a plain file stem")));
            }
        }
        let model = Model::build(self, &mut issues);
        let mut seen = BTreeMap::new();
        for (i, a) in self.analyses.iter().enumerate() {
            let path = format!("analyses[{i}]");
            if a.name.trim().is_empty() {
                issues.push(Issue::new(format!("{path}.name"), "must not be empty"));
            } else if let Some(j) = seen.insert(a.name.as_str(), i) {
                issues.push(Issue::new(
                    format!("{path}.name"),
                    format!("`{}` already names analyses[{j}]", a.name),
                ));
            }
            if let Some(h) = a.horizon {
                check_horizon(h, &format!("{path}.horizon"), &mut issues);
            }
            model.check_analysis(&a.kind, &path, &mut issues);
        }
        issues
    }
}

fn check_horizon(h: u64, field: &str, issues: &mut Vec<Issue>) {
    if h < MIN_HORIZON {
        issues.push(Issue::new(
            field,
            format!("horizon {h} is below the minimum {MIN_HORIZON}"),
        ));
    }
}

pub(crate) fn check_epsilon(e: f64, field: &str, issues: &mut Vec<Issue>) {
    if !(e > 0.0 && e.is_finite()) {
        issues.push(Issue::new(
            field,
            format!("epsilon must be positive and finite, got {e}"),
        ));
    }
}

pub(crate) fn check_schedule(eps: &[f64], field: &str, issues: &mut Vec<Issue>) {
    if eps.is_empty() {
        issues.push(Issue::new(field, "epsilon schedule is empty"));
    }
    for (i, &e) in eps.iter().enumerate() {
        check_epsilon(e, &format!("{field}[{i}]"), issues);
    }
    if let Some(i) = eps.windows(2).position(|w| w[0] <= w[1]) {
        issues.push(Issue::new(
            format!("{field}[{}]", i + 1),
            format!(
                "schedule must be strictly decreasing, {} follows {}",
                eps[i + 1],
                eps[i]
            ),
        ));
    }
}

fn take<T: DeserializeOwned>(value: toml::Value, field: &str, issues: &mut Vec<Issue>) -> Option<T> {
    match value.try_into::<T>() {
        Ok(v) => Some(v),
        Err(e) => {
            issues.push(Issue::new(field, e.message().trim().to_string()));
            None
        }
    }
}

fn section<T: DeserializeOwned>(
    value: Option<toml::Value>,
    name: &str,
    issues: &mut Vec<Issue>,
) -> BTreeMap<String, T> {
    let mut out = BTreeMap::new();
    let Some(value) = value else { return out };
    let toml::Value::Table(table) = value else {
        issues.push(Issue::new(name, "expected a table of named entries"));
        return out;
    };
    for (key, v) in table {
        if let Some(def) = take(v, &format!("{name}.{key}"), issues) {
            out.insert(key, def);
        }
    }
    out
}

const TOP_LEVEL: [&str; 8] = [
    "horizon",
    "seed",
    "epsilons",
    "output",
    "spaces",
    "sets",
    "sequences",
    "analyses",
];

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, ConfigError> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let mut issues = Vec::new();
    for key in doc.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            issues.push(Issue::new(key.clone(), "unknown top-level key"));
        }
    }
    let horizon = doc.remove("horizon").and_then(|v| take(v, "horizon", &mut issues));
    let seed = doc.remove("seed").and_then(|v| take(v, "seed", &mut issues));
    let epsilons = doc.remove("epsilons").and_then(|v| take(v, "epsilons", &mut issues));
    let output = doc.remove("output").and_then(|v| take(v, "output", &mut issues));
    let spaces = section(doc.remove("spaces"), "spaces", &mut issues);
    let sets = section(doc.remove("sets"), "sets", &mut issues);
    let sequences = section(doc.remove("sequences"), "sequences", &mut issues);
    let analyses = match doc.remove("analyses") {
        None => Vec::new(),
        Some(toml::Value::Array(items)) => items
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| analysis(v, i, &mut issues))
            .collect(),
        Some(_) => {
            issues.push(Issue::new("analyses", "expected an array of tables ([[analyses]])"));
            Vec::new()
        }
    };
    let config = AnalysisConfig {
        horizon: horizon.unwrap_or(DEFAULT_HORIZON),
        seed: seed.unwrap_or(DEFAULT_SEED),
        epsilons,
        output: output.unwrap_or_default(),
        spaces,
        sets,
        sequences,
        analyses,
    };
    issues.extend(config.validate());
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

fn analysis(value: toml::Value, i: usize, issues: &mut Vec<Issue>) -> Option<AnalysisDef> {
    let path = format!("analyses[{i}]");
    let toml::Value::Table(mut table) = value else {
        issues.push(Issue::new(path, "expected a table"));
        return None;
    };
    let name = match table.remove("name") {
        Some(v) => take::<String>(v, &format!("{path}.name"), issues),
        None => {
            issues.push(Issue::new(format!("{path}.name"), "missing field `name`"));
            None
        }
    };
    let horizon = table
        .remove("horizon")
        .and_then(|v| take(v, &format!("{path}.horizon"), issues));
    let kind = take::<AnalysisKind>(toml::Value::Table(table), &path, issues)?;
    Some(AnalysisDef {
        name: name?,
        horizon,
        kind,
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &std::path::Path) -> Result<AnalysisConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
