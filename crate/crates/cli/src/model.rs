//! Library objects built from the named config sections.

use std::collections::{BTreeMap, BTreeSet};

use statconv_core::constructions::{make_example1, make_example2};
use statconv_core::metric_spaces::builtin_space;
use statconv_core::sequences::splice;
use statconv_core::{IndexSet, LazySequence, MetricPair, MetricSpace, Point, Polynomial};

use crate::config::{
    check_epsilon, check_schedule, AnalysisConfig, AnalysisKind, Issue, SequenceDef, SetDef, SpaceDef,
};

pub const PAIRS: [&str; 2] = ["discrete_vs_real_line", "bounded_vs_real_line"];

pub fn metric_pair(name: &str) -> Option<MetricPair> {
    match name {
        "discrete_vs_real_line" => Some(MetricPair::discrete_vs_real_line()),
        "bounded_vs_real_line" => Some(MetricPair::bounded_vs_real_line()),
        _ => None,
    }
}

#[derive(Default)]
pub struct Model {
    pub spaces: BTreeMap<String, MetricSpace>,
    pub sets: BTreeMap<String, IndexSet>,
    pub sequences: BTreeMap<String, LazySequence>,
}

impl Model {
    /// Builds every entry it can, recording a problem for each one it cannot.
    pub fn build(config: &AnalysisConfig, issues: &mut Vec<Issue>) -> Model {
        let mut model = Model::default();
        for (name, def) in &config.spaces {
            let field = format!("spaces.{name}");
            match space(def) {
                Ok(s) => {
                    model.spaces.insert(name.clone(), s);
                }
                Err(e) => issues.push(Issue::new(field, e)),
            }
        }
        let mut builder = Builder {
            config,
            model: &mut model,
            issues,
            active: BTreeSet::new(),
            failed: BTreeSet::new(),
        };
        for name in config.sets.keys() {
            builder.set(name, "sets");
        }
        for name in config.sequences.keys() {
            builder.sequence(name, "sequences");
        }
        model
    }

    /// A user space, else a builtin one by name.
    pub fn space(&self, name: &str) -> Option<MetricSpace> {
        self.spaces.get(name).cloned().or_else(|| builtin_space(name).ok())
    }

    pub fn check_analysis(&self, kind: &AnalysisKind, path: &str, issues: &mut Vec<Issue>) {
        let seq = |name: &str, key: &str, issues: &mut Vec<Issue>| -> Option<LazySequence> {
            let found = self.sequences.get(name).cloned();
            if found.is_none() && !issues.iter().any(|i| i.field == format!("sequences.{name}")) {
                issues.push(Issue::new(
                    format!("{path}.{key}"),
                    format!("unknown sequence `{name}`"),
                ));
            }
            found
        };
        let set = |name: &str, issues: &mut Vec<Issue>| {
            if !self.sets.contains_key(name) && !issues.iter().any(|i| i.field == format!("sets.{name}")) {
                issues.push(Issue::new(format!("{path}.set"), format!("unknown set `{name}`")));
            }
        };
        let point = |x: &Option<LazySequence>, p: &Point, key: &str, issues: &mut Vec<Issue>| {
            if let Some(x) = x {
                if let Err(e) = x.space().check_point(p) {
                    issues.push(Issue::new(format!("{path}.{key}"), e.to_string()));
                }
            }
        };
        let schedule = |eps: &Option<Vec<f64>>, issues: &mut Vec<Issue>| {
            if let Some(eps) = eps {
                check_schedule(eps, &format!("{path}.epsilons"), issues);
            }
        };
        match kind {
            AnalysisKind::StatReport {
                sequence,
                candidate,
                epsilons,
            } => {
                let x = seq(sequence, "sequence", issues);
                point(&x, candidate, "candidate", issues);
                schedule(epsilons, issues);
            }
            AnalysisKind::Usual {
                sequence,
                candidate,
                epsilon,
            } => {
                let x = seq(sequence, "sequence", issues);
                point(&x, candidate, "candidate", issues);
                check_epsilon(*epsilon, &format!("{path}.epsilon"), issues);
            }
            AnalysisKind::Cauchy { sequence, epsilon } => {
                seq(sequence, "sequence", issues);
                check_epsilon(*epsilon, &format!("{path}.epsilon"), issues);
            }
            AnalysisKind::Equivalence { left, right } => {
                seq(left, "left", issues);
                seq(right, "right", issues);
            }
            AnalysisKind::Inheritance {
                sequence,
                set: k,
                candidate,
                epsilons,
            } => {
                let x = seq(sequence, "sequence", issues);
                set(k, issues);
                point(&x, candidate, "candidate", issues);
                schedule(epsilons, issues);
            }
            AnalysisKind::SubsequenceEquivalence { left, right, set: k } => {
                seq(left, "left", issues);
                seq(right, "right", issues);
                set(k, issues);
            }
            AnalysisKind::Extraction {
                sequence,
                candidate,
                levels,
            } => {
                let x = seq(sequence, "sequence", issues);
                point(&x, candidate, "candidate", issues);
                if *levels == 0 {
                    issues.push(Issue::new(format!("{path}.levels"), "at least one level is needed"));
                }
            }
            AnalysisKind::SparsePerturbation {
                sequence,
                set: k,
                candidate,
                other,
                depth,
            } => {
                let x = seq(sequence, "sequence", issues);
                set(k, issues);
                point(&x, candidate, "candidate", issues);
                point(&x, other, "other", issues);
                if *depth == 0 {
                    issues.push(Issue::new(format!("{path}.depth"), "depth must be positive"));
                }
            }
            AnalysisKind::TwoMetric {
                pair,
                candidate,
                epsilon0,
                witness,
            } => {
                match metric_pair(pair) {
                    Some(p) => {
                        if let Err(e) = p.space1.check_point(candidate) {
                            issues.push(Issue::new(format!("{path}.candidate"), e.to_string()));
                        }
                    }
                    None => issues.push(Issue::new(
                        format!("{path}.pair"),
                        format!("unknown metric pair `{pair}`; expected one of {}", PAIRS.join(", ")),
                    )),
                }
                check_epsilon(*epsilon0, &format!("{path}.epsilon0"), issues);
                if let Some(w) = witness {
                    seq(w, "witness", issues);
                }
            }
            AnalysisKind::Suite { cases, .. } => {
                if *cases == 0 {
                    issues.push(Issue::new(format!("{path}.cases"), "a suite needs at least one case"));
                }
            }
        }
    }
}

fn space(def: &SpaceDef) -> Result<MetricSpace, String> {
    match def {
        SpaceDef::Builtin { name } => builtin_space(name).map_err(|e| e.to_string()),
        SpaceDef::Finite { points } => {
            if points.is_empty() {
                return Err("a finite space needs at least one point".into());
            }
            let mut seen = Vec::new();
            for p in points {
                if seen.contains(&p) {
                    return Err(format!("point {p} is listed twice"));
                }
                seen.push(p);
            }
            Ok(MetricSpace::finite_discrete("finite", points.clone()))
        }
        SpaceDef::Singleton { label } => Ok(MetricSpace::singleton(label.clone())),
    }
}

struct Builder<'a> {
    config: &'a AnalysisConfig,
    model: &'a mut Model,
    issues: &'a mut Vec<Issue>,
    /// Entries under construction, for cycle detection.
    active: BTreeSet<String>,
    failed: BTreeSet<String>,
}

impl Builder<'_> {
    fn fail(&mut self, key: String, field: String, message: String) {
        self.failed.insert(key);
        self.issues.push(Issue::new(field, message));
    }

    fn set(&mut self, name: &str, from: &str) -> Option<IndexSet> {
        let key = format!("sets.{name}");
        if let Some(s) = self.model.sets.get(name) {
            return Some(s.clone());
        }
        if self.failed.contains(&key) {
            return None;
        }
        let Some(def) = self.config.sets.get(name) else {
            self.issues.push(Issue::new(from, format!("unknown set `{name}`")));
            return None;
        };
        if !self.active.insert(key.clone()) {
            self.fail(key.clone(), key, format!("set `{name}` is defined in terms of itself"));
            return None;
        }
        let built = self.build_set(def, &key);
        self.active.remove(&key);
        match built {
            Ok(s) => {
                self.model.sets.insert(name.to_string(), s.clone());
                Some(s)
            }
            Err(Some(msg)) => {
                self.fail(key.clone(), key, msg);
                None
            }
            Err(None) => {
                self.failed.insert(key);
                None
            }
        }
    }

    /// `Err(None)` when a referenced entry already reported its own problem.
    fn build_set(&mut self, def: &SetDef, key: &str) -> Result<IndexSet, Option<String>> {
        let msg = |e: statconv_core::Error| Some(e.to_string());
        Ok(match def {
            SetDef::Full => IndexSet::full(),
            SetDef::Empty => IndexSet::empty(),
            SetDef::Squares => IndexSet::squares(),
            SetDef::Evens => IndexSet::evens(),
            SetDef::Odds => IndexSet::odds(),
            SetDef::Progression { first, step } => IndexSet::progression(*first, *step).map_err(msg)?,
            SetDef::Polynomial { coeffs } => IndexSet::polynomial_image(Polynomial::new(coeffs.clone()).map_err(msg)?),
            SetDef::Finite { elements } => IndexSet::finite_from_unsorted(elements.clone()).map_err(msg)?,
            SetDef::Union { of } | SetDef::Intersection { of } => {
                if of.is_empty() {
                    return Err(Some("`of` lists no sets".into()));
                }
                let field = format!("{key}.of");
                let parts: Vec<Option<IndexSet>> = of.iter().map(|n| self.set(n, &field)).collect();
                let parts: Vec<IndexSet> = parts.into_iter().collect::<Option<_>>().ok_or(None)?;
                let union = matches!(def, SetDef::Union { .. });
                parts.iter().skip(1).fold(
                    parts[0].clone(),
                    |acc, s| if union { acc.union(s) } else { acc.intersection(s) },
                )
            }
            SetDef::Complement { of } => self.set(of, &format!("{key}.of")).ok_or(None)?.complement(),
        })
    }

    fn space(&mut self, name: &str, field: String) -> Result<MetricSpace, Option<String>> {
        match self.model.space(name) {
            Some(s) => Ok(s),
            None if self.config.spaces.contains_key(name) => Err(None),
            None => {
                self.issues.push(Issue::new(field, format!("unknown space `{name}`")));
                Err(None)
            }
        }
    }

    fn sequence(&mut self, name: &str, from: &str) -> Option<LazySequence> {
        let key = format!("sequences.{name}");
        if let Some(s) = self.model.sequences.get(name) {
            return Some(s.clone());
        }
        if self.failed.contains(&key) {
            return None;
        }
        let Some(def) = self.config.sequences.get(name) else {
            self.issues.push(Issue::new(from, format!("unknown sequence `{name}`")));
            return None;
        };
        if !self.active.insert(key.clone()) {
            self.fail(
                key.clone(),
                key,
                format!("sequence `{name}` is defined in terms of itself"),
            );
            return None;
        }
        let built = self.build_sequence(def, &key);
        self.active.remove(&key);
        match built {
            Ok(s) => {
                let s = s.named(name);
                self.model.sequences.insert(name.to_string(), s.clone());
                Some(s)
            }
            Err(Some(msg)) => {
                self.fail(key.clone(), key, msg);
                None
            }
            Err(None) => {
                self.failed.insert(key);
                None
            }
        }
    }

    fn build_sequence(&mut self, def: &SequenceDef, key: &str) -> Result<LazySequence, Option<String>> {
        let msg = |e: statconv_core::Error| Some(e.to_string());
        let field = |k: &str| format!("{key}.{k}");
        match def {
            SequenceDef::Constant { space, point } => {
                let sp = self.space(space, field("space"))?;
                LazySequence::constant(&sp, point.clone()).map_err(msg)
            }
            SequenceDef::Reciprocal { space, center, shift } => {
                let sp = self.space(space, field("space"))?;
                LazySequence::reciprocal(&sp, *center, *shift).map_err(msg)
            }
            SequenceDef::Example1 { space, x, y } => {
                let sp = self.space(space, field("space"))?;
                sp.check_point(x).and_then(|_| sp.check_point(y)).map_err(msg)?;
                make_example1(&sp, x.clone(), y.clone()).map_err(msg)
            }
            SequenceDef::Example2 { space, x, y } => {
                let sp = self.space(space, field("space"))?;
                sp.check_point(x).and_then(|_| sp.check_point(y)).map_err(msg)?;
                make_example2(&sp, x.clone(), y.clone()).map_err(msg)
            }
            SequenceDef::Alternating {
                space,
                along,
                odd,
                even,
            } => {
                let sp = self.space(space, field("space"))?;
                let k = self.set(along, &field("along")).ok_or(None)?;
                LazySequence::alternating(&sp, k, odd.clone(), even.clone()).map_err(msg)
            }
            SequenceDef::Splice { base, on, patch } => {
                let b = self.sequence(base, &field("base"));
                let k = self.set(on, &field("on"));
                let p = self.sequence(patch, &field("patch"));
                let (b, k, p) = (b.ok_or(None)?, k.ok_or(None)?, p.ok_or(None)?);
                splice(&b, &k, &p).map_err(msg)
            }
            SequenceDef::Table { space, head, tail } => {
                let sp = self.space(space, field("space"))?;
                let t = self.sequence(tail, &field("tail")).ok_or(None)?;
                LazySequence::table(&sp, head.clone(), t).map_err(msg)
            }
        }
    }
}
