//! Three-valued analysis outcomes.
//!
//! Only exact symbolic computations produce [`Verdict::Proven`]. Finite
//! evidence produces [`Verdict::SupportedAtHorizon`] or a refutation carrying
//! the indices that witness it.

use serde::{Serialize, Serializer};

/// Indices and a short human-readable note backing a verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    pub indices: Vec<u64>,
    pub note: String,
}

impl Evidence {
    pub fn new(indices: Vec<u64>, note: impl Into<String>) -> Self {
        Self {
            indices,
            note: note.into(),
        }
    }

    pub fn note(note: impl Into<String>) -> Self {
        Self::new(Vec::new(), note)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Established exactly on the symbolic class.
    Proven,
    /// Consistent with the claim on every index up to `horizon`.
    SupportedAtHorizon { horizon: u64, evidence: Evidence },
    /// Contradicted, either exactly or by a finite witness.
    Refuted(Evidence),
}

impl Verdict {
    pub fn supported(horizon: u64) -> Self {
        Verdict::SupportedAtHorizon {
            horizon,
            evidence: Evidence::default(),
        }
    }

    pub fn supported_with(horizon: u64, evidence: Evidence) -> Self {
        Verdict::SupportedAtHorizon { horizon, evidence }
    }

    pub fn refuted(indices: Vec<u64>, note: impl Into<String>) -> Self {
        Verdict::Refuted(Evidence::new(indices, note))
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven)
    }

    pub fn is_supported(&self) -> bool {
        matches!(self, Verdict::SupportedAtHorizon { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    /// True unless the claim was refuted.
    pub fn holds(&self) -> bool {
        !self.is_refuted()
    }

    /// Same polarity: both hold or both are refuted.
    pub fn agrees_with(&self, other: &Verdict) -> bool {
        self.holds() == other.holds()
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proven => "Proven",
            Verdict::SupportedAtHorizon { .. } => "SupportedAtHorizon",
            Verdict::Refuted(_) => "Refuted",
        }
    }

    pub fn evidence(&self) -> Option<&Evidence> {
        match self {
            Verdict::Proven => None,
            Verdict::SupportedAtHorizon { evidence, .. } => Some(evidence),
            Verdict::Refuted(evidence) => Some(evidence),
        }
    }

    /// Witness indices, empty for proven claims.
    pub fn witness(&self) -> &[u64] {
        self.evidence().map(|e| e.indices.as_slice()).unwrap_or(&[])
    }

    /// Conjunction of several claims: refuted if any is refuted, proven only
    /// if all are proven, otherwise supported at the smallest horizon seen.
    pub fn all<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Verdict {
        let mut horizon: Option<u64> = None;
        for v in verdicts {
            match v {
                Verdict::Refuted(_) => return v.clone(),
                Verdict::SupportedAtHorizon { horizon: h, .. } => {
                    horizon = Some(horizon.map_or(*h, |cur| cur.min(*h)));
                }
                Verdict::Proven => {}
            }
        }
        match horizon {
            None => Verdict::Proven,
            Some(h) => Verdict::supported(h),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Proven => write!(f, "Proven"),
            Verdict::SupportedAtHorizon { horizon, .. } => write!(f, "SupportedAtHorizon({horizon})"),
            Verdict::Refuted(e) if e.indices.is_empty() => write!(f, "Refuted"),
            Verdict::Refuted(e) => write!(f, "Refuted(witness {:?})", e.indices),
        }
    }
}

#[derive(Serialize)]
struct VerdictDoc<'a> {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<u64>,
    witness: &'a [u64],
    #[serde(skip_serializing_if = "str::is_empty")]
    note: &'a str,
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let horizon = match self {
            Verdict::SupportedAtHorizon { horizon, .. } => Some(*horizon),
            _ => None,
        };
        VerdictDoc {
            verdict: self.label(),
            horizon,
            witness: self.witness(),
            note: self.evidence().map(|e| e.note.as_str()).unwrap_or(""),
        }
        .serialize(serializer)
    }
}
