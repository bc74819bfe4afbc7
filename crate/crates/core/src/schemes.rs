//! Argumentation schemes: premise slots, a conclusion template, and an
//! ordered list of critical questions, each bound to an evaluator kind.
//!
//! Schemes are plain data. The two shipped definitions live in
//! [`SchemeRegistry::builtin`]; others can be loaded from a JSON array of
//! [`SchemeDefinition`] objects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXPERT_OPINION: &str = "expert_opinion";
pub const CAUSE_TO_EFFECT: &str = "cause_to_effect";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotKind {
    /// Id of a [`Source`](crate::corpus::Source).
    SourceRef,
    /// Concept id in the expertise taxonomy.
    ConceptRef,
    /// Id of a [`Statement`](crate::corpus::Statement).
    StatementRef,
    FreeText,
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotKind::SourceRef => "source-ref",
            SlotKind::ConceptRef => "concept-ref",
            SlotKind::StatementRef => "statement-ref",
            SlotKind::FreeText => "free-text",
        })
    }
}

/// Which evaluator scores a critical question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    Expertise,
    Field,
    Opinion,
    Trustworthiness,
    Consistency,
    BackupEvidence,
    /// Scored only through the challenge lifecycle.
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseSlot {
    pub name: String,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalQuestion {
    pub cq_id: String,
    pub label: String,
    pub text: String,
    pub evaluator: EvaluatorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDefinition {
    pub id: String,
    pub premises: Vec<PremiseSlot>,
    pub conclusion_template: String,
    pub cqs: Vec<CriticalQuestion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("scheme {0} is already registered")]
    DuplicateScheme(String),
    #[error("invalid scheme definition {id}: {reason}")]
    InvalidDefinition { id: String, reason: String },
    #[error("unknown scheme {0}")]
    UnknownScheme(String),
}

/// One reason a set of slot fillers does not instantiate a scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum SlotViolation {
    Missing {
        slot: String,
    },
    Extra {
        slot: String,
    },
    WrongKind {
        slot: String,
        kind: SlotKind,
        value: String,
    },
}

impl SlotViolation {
    pub fn slot(&self) -> &str {
        match self {
            SlotViolation::Missing { slot }
            | SlotViolation::Extra { slot }
            | SlotViolation::WrongKind { slot, .. } => slot,
        }
    }
}

impl fmt::Display for SlotViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotViolation::Missing { slot } => write!(f, "missing slot {slot}"),
            SlotViolation::Extra { slot } => write!(f, "unexpected slot {slot}"),
            SlotViolation::WrongKind { slot, kind, value } => {
                write!(f, "slot {slot} expects a {kind}, got {value:?}")
            }
        }
    }
}

/// Names inside `{...}` in a template, in order of appearance.
fn placeholders(template: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| format!("unterminated placeholder in {template:?}"))?;
        out.push(&after[..close]);
        rest = &after[close + 1..];
    }
    Ok(out)
}

impl SchemeDefinition {
    pub fn slot(&self, name: &str) -> Option<&PremiseSlot> {
        self.premises.iter().find(|p| p.name == name)
    }

    /// First premise slot of the given kind. Evaluators use this to find the
    /// source, domain and assertion of an argument regardless of slot naming.
    pub fn first_slot_of(&self, kind: SlotKind) -> Option<&PremiseSlot> {
        self.premises.iter().find(|p| p.kind == kind)
    }

    pub fn cq(&self, cq_id: &str) -> Option<&CriticalQuestion> {
        self.cqs.iter().find(|q| q.cq_id == cq_id)
    }

    pub fn check(&self) -> Result<(), SchemeError> {
        let invalid = |reason: String| SchemeError::InvalidDefinition {
            id: self.id.clone(),
            reason,
        };
        if self.id.trim().is_empty() {
            return Err(invalid("id must not be empty".into()));
        }
        if self.premises.is_empty() {
            return Err(invalid("at least one premise is required".into()));
        }
        if self.cqs.is_empty() {
            return Err(invalid("at least one critical question is required".into()));
        }
        let mut names = BTreeSet::new();
        for p in &self.premises {
            if p.name.trim().is_empty() {
                return Err(invalid("premise names must not be empty".into()));
            }
            if !names.insert(p.name.as_str()) {
                return Err(invalid(format!("duplicate premise slot {}", p.name)));
            }
        }
        let mut cq_ids = BTreeSet::new();
        for q in &self.cqs {
            if q.cq_id.trim().is_empty() {
                return Err(invalid("cq_id must not be empty".into()));
            }
            if !cq_ids.insert(q.cq_id.as_str()) {
                return Err(invalid(format!("duplicate critical question {}", q.cq_id)));
            }
        }
        for name in placeholders(&self.conclusion_template).map_err(invalid)? {
            if !names.contains(name) {
                return Err(invalid(format!(
                    "conclusion placeholder {{{name}}} names no premise slot"
                )));
            }
        }
        Ok(())
    }

    /// Checks that `fillers` fill every slot with a value of the right shape
    /// and nothing else. Reference kinds must be non-blank tokens; whether
    /// they resolve is up to the corpus.
    pub fn validate_instantiation(
        &self,
        fillers: &BTreeMap<String, String>,
    ) -> Result<(), Vec<SlotViolation>> {
        let mut violations = Vec::new();
        for slot in &self.premises {
            match fillers.get(&slot.name) {
                None => violations.push(SlotViolation::Missing {
                    slot: slot.name.clone(),
                }),
                Some(v)
                    if slot.kind != SlotKind::FreeText
                        && (v.trim().is_empty() || v.trim() != v) =>
                {
                    violations.push(SlotViolation::WrongKind {
                        slot: slot.name.clone(),
                        kind: slot.kind,
                        value: v.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        for name in fillers.keys() {
            if self.slot(name).is_none() {
                violations.push(SlotViolation::Extra { slot: name.clone() });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Fills the conclusion template. Unfilled placeholders are left as-is.
    pub fn render_conclusion(&self, fillers: &BTreeMap<String, String>) -> String {
        let mut out = self.conclusion_template.clone();
        for (k, v) in fillers {
            out = out.replace(&format!("{{{k}}}"), v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemeRegistry {
    schemes: BTreeMap<String, SchemeDefinition>,
}

fn cq(cq_id: &str, label: &str, text: &str, evaluator: EvaluatorKind) -> CriticalQuestion {
    CriticalQuestion {
        cq_id: cq_id.into(),
        label: label.into(),
        text: text.into(),
        evaluator,
    }
}

fn slot(name: &str, kind: SlotKind) -> PremiseSlot {
    PremiseSlot {
        name: name.into(),
        kind,
    }
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Argument from expert opinion and cause to effect.
    pub fn builtin() -> Self {
        use EvaluatorKind::*;
        use SlotKind::*;

        let expert_opinion = SchemeDefinition {
            id: EXPERT_OPINION.into(),
            premises: vec![
                slot("expert", SourceRef),
                slot("domain", ConceptRef),
                slot("assertion", StatementRef),
            ],
            conclusion_template: "{assertion} may plausibly be taken to be true".into(),
            cqs: vec![
                cq(
                    "CQ1",
                    "Expertise",
                    "How credible is {expert} as an expert source?",
                    Expertise,
                ),
                cq(
                    "CQ2",
                    "Field",
                    "Is {expert} an expert in the field that {assertion} is in?",
                    Field,
                ),
                cq(
                    "CQ3",
                    "Opinion",
                    "Does the testimony of {expert} imply {assertion}?",
                    Opinion,
                ),
                cq(
                    "CQ4",
                    "Trustworthiness",
                    "Is {expert} reliable?",
                    Trustworthiness,
                ),
                cq(
                    "CQ5",
                    "Consistency",
                    "Is {assertion} consistent with the testimony of other experts?",
                    Consistency,
                ),
                cq(
                    "CQ6",
                    "Backup Evidence",
                    "Is {assertion} supported by evidence?",
                    BackupEvidence,
                ),
            ],
        };
        let cause_to_effect = SchemeDefinition {
            id: CAUSE_TO_EFFECT.into(),
            premises: vec![slot("cause", StatementRef), slot("effect", StatementRef)],
            conclusion_template: "{cause} will (or might) bring about {effect}".into(),
            cqs: vec![
                cq(
                    "CQ1",
                    "Causal generalization",
                    "Is the causal generalization credible?",
                    Manual,
                ),
                cq(
                    "CQ2",
                    "Alternative cause",
                    "Could the effect have another cause?",
                    Manual,
                ),
                cq(
                    "CQ3",
                    "Confound",
                    "Is there a correlation-only confound?",
                    Manual,
                ),
            ],
        };
        let mut reg = Self::empty();
        reg.register(expert_opinion)
            .expect("builtin scheme is valid");
        reg.register(cause_to_effect)
            .expect("builtin scheme is valid");
        reg
    }

    pub fn from_definitions(defs: Vec<SchemeDefinition>) -> Result<Self, SchemeError> {
        let mut reg = Self::empty();
        for def in defs {
            reg.register(def)?;
        }
        Ok(reg)
    }

    pub fn register(&mut self, def: SchemeDefinition) -> Result<(), SchemeError> {
        if self.schemes.contains_key(&def.id) {
            return Err(SchemeError::DuplicateScheme(def.id));
        }
        def.check()?;
        self.schemes.insert(def.id.clone(), def);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&SchemeDefinition> {
        self.schemes.get(id)
    }

    pub fn require(&self, id: &str) -> Result<&SchemeDefinition, SchemeError> {
        self.get(id)
            .ok_or_else(|| SchemeError::UnknownScheme(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &SchemeDefinition> {
        self.schemes.values()
    }

    pub fn len(&self) -> usize {
        self.schemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemes.is_empty()
    }
}
