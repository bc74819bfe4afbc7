//! The argument knowledge base: statements, expert sources, testimony links,
//! scheme-based arguments and conveyed critical-question challenges.
//!
//! Every mutation validates first and writes second, so a failed call leaves
//! the corpus untouched and a successful one bumps [`Corpus::version`].

mod file;
mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schemes::{SchemeError, SchemeRegistry, SlotKind, SlotViolation};
use crate::taxonomy::{ConceptId, Taxonomy, TaxonomyError, TaxonomySet};

pub use file::{load_schemes, load_taxonomy, CorpusFile, CorpusLoader, TaxonomyRef};
pub use store::CorpusStore;

/// Taxonomy that holds expertise fields and argument domains.
pub const EXPERTISE_TAXONOMY: &str = "expertise";
/// Taxonomy that holds source and author locations.
pub const LOCATION_TAXONOMY: &str = "location";

/// A concept qualified by the taxonomy it lives in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptRef {
    pub taxonomy: String,
    pub concept: ConceptId,
}

impl ConceptRef {
    pub fn new(taxonomy: &str, concept: &str) -> Result<Self, TaxonomyError> {
        Ok(Self {
            taxonomy: taxonomy.to_string(),
            concept: ConceptId::new(concept)?,
        })
    }
}

impl fmt::Display for ConceptRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.taxonomy, self.concept)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub topic_concepts: BTreeSet<ConceptRef>,
    /// The field the proposition is part of.
    #[serde(default)]
    pub field: Option<ConceptRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub id: String,
    pub display_name: String,
    /// Concepts in the expertise taxonomy.
    #[serde(default)]
    pub expertise: BTreeSet<ConceptId>,
    /// Concept in the location taxonomy.
    #[serde(default)]
    pub location: Option<ConceptId>,
    #[serde(default)]
    pub unreliable_flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Supports,
    Opposes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestimonyLink {
    pub source: String,
    pub statement: String,
    pub polarity: Polarity,
    pub asserted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Pro,
    Con,
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stance::Pro => "pro",
            Stance::Con => "con",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub id: String,
    pub scheme: String,
    pub fillers: BTreeMap<String, String>,
    pub conclusion: String,
    pub target_hypothesis: String,
    pub stance: Stance,
    pub author: String,
    #[serde(default)]
    pub author_location: Option<ConceptId>,
    pub posted_at: DateTime<Utc>,
    #[serde(default)]
    pub evidence_links: Vec<String>,
    #[serde(default)]
    pub annotations: BTreeSet<ConceptRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChallengeStatus {
    Open,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub id: String,
    pub argument: String,
    pub cq_id: String,
    pub raised_by: String,
    pub raised_at: DateTime<Utc>,
    pub status: ChallengeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("dangling reference: {referrer} refers to unknown {kind} {id}")]
    DanglingReference {
        kind: &'static str,
        id: String,
        referrer: String,
    },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("invalid argument {argument}: {reason}")]
    InvalidArgument {
        argument: String,
        reason: String,
        violations: Vec<SlotViolation>,
    },
    #[error("unknown argument {0}")]
    UnknownArgument(String),
    #[error("argument {argument} has no critical question {cq_id}")]
    UnknownCq { argument: String, cq_id: String },
    #[error("critical question {cq_id} on {argument} already has open challenge {challenge}")]
    DuplicateOpenChallenge {
        argument: String,
        cq_id: String,
        challenge: String,
    },
    #[error("unknown challenge {0}")]
    UnknownChallenge(String),
    #[error("challenge {0} is already resolved")]
    AlreadyResolved(String),
    #[error("unknown source {0}")]
    UnknownSource(String),
    #[error("unknown statement {0}")]
    UnknownStatement(String),
    #[error("{source_id} already {existing:?} statement {statement}; testimony cannot flip")]
    ConflictingTestimony {
        source_id: String,
        statement: String,
        existing: Polarity,
    },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// The knowledge base.
#[derive(Debug, Clone)]
pub struct Corpus {
    taxonomies: TaxonomySet,
    schemes: SchemeRegistry,
    statements: BTreeMap<String, Statement>,
    sources: BTreeMap<String, Source>,
    testimony: BTreeMap<(String, String), TestimonyLink>,
    arguments: BTreeMap<String, Argument>,
    challenges: BTreeMap<String, Challenge>,
    /// Taxonomies written back by `to_file`.
    owned_taxonomies: BTreeSet<String>,
    version: u64,
}

impl Default for Corpus {
    fn default() -> Self {
        Self::new(TaxonomySet::new(), SchemeRegistry::builtin())
    }
}

impl Corpus {
    pub fn new(taxonomies: TaxonomySet, schemes: SchemeRegistry) -> Self {
        Self {
            owned_taxonomies: taxonomies.iter().map(|t| t.name().to_string()).collect(),
            taxonomies,
            schemes,
            statements: BTreeMap::new(),
            sources: BTreeMap::new(),
            testimony: BTreeMap::new(),
            arguments: BTreeMap::new(),
            challenges: BTreeMap::new(),
            version: 0,
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub(crate) fn set_version(&mut self, version: u64) {
        self.version = version;
    }

    pub fn taxonomies(&self) -> &TaxonomySet {
        &self.taxonomies
    }

    pub fn schemes(&self) -> &SchemeRegistry {
        &self.schemes
    }

    pub fn statement(&self, id: &str) -> Option<&Statement> {
        self.statements.get(id)
    }

    pub fn source(&self, id: &str) -> Option<&Source> {
        self.sources.get(id)
    }

    pub fn argument(&self, id: &str) -> Option<&Argument> {
        self.arguments.get(id)
    }

    pub fn challenge(&self, id: &str) -> Option<&Challenge> {
        self.challenges.get(id)
    }

    pub fn testimony(&self, source: &str, statement: &str) -> Option<&TestimonyLink> {
        self.testimony
            .get(&(source.to_string(), statement.to_string()))
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.values()
    }

    pub fn sources(&self) -> impl Iterator<Item = &Source> {
        self.sources.values()
    }

    pub fn testimony_links(&self) -> impl Iterator<Item = &TestimonyLink> {
        self.testimony.values()
    }

    /// Testimony on one statement, ordered by source id.
    pub fn testimony_on<'a>(
        &'a self,
        statement: &'a str,
    ) -> impl Iterator<Item = &'a TestimonyLink> + 'a {
        self.testimony
            .values()
            .filter(move |l| l.statement == statement)
    }

    pub fn arguments(&self) -> impl Iterator<Item = &Argument> {
        self.arguments.values()
    }

    pub fn challenges(&self) -> impl Iterator<Item = &Challenge> {
        self.challenges.values()
    }

    pub fn open_challenge(&self, argument: &str, cq_id: &str) -> Option<&Challenge> {
        self.challenges.values().find(|c| {
            c.status == ChallengeStatus::Open && c.argument == argument && c.cq_id == cq_id
        })
    }

    /// The expertise taxonomy, if loaded.
    pub fn expertise(&self) -> Option<&Taxonomy> {
        self.taxonomies.get(EXPERTISE_TAXONOMY).ok()
    }

    pub fn location(&self) -> Option<&Taxonomy> {
        self.taxonomies.get(LOCATION_TAXONOMY).ok()
    }

    /// Compares content, ignoring the version counter.
    pub fn same_content(&self, other: &Corpus) -> bool {
        self.taxonomies == other.taxonomies
            && self.schemes == other.schemes
            && self.statements == other.statements
            && self.sources == other.sources
            && self.testimony == other.testimony
            && self.arguments == other.arguments
            && self.challenges == other.challenges
    }

    fn bump(&mut self) {
        self.version += 1;
    }

    pub fn add_taxonomy(&mut self, tax: Taxonomy) -> Result<(), CorpusError> {
        let name = tax.name().to_string();
        self.taxonomies.insert(tax)?;
        self.owned_taxonomies.insert(name);
        self.bump();
        Ok(())
    }

    fn check_concept(
        &self,
        taxonomy: &str,
        concept: &ConceptId,
        referrer: &str,
    ) -> Result<(), CorpusError> {
        let tax = self
            .taxonomies
            .get(taxonomy)
            .map_err(|_| CorpusError::DanglingReference {
                kind: "taxonomy",
                id: taxonomy.to_string(),
                referrer: referrer.to_string(),
            })?;
        if !tax.contains(concept.as_str()) {
            return Err(CorpusError::DanglingReference {
                kind: "concept",
                id: format!("{taxonomy}:{concept}"),
                referrer: referrer.to_string(),
            });
        }
        Ok(())
    }

    fn check_statement_ref(&self, id: &str, referrer: &str) -> Result<(), CorpusError> {
        if self.statements.contains_key(id) {
            Ok(())
        } else {
            Err(CorpusError::DanglingReference {
                kind: "statement",
                id: id.to_string(),
                referrer: referrer.to_string(),
            })
        }
    }

    fn check_statement(&self, s: &Statement) -> Result<(), CorpusError> {
        if s.id.trim().is_empty() {
            return Err(CorpusError::InvariantViolation(
                "statement id must not be empty".into(),
            ));
        }
        let referrer = format!("statement {}", s.id);
        for c in s.topic_concepts.iter().chain(s.field.iter()) {
            self.check_concept(&c.taxonomy, &c.concept, &referrer)?;
        }
        Ok(())
    }

    fn check_source(&self, s: &Source) -> Result<(), CorpusError> {
        if s.id.trim().is_empty() {
            return Err(CorpusError::InvariantViolation(
                "source id must not be empty".into(),
            ));
        }
        let referrer = format!("source {}", s.id);
        for e in &s.expertise {
            self.check_concept(EXPERTISE_TAXONOMY, e, &referrer)?;
        }
        if let Some(loc) = &s.location {
            self.check_concept(LOCATION_TAXONOMY, loc, &referrer)?;
        }
        Ok(())
    }

    fn check_argument(&self, a: &Argument) -> Result<(), CorpusError> {
        let invalid =
            |reason: String, violations: Vec<SlotViolation>| CorpusError::InvalidArgument {
                argument: a.id.clone(),
                reason,
                violations,
            };
        if a.id.trim().is_empty() {
            return Err(invalid("argument id must not be empty".into(), vec![]));
        }
        let scheme = self
            .schemes
            .get(&a.scheme)
            .ok_or_else(|| invalid(format!("unknown scheme {}", a.scheme), vec![]))?;
        if let Err(violations) = scheme.validate_instantiation(&a.fillers) {
            let reason = violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(invalid(reason, violations));
        }

        let referrer = format!("argument {}", a.id);
        for slot in &scheme.premises {
            let value = &a.fillers[&slot.name];
            let slot_referrer = format!("{referrer} slot {}", slot.name);
            match slot.kind {
                SlotKind::SourceRef if !self.sources.contains_key(value) => {
                    return Err(CorpusError::DanglingReference {
                        kind: "source",
                        id: value.clone(),
                        referrer: slot_referrer,
                    })
                }
                SlotKind::StatementRef => self.check_statement_ref(value, &slot_referrer)?,
                SlotKind::ConceptRef => self.check_concept(
                    EXPERTISE_TAXONOMY,
                    &ConceptId::new(value.clone())?,
                    &slot_referrer,
                )?,
                _ => {}
            }
        }
        self.check_statement_ref(&a.conclusion, &referrer)?;
        self.check_statement_ref(&a.target_hypothesis, &referrer)?;
        if let Some(loc) = &a.author_location {
            self.check_concept(LOCATION_TAXONOMY, loc, &referrer)?;
        }
        for c in &a.annotations {
            self.check_concept(&c.taxonomy, &c.concept, &referrer)?;
        }
        Ok(())
    }

    fn check_testimony(&self, l: &TestimonyLink) -> Result<(), CorpusError> {
        if !self.sources.contains_key(&l.source) {
            return Err(CorpusError::UnknownSource(l.source.clone()));
        }
        if !self.statements.contains_key(&l.statement) {
            return Err(CorpusError::UnknownStatement(l.statement.clone()));
        }
        Ok(())
    }

    fn check_cq(&self, argument: &str, cq_id: &str) -> Result<(), CorpusError> {
        let arg = self
            .arguments
            .get(argument)
            .ok_or_else(|| CorpusError::UnknownArgument(argument.to_string()))?;
        let scheme = self.schemes.require(&arg.scheme)?;
        if scheme.cq(cq_id).is_none() {
            return Err(CorpusError::UnknownCq {
                argument: argument.to_string(),
                cq_id: cq_id.to_string(),
            });
        }
        Ok(())
    }

    pub fn add_statement(&mut self, s: Statement) -> Result<(), CorpusError> {
        if self.statements.contains_key(&s.id) {
            return Err(CorpusError::DuplicateId {
                kind: "statement",
                id: s.id,
            });
        }
        self.check_statement(&s)?;
        self.statements.insert(s.id.clone(), s);
        self.bump();
        Ok(())
    }

    pub fn add_source(&mut self, s: Source) -> Result<(), CorpusError> {
        if self.sources.contains_key(&s.id) {
            return Err(CorpusError::DuplicateId {
                kind: "source",
                id: s.id,
            });
        }
        self.check_source(&s)?;
        self.sources.insert(s.id.clone(), s);
        self.bump();
        Ok(())
    }

    pub fn add_argument(&mut self, a: Argument) -> Result<(), CorpusError> {
        if self.arguments.contains_key(&a.id) {
            return Err(CorpusError::DuplicateId {
                kind: "argument",
                id: a.id,
            });
        }
        self.check_argument(&a)?;
        self.arguments.insert(a.id.clone(), a);
        self.bump();
        Ok(())
    }

    /// Records a testimony link. Re-asserting the same polarity is a no-op
    /// and returns `false`; the opposite polarity is rejected.
    pub fn assert_testimony(
        &mut self,
        source: &str,
        statement: &str,
        polarity: Polarity,
        asserted_at: DateTime<Utc>,
    ) -> Result<bool, CorpusError> {
        let link = TestimonyLink {
            source: source.to_string(),
            statement: statement.to_string(),
            polarity,
            asserted_at,
        };
        self.check_testimony(&link)?;
        let key = (link.source.clone(), link.statement.clone());
        if let Some(existing) = self.testimony.get(&key) {
            if existing.polarity == polarity {
                return Ok(false);
            }
            return Err(CorpusError::ConflictingTestimony {
                source_id: link.source,
                statement: link.statement,
                existing: existing.polarity,
            });
        }
        self.testimony.insert(key, link);
        self.bump();
        Ok(true)
    }

    fn next_challenge_id(&self) -> String {
        let mut n = self.challenges.len() + 1;
        loop {
            let id = format!("ch{n}");
            if !self.challenges.contains_key(&id) {
                return id;
            }
            n += 1;
        }
    }

    /// Opens a challenge on one critical question of an argument.
    pub fn convey_cq(
        &mut self,
        argument: &str,
        cq_id: &str,
        raised_by: &str,
        raised_at: DateTime<Utc>,
    ) -> Result<Challenge, CorpusError> {
        self.check_cq(argument, cq_id)?;
        if let Some(open) = self.open_challenge(argument, cq_id) {
            return Err(CorpusError::DuplicateOpenChallenge {
                argument: argument.to_string(),
                cq_id: cq_id.to_string(),
                challenge: open.id.clone(),
            });
        }
        let challenge = Challenge {
            id: self.next_challenge_id(),
            argument: argument.to_string(),
            cq_id: cq_id.to_string(),
            raised_by: raised_by.to_string(),
            raised_at,
            status: ChallengeStatus::Open,
            resolution_note: None,
        };
        self.challenges
            .insert(challenge.id.clone(), challenge.clone());
        self.bump();
        Ok(challenge)
    }

    pub fn resolve_cq(
        &mut self,
        challenge: &str,
        note: Option<String>,
    ) -> Result<Challenge, CorpusError> {
        let ch = self
            .challenges
            .get_mut(challenge)
            .ok_or_else(|| CorpusError::UnknownChallenge(challenge.to_string()))?;
        if ch.status == ChallengeStatus::Resolved {
            return Err(CorpusError::AlreadyResolved(challenge.to_string()));
        }
        ch.status = ChallengeStatus::Resolved;
        ch.resolution_note = note;
        let out = ch.clone();
        self.bump();
        Ok(out)
    }

    /// Inserts a challenge read from a corpus file, keeping its id and status.
    fn insert_challenge(&mut self, ch: Challenge) -> Result<(), CorpusError> {
        if self.challenges.contains_key(&ch.id) {
            return Err(CorpusError::DuplicateId {
                kind: "challenge",
                id: ch.id,
            });
        }
        self.check_cq(&ch.argument, &ch.cq_id)?;
        if ch.status == ChallengeStatus::Open {
            if let Some(open) = self.open_challenge(&ch.argument, &ch.cq_id) {
                return Err(CorpusError::InvariantViolation(format!(
                    "challenges {} and {} are both open on {} {}",
                    open.id, ch.id, ch.argument, ch.cq_id
                )));
            }
        }
        self.challenges.insert(ch.id.clone(), ch);
        self.bump();
        Ok(())
    }

    fn insert_testimony(&mut self, link: TestimonyLink) -> Result<(), CorpusError> {
        self.check_testimony(&link)?;
        let key = (link.source.clone(), link.statement.clone());
        if self.testimony.contains_key(&key) {
            return Err(CorpusError::InvariantViolation(format!(
                "more than one testimony link for source {} on statement {}",
                link.source, link.statement
            )));
        }
        self.testimony.insert(key, link);
        self.bump();
        Ok(())
    }

    /// Re-checks every reference and invariant in the corpus.
    pub fn audit(&self) -> Result<(), CorpusError> {
        for s in self.statements.values() {
            self.check_statement(s)?;
        }
        for s in self.sources.values() {
            self.check_source(s)?;
        }
        for l in self.testimony.values() {
            self.check_testimony(l)?;
        }
        for a in self.arguments.values() {
            self.check_argument(a)?;
        }
        let mut open = BTreeSet::new();
        for ch in self.challenges.values() {
            self.check_cq(&ch.argument, &ch.cq_id)?;
            if ch.status == ChallengeStatus::Open && !open.insert((&ch.argument, &ch.cq_id)) {
                return Err(CorpusError::InvariantViolation(format!(
                    "two open challenges on {} {}",
                    ch.argument, ch.cq_id
                )));
            }
        }
        Ok(())
    }
}
