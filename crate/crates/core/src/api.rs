//! JSON bodies shared by the CLI and the HTTP service.
//!
//! Both front ends call these functions and emit the returned text verbatim,
//! which keeps their output byte-identical for the same corpus version.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{Argument, Challenge, Corpus, CorpusError, Stance, TestimonyLink};
use crate::credibility::{self, ReportView};
use crate::query::{self, QueryError, QueryResults};
use crate::schemes::{SchemeDefinition, SchemeError};
use crate::taxonomy::TaxonomyError;

/// How an error maps onto a transport status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    BadRequest,
    NotFound,
    Conflict,
    Server,
}

/// Machine-readable error body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

/// Every code an [`ApiError`] can carry, with its class.
pub const ERROR_CODES: &[(&str, ErrorClass)] = &[
    ("bad_request", ErrorClass::BadRequest),
    ("parse_error", ErrorClass::BadRequest),
    ("syntax_error", ErrorClass::BadRequest),
    ("invalid_argument", ErrorClass::BadRequest),
    ("invalid_definition", ErrorClass::BadRequest),
    ("invalid_concept_id", ErrorClass::BadRequest),
    ("dangling_reference", ErrorClass::BadRequest),
    ("invariant_violation", ErrorClass::BadRequest),
    ("taxonomy_shape", ErrorClass::BadRequest),
    ("unknown_argument", ErrorClass::NotFound),
    ("unknown_cq", ErrorClass::NotFound),
    ("unknown_challenge", ErrorClass::NotFound),
    ("unknown_source", ErrorClass::NotFound),
    ("unknown_statement", ErrorClass::NotFound),
    ("unknown_concept", ErrorClass::NotFound),
    ("unknown_taxonomy", ErrorClass::NotFound),
    ("unknown_scheme", ErrorClass::NotFound),
    ("unknown_endpoint", ErrorClass::NotFound),
    ("duplicate_id", ErrorClass::Conflict),
    ("duplicate_scheme", ErrorClass::Conflict),
    ("duplicate_taxonomy", ErrorClass::Conflict),
    ("duplicate_open_challenge", ErrorClass::Conflict),
    ("already_resolved", ErrorClass::Conflict),
    ("conflicting_testimony", ErrorClass::Conflict),
    ("io_error", ErrorClass::Server),
    ("internal", ErrorClass::Server),
];

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        debug_assert!(
            ERROR_CODES.iter().any(|(c, _)| *c == code),
            "undocumented code {code}"
        );
        Self {
            code: code.to_string(),
            message: message.into(),
            detail: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("bad_request", message)
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn class(&self) -> ErrorClass {
        ERROR_CODES
            .iter()
            .find(|(c, _)| *c == self.code)
            .map_or(ErrorClass::Server, |(_, class)| *class)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("error serializes");
        out.push('\n');
        out
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<TaxonomyError> for ApiError {
    fn from(e: TaxonomyError) -> Self {
        let code = match &e {
            TaxonomyError::InvalidConceptId(_) => "invalid_concept_id",
            TaxonomyError::UnknownConcept { .. } => "unknown_concept",
            TaxonomyError::UnknownTaxonomy(_) => "unknown_taxonomy",
            TaxonomyError::DuplicateTaxonomy(_) => "duplicate_taxonomy",
            TaxonomyError::UnknownParent { .. }
            | TaxonomyError::DuplicateConcept { .. }
            | TaxonomyError::MultipleParents { .. }
            | TaxonomyError::CycleWouldForm { .. } => "taxonomy_shape",
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<SchemeError> for ApiError {
    fn from(e: SchemeError) -> Self {
        let code = match &e {
            SchemeError::DuplicateScheme(_) => "duplicate_scheme",
            SchemeError::InvalidDefinition { .. } => "invalid_definition",
            SchemeError::UnknownScheme(_) => "unknown_scheme",
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<CorpusError> for ApiError {
    fn from(e: CorpusError) -> Self {
        let message = e.to_string();
        match e {
            CorpusError::Parse {
                path, line, column, ..
            } => ApiError::new("parse_error", message)
                .with_detail(serde_json::json!({ "path": path, "line": line, "column": column })),
            CorpusError::Io { .. } => ApiError::new("io_error", message),
            CorpusError::DanglingReference { kind, id, referrer } => {
                ApiError::new("dangling_reference", message).with_detail(
                    serde_json::json!({ "kind": kind, "id": id, "referrer": referrer }),
                )
            }
            CorpusError::InvariantViolation(_) => ApiError::new("invariant_violation", message),
            CorpusError::DuplicateId { .. } => ApiError::new("duplicate_id", message),
            CorpusError::InvalidArgument { violations, .. } => {
                ApiError::new("invalid_argument", message)
                    .with_detail(serde_json::json!({ "violations": violations }))
            }
            CorpusError::UnknownArgument(_) => ApiError::new("unknown_argument", message),
            CorpusError::UnknownCq { .. } => ApiError::new("unknown_cq", message),
            CorpusError::DuplicateOpenChallenge { challenge, .. } => {
                ApiError::new("duplicate_open_challenge", message)
                    .with_detail(serde_json::json!({ "challenge": challenge }))
            }
            CorpusError::UnknownChallenge(_) => ApiError::new("unknown_challenge", message),
            CorpusError::AlreadyResolved(_) => ApiError::new("already_resolved", message),
            CorpusError::UnknownSource(_) => ApiError::new("unknown_source", message),
            CorpusError::UnknownStatement(_) => ApiError::new("unknown_statement", message),
            CorpusError::ConflictingTestimony { .. } => {
                ApiError::new("conflicting_testimony", message)
            }
            CorpusError::Taxonomy(e) => e.into(),
            CorpusError::Scheme(e) => e.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Syntax(s) => {
                ApiError::new("syntax_error", s.to_string()).with_detail(serde_json::json!({
                    "offset": s.offset,
                    "expected": s.expected,
                    "found": s.found,
                }))
            }
            QueryError::UnknownConcept { .. } => ApiError::new("unknown_concept", e.to_string()),
            QueryError::UnknownScheme(_) => ApiError::new("unknown_scheme", e.to_string()),
            QueryError::Corpus(c) => c.into(),
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("view serializes");
    out.push('\n');
    out
}

/// `CredibilityReport` JSON for one argument.
pub fn credibility_json(corpus: &Corpus, argument: &str) -> Result<String, ApiError> {
    Ok(credibility::credibility(argument, corpus)?.to_json())
}

/// Parses `text` (resolving relative dates against `now`), evaluates it and
/// renders the results body.
pub fn query_json(corpus: &Corpus, text: &str, now: DateTime<Utc>) -> Result<String, ApiError> {
    let q = query::parse_at(text, Some(now)).map_err(QueryError::from)?;
    let hits = query::evaluate(&q, corpus)?;
    Ok(QueryResults::new(&q, corpus, &hits).to_json())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemesView {
    pub corpus_version: u64,
    pub schemes: Vec<SchemeDefinition>,
}

pub fn schemes_json(corpus: &Corpus) -> String {
    pretty(&SchemesView {
        corpus_version: corpus.version(),
        schemes: corpus.schemes().iter().cloned().collect(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConceptView {
    pub corpus_version: u64,
    pub taxonomy: String,
    pub concept: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub path_to_root: Vec<String>,
    pub children: Vec<String>,
}

pub fn concept_json(corpus: &Corpus, taxonomy: &str, concept: &str) -> Result<String, ApiError> {
    let tax = corpus.taxonomies().get(taxonomy)?;
    let path = tax.path_to_root(concept)?;
    Ok(pretty(&ConceptView {
        corpus_version: corpus.version(),
        taxonomy: taxonomy.to_string(),
        concept: concept.to_string(),
        label: tax.label(concept).map(str::to_string),
        path_to_root: path.iter().map(|c| c.to_string()).collect(),
        children: tax
            .children_of(concept)?
            .iter()
            .map(|c| c.to_string())
            .collect(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgumentView {
    pub corpus_version: u64,
    pub argument: Argument,
    pub conclusion_text: String,
    pub challenges: Vec<Challenge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgumentsView {
    pub corpus_version: u64,
    pub arguments: Vec<Argument>,
}

pub fn arguments_json(corpus: &Corpus) -> String {
    pretty(&ArgumentsView {
        corpus_version: corpus.version(),
        arguments: corpus.arguments().cloned().collect(),
    })
}

pub fn argument_json(corpus: &Corpus, id: &str) -> Result<String, ApiError> {
    let arg = corpus
        .argument(id)
        .ok_or_else(|| CorpusError::UnknownArgument(id.to_string()))?;
    let scheme = corpus.schemes().require(&arg.scheme)?;
    Ok(pretty(&ArgumentView {
        corpus_version: corpus.version(),
        argument: arg.clone(),
        conclusion_text: scheme.render_conclusion(&arg.fillers),
        challenges: corpus
            .challenges()
            .filter(|c| c.argument == id)
            .cloned()
            .collect(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChallengeView {
    pub corpus_version: u64,
    pub challenge: Challenge,
}

pub fn challenge_json(corpus: &Corpus, challenge: &Challenge) -> String {
    pretty(&ChallengeView {
        corpus_version: corpus.version(),
        challenge: challenge.clone(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestimonyView {
    pub corpus_version: u64,
    pub created: bool,
    pub testimony: TestimonyLink,
}

/// The stored link for a pair; `created` is false when the call repeated an
/// existing assertion.
pub fn testimony_json(
    corpus: &Corpus,
    source: &str,
    statement: &str,
    created: bool,
) -> Result<String, ApiError> {
    let link = corpus
        .testimony(source, statement)
        .ok_or_else(|| CorpusError::UnknownSource(source.to_string()))?;
    Ok(pretty(&TestimonyView {
        corpus_version: corpus.version(),
        created,
        testimony: link.clone(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileOpView {
    pub corpus_version: u64,
    pub action: String,
    pub path: String,
}

pub fn file_op_json(action: &str, path: &Path, corpus_version: u64) -> String {
    pretty(&FileOpView {
        corpus_version,
        action: action.to_string(),
        path: path.display().to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisView {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DebateCard {
    pub argument: String,
    pub scheme: String,
    pub author: String,
    pub posted_at: DateTime<Utc>,
    pub fillers: BTreeMap<String, String>,
    pub report: ReportView,
}

/// Pro and con columns for one hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DebateView {
    pub corpus_version: u64,
    pub hypothesis: HypothesisView,
    pub pro: Vec<DebateCard>,
    pub con: Vec<DebateCard>,
}

pub fn debate_json(corpus: &Corpus, hypothesis: &str) -> Result<String, ApiError> {
    let statement = corpus
        .statement(hypothesis)
        .ok_or_else(|| CorpusError::UnknownStatement(hypothesis.to_string()))?;
    let mut pro = Vec::new();
    let mut con = Vec::new();
    for arg in corpus
        .arguments()
        .filter(|a| a.target_hypothesis == hypothesis)
    {
        let card = DebateCard {
            argument: arg.id.clone(),
            scheme: arg.scheme.clone(),
            author: arg.author.clone(),
            posted_at: arg.posted_at,
            fillers: arg.fillers.clone(),
            report: credibility::credibility(&arg.id, corpus)?.to_view(),
        };
        match arg.stance {
            Stance::Pro => pro.push(card),
            Stance::Con => con.push(card),
        }
    }
    Ok(pretty(&DebateView {
        corpus_version: corpus.version(),
        hypothesis: HypothesisView {
            id: statement.id.clone(),
            text: statement.text.clone(),
        },
        pro,
        con,
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomySummary {
    pub name: String,
    pub concepts: usize,
}

/// Counts reported after loading a corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestSummary {
    pub corpus_version: u64,
    pub taxonomies: Vec<TaxonomySummary>,
    pub schemes: usize,
    pub statements: usize,
    pub sources: usize,
    pub testimony: usize,
    pub arguments: usize,
    pub challenges: usize,
}

impl IngestSummary {
    pub fn of(corpus: &Corpus) -> Self {
        Self {
            corpus_version: corpus.version(),
            taxonomies: corpus
                .taxonomies()
                .iter()
                .map(|t| TaxonomySummary {
                    name: t.name().to_string(),
                    concepts: t.len(),
                })
                .collect(),
            schemes: corpus.schemes().len(),
            statements: corpus.statements().count(),
            sources: corpus.sources().count(),
            testimony: corpus.testimony_links().count(),
            arguments: corpus.arguments().count(),
            challenges: corpus.challenges().count(),
        }
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

impl std::fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.taxonomies.len();
        write!(
            f,
            "loaded: {n} {}",
            if n == 1 { "taxonomy" } else { "taxonomies" }
        )?;
        let parts: Vec<String> = self
            .taxonomies
            .iter()
            .map(|t| format!("{} {}", t.name, t.concepts))
            .collect();
        if !parts.is_empty() {
            write!(f, " ({})", parts.join(", "))?;
        }
        write!(
            f,
            ", {} schemes, {} statements, {} sources, {} testimony links, {} arguments, {} challenges",
            self.schemes, self.statements, self.sources, self.testimony, self.arguments, self.challenges
        )
    }
}
