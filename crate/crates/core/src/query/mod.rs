//! A small conjunctive query language over the argument corpus.
//!
//! ```text
//! FIND ARGUMENTS WHERE scheme=expert_opinion AND stance=pro
//!     AND target="antibiotics are not recommended for pregnant women"
//!     ORDER BY posted DESC LIMIT 10
//! ```
//!
//! Conditions: `scheme=ID`, `stance=pro|con`, `target="text"|ID`,
//! `author="name"`, `location WITHIN ID`, `posted>=DATE`, `posted<DATE`,
//! `annotated WITH ID`. Keywords are case-insensitive. `WITHIN` and `WITH`
//! expand through the taxonomy, so `location WITHIN Europe` also matches
//! authors posting from Germany.

mod eval;
mod parser;

use std::fmt;

use chrono::{DateTime, Timelike, Utc};
use thiserror::Error;

use crate::corpus::{CorpusError, Stance};
use crate::taxonomy::ConceptId;

pub use eval::{evaluate, expand_concept, QueryHit, QueryResults};
pub use parser::{parse, parse_at};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    /// Matches the hypothesis statement with this id.
    Id(String),
    /// Matches the hypothesis whose text equals this, ignoring case and
    /// runs of whitespace.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Filter {
    Scheme(String),
    Stance(Stance),
    Target(Target),
    Author(String),
    LocationWithin(ConceptId),
    PostedFrom(DateTime<Utc>),
    PostedBefore(DateTime<Utc>),
    AnnotatedWith(ConceptId),
}

impl Filter {
    /// Filters sharing a key may not appear together in one query.
    pub fn key(&self) -> &'static str {
        match self {
            Filter::Scheme(_) => "scheme",
            Filter::Stance(_) => "stance",
            Filter::Target(_) => "target",
            Filter::Author(_) => "author",
            Filter::LocationWithin(_) => "location",
            Filter::PostedFrom(_) => "posted>=",
            Filter::PostedBefore(_) => "posted<",
            Filter::AnnotatedWith(_) => "annotated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderBy {
    /// Unrated arguments last; ties by newest post, then id.
    #[default]
    CredibilityDesc,
    PostedDesc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub filters: Vec<Filter>,
    pub order_by: OrderBy,
    pub limit: Option<u64>,
}

impl Query {
    pub fn new(filters: Vec<Filter>) -> Self {
        Self {
            filters,
            order_by: OrderBy::default(),
            limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown concept {concept} in {taxonomy}")]
    UnknownConcept { taxonomy: String, concept: String },
    #[error("unknown scheme {0}")]
    UnknownScheme(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '+')
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

/// Bare when it lexes back as a single word, quoted otherwise.
fn write_id(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if !s.is_empty() && s.chars().all(is_word_char) {
        f.write_str(s)
    } else {
        write_quoted(f, s)
    }
}

fn write_date(f: &mut fmt::Formatter<'_>, d: &DateTime<Utc>) -> fmt::Result {
    if d.num_seconds_from_midnight() == 0 && d.nanosecond() == 0 {
        write!(f, "{}", d.format("%Y-%m-%d"))
    } else {
        write!(
            f,
            "{}",
            d.to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true)
        )
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::Scheme(s) => {
                f.write_str("scheme=")?;
                write_id(f, s)
            }
            Filter::Stance(s) => write!(f, "stance={s}"),
            Filter::Target(Target::Id(id)) => {
                f.write_str("target=")?;
                write_id(f, id)
            }
            Filter::Target(Target::Text(t)) => {
                f.write_str("target=")?;
                write_quoted(f, t)
            }
            Filter::Author(a) => {
                f.write_str("author=")?;
                write_quoted(f, a)
            }
            Filter::LocationWithin(c) => {
                f.write_str("location WITHIN ")?;
                write_id(f, c.as_str())
            }
            Filter::PostedFrom(d) => {
                f.write_str("posted>=")?;
                write_date(f, d)
            }
            Filter::PostedBefore(d) => {
                f.write_str("posted<")?;
                write_date(f, d)
            }
            Filter::AnnotatedWith(c) => {
                f.write_str("annotated WITH ")?;
                write_id(f, c.as_str())
            }
        }
    }
}

/// Canonical text; parsing it yields an equal [`Query`].
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FIND ARGUMENTS WHERE ")?;
        for (i, filter) in self.filters.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{filter}")?;
        }
        if self.order_by == OrderBy::PostedDesc {
            f.write_str(" ORDER BY posted DESC")?;
        }
        if let Some(n) = self.limit {
            write!(f, " LIMIT {n}")?;
        }
        Ok(())
    }
}
