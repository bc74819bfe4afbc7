use std::cmp::Ordering;
use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Filter, OrderBy, Query, QueryError, Target};
use crate::corpus::{Argument, Corpus, LOCATION_TAXONOMY};
use crate::credibility::{self, json_number, Degree};
use crate::taxonomy::{ConceptId, Taxonomy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryHit {
    pub argument: String,
    pub credibility: Option<Degree>,
    pub posted_at: DateTime<Utc>,
    pub author: String,
}

/// Wire form of a query answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResults {
    pub query: String,
    pub corpus_version: u64,
    pub results: Vec<HitView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitView {
    pub argument: String,
    pub credibility: Option<f64>,
    pub posted_at: DateTime<Utc>,
    pub author: String,
}

impl QueryResults {
    pub fn new(query: &Query, corpus: &Corpus, hits: &[QueryHit]) -> Self {
        Self {
            query: query.to_string(),
            corpus_version: corpus.version(),
            results: hits
                .iter()
                .map(|h| HitView {
                    argument: h.argument.clone(),
                    credibility: h.credibility.as_ref().map(json_number),
                    posted_at: h.posted_at,
                    author: h.author.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("results serialize");
        out.push('\n');
        out
    }
}

fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every concept at or below `concept` in the named taxonomy.
pub fn expand_concept(
    corpus: &Corpus,
    taxonomy: &str,
    concept: &str,
) -> Result<BTreeSet<ConceptId>, QueryError> {
    let unknown = || QueryError::UnknownConcept {
        taxonomy: taxonomy.to_string(),
        concept: concept.to_string(),
    };
    let tax = corpus.taxonomies().get(taxonomy).map_err(|_| unknown())?;
    let set = tax.descendants(concept).map_err(|_| unknown())?;
    Ok(set.into_iter().cloned().collect())
}

/// A filter with its concept sets expanded, ready to test arguments.
enum Resolved<'a> {
    Scheme(&'a str),
    Stance(crate::corpus::Stance),
    TargetId(&'a str),
    TargetText(String),
    Author(&'a str),
    Location(BTreeSet<ConceptId>),
    From(DateTime<Utc>),
    Before(DateTime<Utc>),
    /// Taxonomies containing the concept, with the concept's subtree in each.
    Annotated(Vec<(&'a Taxonomy, BTreeSet<ConceptId>)>),
}

fn resolve<'a>(filter: &'a Filter, corpus: &'a Corpus) -> Result<Resolved<'a>, QueryError> {
    Ok(match filter {
        Filter::Scheme(s) => {
            if corpus.schemes().get(s).is_none() {
                return Err(QueryError::UnknownScheme(s.clone()));
            }
            Resolved::Scheme(s)
        }
        Filter::Stance(s) => Resolved::Stance(*s),
        Filter::Target(Target::Id(id)) => Resolved::TargetId(id),
        Filter::Target(Target::Text(t)) => Resolved::TargetText(normalize(t)),
        Filter::Author(a) => Resolved::Author(a),
        Filter::LocationWithin(c) => {
            Resolved::Location(expand_concept(corpus, LOCATION_TAXONOMY, c.as_str())?)
        }
        Filter::PostedFrom(d) => Resolved::From(*d),
        Filter::PostedBefore(d) => Resolved::Before(*d),
        Filter::AnnotatedWith(c) => {
            let scopes: Vec<_> = corpus
                .taxonomies()
                .containing(c.as_str())
                .map(|t| {
                    let subtree = t.descendants(c.as_str()).expect("concept is present");
                    (t, subtree.into_iter().cloned().collect())
                })
                .collect();
            if scopes.is_empty() {
                return Err(QueryError::UnknownConcept {
                    taxonomy: "any taxonomy".into(),
                    concept: c.to_string(),
                });
            }
            Resolved::Annotated(scopes)
        }
    })
}

fn matches(r: &Resolved<'_>, arg: &Argument, corpus: &Corpus) -> bool {
    match r {
        Resolved::Scheme(s) => arg.scheme == *s,
        Resolved::Stance(s) => arg.stance == *s,
        Resolved::TargetId(id) => arg.target_hypothesis == *id,
        Resolved::TargetText(t) => corpus
            .statement(&arg.target_hypothesis)
            .is_some_and(|s| normalize(&s.text) == *t),
        Resolved::Author(a) => arg.author == *a,
        Resolved::Location(set) => arg
            .author_location
            .as_ref()
            .is_some_and(|l| set.contains(l)),
        Resolved::From(d) => arg.posted_at >= *d,
        Resolved::Before(d) => arg.posted_at < *d,
        Resolved::Annotated(scopes) => arg.annotations.iter().any(|a| {
            scopes
                .iter()
                .any(|(t, set)| t.name() == a.taxonomy && set.contains(&a.concept))
        }),
    }
}

fn order(order_by: OrderBy, a: &QueryHit, b: &QueryHit) -> Ordering {
    let by_posted = b
        .posted_at
        .cmp(&a.posted_at)
        .then_with(|| a.argument.cmp(&b.argument));
    match order_by {
        OrderBy::PostedDesc => by_posted,
        OrderBy::CredibilityDesc => match (&a.credibility, &b.credibility) {
            (Some(x), Some(y)) => y.cmp(x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
        .then(by_posted),
    }
}

/// Arguments satisfying every filter, ordered per the query.
pub fn evaluate(query: &Query, corpus: &Corpus) -> Result<Vec<QueryHit>, QueryError> {
    let resolved = query
        .filters
        .iter()
        .map(|f| resolve(f, corpus))
        .collect::<Result<Vec<_>, _>>()?;
    let mut hits = Vec::new();
    for arg in corpus.arguments() {
        if resolved.iter().all(|r| matches(r, arg, corpus)) {
            let report = credibility::credibility(&arg.id, corpus)?;
            hits.push(QueryHit {
                argument: arg.id.clone(),
                credibility: report.credibility,
                posted_at: arg.posted_at,
                author: arg.author.clone(),
            });
        }
    }
    hits.sort_by(|a, b| order(query.order_by, a, b));
    if let Some(n) = query.limit {
        hits.truncate(n as usize);
    }
    Ok(hits)
}
