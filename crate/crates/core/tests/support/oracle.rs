//! Reference model. Floating point, brute force and deliberately written
//! without calling into the engine's evaluators, ordering or filters; it only
//! reads raw corpus records and taxonomy parent links.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use argweave_core::corpus::{Argument, ChallengeStatus, Corpus, Polarity, Stance};
use argweave_core::query::{Filter, OrderBy, Query, Target};
use argweave_core::taxonomy::Taxonomy;

pub const EPS: f64 = 1e-9;

/// `[c, parent(c), ..., root]`, walking raw parent links.
pub fn ancestors(tax: &Taxonomy, c: &str) -> Vec<String> {
    let mut out = vec![c.to_string()];
    let mut cur = c.to_string();
    while let Some(p) = tax.parent_of(&cur) {
        cur = p.to_string();
        out.push(cur.clone());
    }
    out
}

pub fn subsumed(tax: &Taxonomy, narrow: &str, broad: &str) -> bool {
    ancestors(tax, narrow).iter().any(|a| a == broad)
}

/// Nodes shared by both root paths over the length of the subject's path.
pub fn closeness(tax: &Taxonomy, subject: &str, expert: &str) -> f64 {
    let s: BTreeSet<String> = ancestors(tax, subject).into_iter().collect();
    let e: BTreeSet<String> = ancestors(tax, expert).into_iter().collect();
    s.intersection(&e).count() as f64 / s.len() as f64
}

/// Every concept whose ancestor chain contains `c`.
pub fn descendants(tax: &Taxonomy, c: &str) -> BTreeSet<String> {
    tax.concepts()
        .map(|x| x.to_string())
        .filter(|x| subsumed(tax, x, c))
        .collect()
}

fn is_expert(tax: &Taxonomy, expertise: &[String], domain: &str) -> bool {
    expertise.iter().any(|e| subsumed(tax, e, domain))
}

fn bool_degree(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

/// Per-question degrees for the expert-opinion scheme, before challenges.
fn expert_opinion_degrees(corpus: &Corpus, arg: &Argument) -> Vec<Option<f64>> {
    let tax = corpus
        .taxonomies()
        .get("expertise")
        .expect("expertise taxonomy");
    let source_id = &arg.fillers["expert"];
    let domain = arg.fillers["domain"].as_str();
    let statement_id = &arg.fillers["assertion"];
    let source = corpus.source(source_id).expect("source");
    let expertise: Vec<String> = source.expertise.iter().map(|e| e.to_string()).collect();

    let cq1 = if expertise.is_empty() {
        Some(0.0)
    } else if is_expert(tax, &expertise, domain) {
        Some(1.0)
    } else {
        Some(
            expertise
                .iter()
                .map(|e| closeness(tax, domain, e))
                .fold(0.0, f64::max),
        )
    };

    let statement = corpus.statement(statement_id).expect("statement");
    let cq2 = match &statement.field {
        Some(f) if f.taxonomy == "expertise" => {
            bool_degree(subsumed(tax, f.concept.as_str(), domain))
        }
        _ => Some(0.0),
    };

    let link = corpus
        .testimony_links()
        .find(|l| &l.source == source_id && &l.statement == statement_id);
    let cq3 = link.map(|l| {
        if l.polarity == Polarity::Supports {
            1.0
        } else {
            0.0
        }
    });

    let cq4 = bool_degree(source.unreliable_flags.is_empty());

    let mut experts = 0usize;
    let mut backing = 0usize;
    for l in corpus
        .testimony_links()
        .filter(|l| &l.statement == statement_id)
    {
        let s = corpus.source(&l.source).expect("testimony source");
        let ex: Vec<String> = s.expertise.iter().map(|e| e.to_string()).collect();
        if is_expert(tax, &ex, domain) {
            experts += 1;
            if l.polarity == Polarity::Supports {
                backing += 1;
            }
        }
    }
    let cq5 = (experts > 0).then(|| backing as f64 / experts as f64);

    let cq6 = bool_degree(!arg.evidence_links.is_empty());
    vec![cq1, cq2, cq3, cq4, cq5, cq6]
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub cq_ids: Vec<String>,
    pub degrees: Vec<Option<f64>>,
    pub credibility: Option<f64>,
}

pub fn credibility(corpus: &Corpus, argument: &str) -> OracleReport {
    let arg = corpus.argument(argument).expect("argument");
    let scheme = corpus.schemes().get(&arg.scheme).expect("scheme");
    let cq_ids: Vec<String> = scheme.cqs.iter().map(|q| q.cq_id.clone()).collect();
    let mut degrees = if arg.scheme == "expert_opinion" {
        expert_opinion_degrees(corpus, arg)
    } else {
        vec![None; cq_ids.len()]
    };
    for (cq, d) in cq_ids.iter().zip(degrees.iter_mut()) {
        let challenged = corpus
            .challenges()
            .any(|c| c.argument == arg.id && &c.cq_id == cq && c.status == ChallengeStatus::Open);
        if challenged {
            *d = Some(0.0);
        }
    }
    let rated: Vec<f64> = degrees.iter().flatten().copied().collect();
    let credibility = (!rated.is_empty()).then(|| rated.iter().sum::<f64>() / rated.len() as f64);
    OracleReport {
        cq_ids,
        degrees,
        credibility,
    }
}

fn squash(s: &str) -> String {
    let mut out = String::new();
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&word.to_lowercase());
    }
    out
}

fn keep(corpus: &Corpus, filter: &Filter, arg: &Argument) -> bool {
    match filter {
        Filter::Scheme(s) => &arg.scheme == s,
        Filter::Stance(s) => arg.stance == *s,
        Filter::Target(Target::Id(id)) => &arg.target_hypothesis == id,
        Filter::Target(Target::Text(t)) => {
            squash(
                &corpus
                    .statement(&arg.target_hypothesis)
                    .expect("target")
                    .text,
            ) == squash(t)
        }
        Filter::Author(a) => &arg.author == a,
        Filter::LocationWithin(c) => {
            let tax = corpus
                .taxonomies()
                .get("location")
                .expect("location taxonomy");
            arg.author_location
                .as_ref()
                .is_some_and(|l| subsumed(tax, l.as_str(), c.as_str()))
        }
        Filter::PostedFrom(d) => arg.posted_at >= *d,
        Filter::PostedBefore(d) => arg.posted_at < *d,
        Filter::AnnotatedWith(c) => arg.annotations.iter().any(|a| {
            corpus.taxonomies().get(&a.taxonomy).is_ok_and(|t| {
                t.contains(c.as_str()) && subsumed(t, a.concept.as_str(), c.as_str())
            })
        }),
    }
}

/// Ids the engine should return, in order. Assumes every concept and scheme
/// the query names exists.
pub fn run_query(corpus: &Corpus, query: &Query) -> Vec<String> {
    let mut rows: Vec<(String, Option<f64>, i64)> = corpus
        .arguments()
        .filter(|a| query.filters.iter().all(|f| keep(corpus, f, a)))
        .map(|a| {
            (
                a.id.clone(),
                credibility(corpus, &a.id).credibility,
                a.posted_at.timestamp(),
            )
        })
        .collect();
    let newest_first = |a: &(String, Option<f64>, i64), b: &(String, Option<f64>, i64)| {
        b.2.cmp(&a.2).then(a.0.cmp(&b.0))
    };
    rows.sort_by(|a, b| match query.order_by {
        OrderBy::PostedDesc => newest_first(a, b),
        OrderBy::CredibilityDesc => {
            let by_cred = match (a.1, b.1) {
                (Some(x), Some(y)) if (x - y).abs() < EPS => Ordering::Equal,
                (Some(x), Some(y)) => y.partial_cmp(&x).unwrap(),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            };
            by_cred.then_with(|| newest_first(a, b))
        }
    });
    let mut ids: Vec<String> = rows.into_iter().map(|r| r.0).collect();
    if let Some(n) = query.limit {
        ids.truncate(n as usize);
    }
    ids
}

pub fn stance_word(s: Stance) -> &'static str {
    match s {
        Stance::Pro => "pro",
        Stance::Con => "con",
    }
}
